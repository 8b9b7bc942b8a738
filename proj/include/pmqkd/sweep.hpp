#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmqkd/montecarlo.hpp"
#include "pmqkd/params.hpp"
#include "pmqkd/rates.hpp"

namespace pmqkd {

enum class SweepMode { Analytic, MonteCarlo, Both };

std::string to_string(SweepMode m);
SweepMode parse_sweep_mode(const std::string& s);

struct SweepSpec {
    double L_start = 0.0;
    double L_end = 500.0;
    double L_step = 10.0;
    SweepMode mode = SweepMode::Analytic;
    std::uint64_t rounds = 1'000'000; // per distance, MC modes only
    std::uint64_t seed = 1;
    int streams = 0; // 0 = hardware concurrency
    bool optimize_mu = true;
    std::optional<double> fixed_mu; // per-party; setting it disables optimization
    MuGrid mu_grid;
    DetectorModel detector_model = DetectorModel::Ideal;
    ExModel ex_model;

    void validate() const; // RangeError naming the violated field
};

// One output row. MC fields are set in MC modes only.
struct SweepRow {
    double L = 0.0;
    double mu = 0.0;
    Observables obs;      // fills Q, Ez, Ex columns
    double rate_trits = 0.0;
    double rate_bits = 0.0;
    double rate_2pm_bits = 0.0;
    double plob_bits = 0.0;
    std::optional<TallySummary> mc;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool has_mc = false;
};

// Evaluate every distance L_start, L_start+L_step, ..., <= L_end.
// Per row: optimize mu (or use fixed_mu), compute observables with the
// selected models, rate columns for base n and the n=2 reference (own mu
// optimization), and the channel-only PLOB bound (+inf above saturation).
// Errors from the modules propagate with the offending distance attached.
SweepResult run_sweep(const ProtocolParams& params, const SweepSpec& spec);

// Fixed column order; all reals at 12 significant digits.
std::string to_csv(const SweepResult& result);

// Write text to path atomically (temp file in the same directory + rename).
void write_atomic(const std::string& path, const std::string& text);

// Resolved-run sidecar (parameters + sweep spec) as pretty JSON.
std::string sidecar_json(const ProtocolParams& params, const SweepSpec& spec);

}  // namespace pmqkd
