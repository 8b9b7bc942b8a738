#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "pmqkd/params.hpp"
#include "pmqkd/photonics.hpp"
#include "pmqkd/rng.hpp"
#include "pmqkd/sifting.hpp"

namespace pmqkd {

// Everything observable about one simulated round.
struct RoundRecord {
    Trit kappa_a;
    Trit kappa_b;
    PhaseSample phi_a;
    PhaseSample phi_b;
    double delta_phi = 0.0; // theta_a - theta_b mod 2*pi
    ClickPattern clicks;
    bool success = false;                // exactly one click
    std::optional<DetectorId> detector;  // set iff success
    std::optional<SiftOutcome> sift;     // set iff success and slice accepted
    double slice_residual = 0.0;         // slice_match residual, always set
};

// Aggregate of a batch; q_hat/ez_hat are ratios, std_* their standard errors.
struct TallySummary {
    std::uint64_t rounds_total = 0;
    std::uint64_t rounds_sifted = 0;
    double q_hat = 0.0;
    double ez_hat = 0.0;
    double std_q = 0.0;
    double std_ez = 0.0;
    std::uint64_t seed = 0;
};

// serialize exactly the seven public fields
std::string to_json(const TallySummary& s);

// One full protocol round: random symbols and phases, multiport interference
// with threshold detection, misalignment on the responding detector, slice
// comparison, and Bob's two flips on success.
RoundRecord simulate_round(const ProtocolParams& p, Prng& rng);

// `rounds` iid rounds split across `streams` workers. Every round draws from
// its own stream seeded by (master_seed, round index), and integer tallies
// merge by summation, so the summary is bit-identical for any stream count.
TallySummary run_batch(const ProtocolParams& p, std::uint64_t rounds,
                       std::uint64_t master_seed, int streams = 1);

// E^X estimator applied to a measured ez.
struct ExModel {
    enum class Kind { SlicePenalty, Constant };
    Kind kind = Kind::SlicePenalty;
    double constant = 0.0;

    double apply(double ez, const ProtocolParams& p) const;
    std::string name() const;
};

// Parse "slice" or "constant:<value>"; throws ModelUnavailable otherwise.
ExModel parse_ex_model(const std::string& selector);

// Intrinsic X-basis penalty of M-slice phase discretization:
// 1 - sinc(pi/M) = 1 - sin(pi/M)/(pi/M).
double slice_penalty(int M);

// ex inferred from a batch; SlicePenalty gives ez_hat + slice_penalty(M),
// Constant gives the constant itself. Result clamped into [0, 1].
double estimate_ex(const TallySummary& summary, const ProtocolParams& p,
                   const ExModel& model = {});

// Selector form: "slice" or "constant:<value>"; throws ModelUnavailable.
double estimate_ex(const TallySummary& summary, const ProtocolParams& p,
                   const std::string& model);

}  // namespace pmqkd
