#include "pmqkd/sweep.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "pmqkd/errors.hpp"
#include "pmqkd/photonics.hpp"

namespace pmqkd {

std::string to_string(SweepMode m) {
    switch (m) {
        case SweepMode::Analytic: return "analytic";
        case SweepMode::MonteCarlo: return "montecarlo";
        case SweepMode::Both: return "both";
    }
    return "?";
}

SweepMode parse_sweep_mode(const std::string& s) {
    if (s == "analytic") return SweepMode::Analytic;
    if (s == "montecarlo") return SweepMode::MonteCarlo;
    if (s == "both") return SweepMode::Both;
    throw ModelUnavailable("unknown sweep mode '" + s +
                           "' (expected analytic, montecarlo or both)");
}

void SweepSpec::validate() const {
    if (!(L_start >= 0.0) || !std::isfinite(L_start))
        throw RangeError("L_start must be >= 0");
    if (!(L_end >= L_start)) throw RangeError("L_end must be >= L_start");
    if (!(L_step > 0.0)) throw RangeError("L_step must be > 0");
    if (mode != SweepMode::Analytic && rounds < 1)
        throw RangeError("rounds must be >= 1 in MC modes");
    if (streams < 0) throw RangeError("streams must be >= 0");
    if (fixed_mu && !(*fixed_mu > 0.0))
        throw RangeError("fixed_mu must be > 0");
}

namespace {

std::string fmt12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

int resolve_streams(int streams) {
    if (streams > 0) return streams;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

SweepRow evaluate_distance(const ProtocolParams& params, const SweepSpec& spec,
                           double L, std::uint64_t row_index) {
    SweepRow row;
    row.L = L;

    ProtocolParams p3 = params;
    p3.L = L;
    ProtocolParams p2 = p3;
    p2.n = 2;

    const std::vector<double> grid = make_mu_grid(spec.mu_grid);
    const bool optimize = spec.optimize_mu && !spec.fixed_mu;

    double rate3_trits = 0.0;
    double rate2_trits = 0.0;
    if (optimize) {
        const OptResult o3 = optimize_intensity(p3, grid, spec.detector_model,
                                                spec.ex_model);
        p3.mu_a = p3.mu_b = o3.mu_star;
        row.mu = o3.mu_star;
        row.obs = o3.obs;
        rate3_trits = o3.rate_star;
        const OptResult o2 = optimize_intensity(p2, grid, spec.detector_model,
                                                spec.ex_model);
        p2.mu_a = p2.mu_b = o2.mu_star;
        rate2_trits = o2.rate_star;
    } else {
        if (spec.fixed_mu) {
            p3.mu_a = p3.mu_b = *spec.fixed_mu;
            p2.mu_a = p2.mu_b = *spec.fixed_mu;
        }
        row.mu = (p3.mu_a + p3.mu_b) / 2.0;
        row.obs = analytic_observables(p3, spec.detector_model, spec.ex_model);
        rate3_trits = rate_pm(p3.n, p3.M, row.obs, p3.f);
        const Observables obs2 =
            analytic_observables(p2, spec.detector_model, spec.ex_model);
        rate2_trits = rate_pm(p2.n, p2.M, obs2, p2.f);
    }

    if (spec.mode != SweepMode::Analytic) {
        const int streams = resolve_streams(spec.streams);
        const TallySummary mc =
            run_batch(p3, spec.rounds, derive_seed(spec.seed, row_index),
                      streams);
        row.mc = mc;
        if (spec.mode == SweepMode::MonteCarlo) {
            // base columns carry the MC estimates themselves
            row.obs.q = mc.q_hat;
            row.obs.ez = mc.ez_hat;
            row.obs.ex = estimate_ex(mc, p3, spec.ex_model);
            rate3_trits = rate_pm(p3.n, p3.M, row.obs, p3.f);
        }
    }

    row.rate_trits = rate3_trits;
    row.rate_bits = rate_bits_from_trits(rate3_trits, p3.n);
    row.rate_2pm_bits = rate_bits_from_trits(rate2_trits, 2);

    const double eta_ch = channel_transmittance(p3);
    row.plob_bits = (eta_ch >= 1.0)
                        ? std::numeric_limits<double>::infinity()
                        : plob_bound(eta_ch);
    return row;
}

}  // namespace

SweepResult run_sweep(const ProtocolParams& params, const SweepSpec& spec) {
    params.validate();
    spec.validate();

    SweepResult result;
    result.has_mc = (spec.mode != SweepMode::Analytic);

    const double eps = spec.L_step * 1e-9;
    std::uint64_t i = 0;
    for (;; ++i) {
        const double L = spec.L_start + static_cast<double>(i) * spec.L_step;
        if (L > spec.L_end + eps) break;
        try {
            result.rows.push_back(evaluate_distance(params, spec, L, i));
        } catch (const std::exception& e) {
            throw std::runtime_error("at L=" + fmt12(L) + " km: " + e.what());
        }
    }
    return result;
}

std::string to_csv(const SweepResult& result) {
    std::string out =
        "L_km,mu,Q,Ez,Ex,rate_trits,rate_bits,rate_2pm_bits,plob_bits";
    if (result.has_mc) out += ",q_hat,ez_hat,std_q,std_ez";
    out += "\n";
    for (const SweepRow& r : result.rows) {
        out += fmt12(r.L);
        out += ',';
        out += fmt12(r.mu);
        out += ',';
        out += fmt12(r.obs.q);
        out += ',';
        out += fmt12(r.obs.ez);
        out += ',';
        out += fmt12(r.obs.ex);
        out += ',';
        out += fmt12(r.rate_trits);
        out += ',';
        out += fmt12(r.rate_bits);
        out += ',';
        out += fmt12(r.rate_2pm_bits);
        out += ',';
        out += fmt12(r.plob_bits);
        if (result.has_mc) {
            const TallySummary& mc = r.mc.value();
            out += ',';
            out += fmt12(mc.q_hat);
            out += ',';
            out += fmt12(mc.ez_hat);
            out += ',';
            out += fmt12(mc.std_q);
            out += ',';
            out += fmt12(mc.std_ez);
        }
        out += '\n';
    }
    return out;
}

void write_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << text;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string sidecar_json(const ProtocolParams& params, const SweepSpec& spec) {
    nlohmann::ordered_json j;
    auto& p = j["params"];
    p["n"] = params.n;
    p["mu_a"] = params.mu_a;
    p["mu_b"] = params.mu_b;
    p["p_d"] = params.p_d;
    p["eta_d"] = params.eta_d;
    p["f"] = params.f;
    p["M"] = params.M;
    p["e_d"] = params.e_d;
    p["alpha"] = params.alpha;
    p["L"] = params.L;
    auto& s = j["sweep"];
    s["L_start"] = spec.L_start;
    s["L_end"] = spec.L_end;
    s["L_step"] = spec.L_step;
    s["mode"] = to_string(spec.mode);
    s["rounds"] = spec.rounds;
    s["seed"] = spec.seed;
    s["streams"] = spec.streams;
    s["optimize_mu"] = spec.optimize_mu;
    if (spec.fixed_mu)
        s["fixed_mu"] = *spec.fixed_mu;
    else
        s["fixed_mu"] = nullptr;
    s["mu_grid"] = {{"lo", spec.mu_grid.lo},
                    {"hi", spec.mu_grid.hi},
                    {"points", spec.mu_grid.points}};
    s["detector_model"] = to_string(spec.detector_model);
    s["ex_model"] = spec.ex_model.name();
    return j.dump(2) + "\n";
}

}  // namespace pmqkd
