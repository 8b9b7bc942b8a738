#include "pmqkd/montecarlo.hpp"

#include <cmath>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pmqkd/errors.hpp"

namespace pmqkd {

RoundRecord simulate_round(const ProtocolParams& p, Prng& rng) {
    RoundRecord rec;
    rec.kappa_a = Trit{rng.uniform_int(p.n)};
    rec.kappa_b = Trit{rng.uniform_int(p.n)};
    rec.phi_a = PhaseSample{rng.uniform() * kTwoPi};
    rec.phi_b = PhaseSample{rng.uniform() * kTwoPi};

    const double theta_a = total_phase(rec.kappa_a, rec.phi_a, p.n);
    const double theta_b = total_phase(rec.kappa_b, rec.phi_b, p.n);
    rec.delta_phi = phase_delta(theta_a, theta_b);

    const double eta = arm_transmittance(p);
    const PortIntensities ports =
        port_intensities(p.mu_a * eta, p.mu_b * eta, rec.delta_phi, p.n);
    const PortVec probs = click_probabilities(ports, p.p_d);
    rec.clicks = sample_clicks(probs, rng);
    rec.success = (rec.clicks.count() == 1);

    const SliceMatch sm =
        slice_match(slice_index(rec.phi_a.radians, p.M),
                    slice_index(rec.phi_b.radians, p.M), p.M, p.n);
    rec.slice_residual = sm.residual_slices;

    if (rec.success) {
        DetectorId d = apply_misalignment(rec.clicks.single_index(), p.e_d,
                                          p.n, rng);
        rec.detector = d;
        if (sm.accepted) {
            const Trit kbp = flip_by_detector(rec.kappa_b, d, p.n);
            const Trit kbpp = flip_by_phase(kbp, sm.s, p.n);
            rec.sift = SiftOutcome{d, kbp, kbpp, true};
        }
    }
    return rec;
}

namespace {

struct Tally {
    std::uint64_t sifted = 0;
    std::uint64_t errors = 0;
};

Tally run_range(const ProtocolParams& p, std::uint64_t master_seed,
                std::uint64_t lo, std::uint64_t hi) {
    Tally t;
    for (std::uint64_t r = lo; r < hi; ++r) {
        Prng rng(derive_seed(master_seed, r));
        const RoundRecord rec = simulate_round(p, rng);
        if (rec.sift) {
            ++t.sifted;
            if (rec.sift->kappa_b_double_prime != rec.kappa_a) ++t.errors;
        }
    }
    return t;
}

}  // namespace

TallySummary run_batch(const ProtocolParams& p, std::uint64_t rounds,
                       std::uint64_t master_seed, int streams) {
    p.validate();
    if (rounds < 1) throw RangeError("rounds must be >= 1");
    if (streams < 1) throw RangeError("streams must be >= 1");

    std::uint64_t workers = static_cast<std::uint64_t>(streams);
    if (workers > rounds) workers = rounds;

    // Every round seeds its own generator from (master_seed, round index),
    // so the partition below is arbitrary: any worker count gives the same
    // per-round outcomes, and the integer tallies merge exactly.
    std::vector<Tally> parts(workers);
    if (workers == 1) {
        parts[0] = run_range(p, master_seed, 0, rounds);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t lo = rounds * w / workers;
            const std::uint64_t hi = rounds * (w + 1) / workers;
            pool.emplace_back([&, lo, hi, w] {
                parts[w] = run_range(p, master_seed, lo, hi);
            });
        }
        for (auto& th : pool) th.join();
    }

    Tally total;
    for (const Tally& t : parts) {
        total.sifted += t.sifted;
        total.errors += t.errors;
    }

    TallySummary s;
    s.rounds_total = rounds;
    s.rounds_sifted = total.sifted;
    s.seed = master_seed;
    s.q_hat = static_cast<double>(total.sifted) / static_cast<double>(rounds);
    s.ez_hat = total.sifted
                   ? static_cast<double>(total.errors) /
                         static_cast<double>(total.sifted)
                   : 0.0;
    s.std_q = std::sqrt(s.q_hat * (1.0 - s.q_hat) /
                        static_cast<double>(rounds));
    s.std_ez = total.sifted
                   ? std::sqrt(s.ez_hat * (1.0 - s.ez_hat) /
                               static_cast<double>(total.sifted))
                   : 0.0;
    return s;
}

std::string to_json(const TallySummary& s) {
    nlohmann::ordered_json j;
    j["rounds_total"] = s.rounds_total;
    j["rounds_sifted"] = s.rounds_sifted;
    j["q_hat"] = s.q_hat;
    j["ez_hat"] = s.ez_hat;
    j["std_q"] = s.std_q;
    j["std_ez"] = s.std_ez;
    j["seed"] = s.seed;
    return j.dump(2);
}

double slice_penalty(int M) {
    if (M < 1) throw RangeError("M must be >= 1");
    const double t = kTwoPi / 2.0 / M; // pi/M
    return 1.0 - std::sin(t) / t;
}

double ExModel::apply(double ez, const ProtocolParams& p) const {
    double ex = 0.0;
    switch (kind) {
        case Kind::SlicePenalty:
            ex = ez + slice_penalty(p.M);
            break;
        case Kind::Constant:
            ex = constant;
            break;
    }
    if (ex < 0.0) ex = 0.0;
    if (ex > 1.0) ex = 1.0;
    return ex;
}

std::string ExModel::name() const {
    switch (kind) {
        case Kind::SlicePenalty:
            return "slice";
        case Kind::Constant:
            return "constant:" + std::to_string(constant);
    }
    return "?";
}

ExModel parse_ex_model(const std::string& selector) {
    if (selector == "slice") return ExModel{};
    const std::string prefix = "constant:";
    if (selector.rfind(prefix, 0) == 0) {
        ExModel m;
        m.kind = ExModel::Kind::Constant;
        try {
            size_t pos = 0;
            const std::string arg = selector.substr(prefix.size());
            m.constant = std::stod(arg, &pos);
            if (pos != arg.size()) throw std::invalid_argument(arg);
        } catch (const std::exception&) {
            throw ModelUnavailable("bad constant in E^X model selector '" +
                                   selector + "'");
        }
        if (m.constant < 0.0 || m.constant > 1.0)
            throw ModelUnavailable("constant E^X must be in [0, 1]");
        return m;
    }
    throw ModelUnavailable("unknown E^X model '" + selector +
                           "' (expected 'slice' or 'constant:<value>')");
}

double estimate_ex(const TallySummary& summary, const ProtocolParams& p,
                   const ExModel& model) {
    return model.apply(summary.ez_hat, p);
}

double estimate_ex(const TallySummary& summary, const ProtocolParams& p,
                   const std::string& model) {
    return estimate_ex(summary, p, parse_ex_model(model));
}

}  // namespace pmqkd
