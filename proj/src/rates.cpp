#include "pmqkd/rates.hpp"

#include <cmath>

#include "pmqkd/errors.hpp"
#include "pmqkd/photonics.hpp"
#include "pmqkd/sifting.hpp"

namespace pmqkd {

std::string to_string(DetectorModel m) {
    return m == DetectorModel::Multiport ? "multiport" : "ideal";
}

DetectorModel parse_detector_model(const std::string& selector) {
    if (selector == "multiport") return DetectorModel::Multiport;
    if (selector == "ideal") return DetectorModel::Ideal;
    throw ModelUnavailable("unknown detector model '" + selector +
                           "' (expected 'multiport' or 'ideal')");
}

double entropy(double x, double base) {
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError("entropy argument must be in [0, 1]");
    if (!(base >= 2.0)) throw DomainError("entropy base must be >= 2");
    if (x == 0.0 || x == 1.0) return 0.0;
    return (-x * std::log(x) - (1.0 - x) * std::log(1.0 - x)) /
           std::log(base);
}

double rate_shor_preskill(double ez, double ex) {
    const double r = 1.0 - entropy(ez, 2.0) - entropy(ex, 2.0);
    return r > 0.0 ? r : 0.0;
}

double rate_pm(int n, int M, const Observables& obs, double f) {
    if (n < 2) throw RangeError("n must be >= 2");
    if (M < n) throw RangeError("M must be >= n");
    if (!(f >= 1.0)) throw RangeError("f must be >= 1");
    if (!(obs.q >= 0.0 && obs.q <= 1.0))
        throw RangeError("q must be in [0, 1]");
    if (obs.ez > 0.5 || obs.ex > 0.5) return 0.0; // abort region
    const double bracket =
        1.0 - f * entropy(obs.ez, n) - entropy(obs.ex, n);
    if (bracket <= 0.0) return 0.0;
    return (static_cast<double>(n) / M) * obs.q * bracket;
}

double rate_bits_from_trits(double rate_trits, int n) {
    return rate_trits * std::log2(static_cast<double>(n));
}

double plob_bound(double eta_total) {
    if (!(eta_total >= 0.0 && eta_total < 1.0))
        throw DomainError("eta_total must be in [0, 1)");
    // -log2(1 - eta) via log1p to keep precision (and the eta/ln2 lower
    // bound) for very small eta
    return -std::log1p(-eta_total) / std::log(2.0);
}

double channel_transmittance(const ProtocolParams& p) {
    return std::pow(10.0, -p.alpha * p.L / 10.0);
}

namespace {

// exactly-one-click probabilities split into matched port vs the rest,
// for phase offset eps from the matched lattice point
struct ClickSplit {
    double correct = 0.0;
    double wrong = 0.0;
};

ClickSplit single_click_split(const ProtocolParams& p, double I_a, double I_b,
                              double eps) {
    const PortIntensities ports = port_intensities(I_a, I_b, eps, p.n);
    const PortVec probs = click_probabilities(ports, p.p_d);
    ClickSplit out;
    for (int k = 0; k < p.n; ++k) {
        double only = probs[k];
        for (int j = 0; j < p.n; ++j)
            if (j != k) only *= 1.0 - probs[j];
        if (k == 0)
            out.correct = only;
        else
            out.wrong += only;
    }
    return out;
}

// error probability after misalignment, given one click with split (C, W)
double error_mix(const ClickSplit& cs, double e_d, int n) {
    return e_d * cs.correct + (1.0 - e_d / (n - 1)) * cs.wrong;
}

// Average f over the within-slice jitter w = u_a - u_b, triangular on
// (-1, 1): integral of (1-|w|) f(w). Composite Simpson on each half keeps
// the |w| kink at a panel boundary; 256 intervals per half is converged to
// machine precision for these smooth integrands.
template <typename F>
double triangular_average(F&& f) {
    constexpr int kSegments = 256;
    const double h = 1.0 / kSegments;
    double acc = 0.0;
    for (int half = 0; half < 2; ++half) {
        const double x0 = (half == 0) ? -1.0 : 0.0;
        double sum = 0.0;
        for (int i = 0; i <= kSegments; ++i) {
            const double x = x0 + i * h;
            const double weight = 1.0 - std::abs(x);
            double coeff;
            if (i == 0 || i == kSegments)
                coeff = 1.0;
            else
                coeff = (i % 2) ? 4.0 : 2.0;
            sum += coeff * weight * f(x);
        }
        acc += sum * h / 3.0;
    }
    return acc;
}

Observables multiport_observables(const ProtocolParams& p) {
    const double eta = arm_transmittance(p);
    const double I_a = p.mu_a * eta;
    const double I_b = p.mu_b * eta;
    const auto offsets = accepted_slice_offsets(p.M, p.n);
    const double slice_rad = kTwoPi / p.M;

    double q_sum = 0.0;
    double err_sum = 0.0;
    for (const SliceOffset& off : offsets) {
        q_sum += triangular_average([&](double w) {
            const ClickSplit cs = single_click_split(
                p, I_a, I_b, slice_rad * (off.residual_signed + w));
            return cs.correct + cs.wrong;
        });
        err_sum += triangular_average([&](double w) {
            const ClickSplit cs = single_click_split(
                p, I_a, I_b, slice_rad * (off.residual_signed + w));
            return error_mix(cs, p.e_d, p.n);
        });
    }

    Observables obs;
    obs.q = q_sum / p.M;
    obs.ez = (q_sum > 0.0) ? err_sum / q_sum : 0.0;
    return obs;
}

Observables ideal_observables(const ProtocolParams& p) {
    const double eta = arm_transmittance(p);
    const double S = (p.mu_a + p.mu_b) * eta;
    // all received light on the matched port, dark counts everywhere
    PortIntensities ports;
    ports.n = p.n;
    ports[0] = S;
    const PortVec probs = click_probabilities(ports, p.p_d);
    ClickSplit cs;
    for (int k = 0; k < p.n; ++k) {
        double only = probs[k];
        for (int j = 0; j < p.n; ++j)
            if (j != k) only *= 1.0 - probs[j];
        if (k == 0)
            cs.correct = only;
        else
            cs.wrong += only;
    }
    const double p1 = cs.correct + cs.wrong;
    const double accept =
        static_cast<double>(accepted_slice_offsets(p.M, p.n).size()) / p.M;

    Observables obs;
    obs.q = accept * p1;
    obs.ez = (p1 > 0.0) ? error_mix(cs, p.e_d, p.n) / p1 : 0.0;
    return obs;
}

}  // namespace

Observables analytic_observables(const ProtocolParams& p, DetectorModel model,
                                 const ExModel& ex_model) {
    p.validate();
    Observables obs = (model == DetectorModel::Multiport)
                          ? multiport_observables(p)
                          : ideal_observables(p);
    obs.ex = ex_model.apply(obs.ez, p);
    return obs;
}

std::vector<double> make_mu_grid(const MuGrid& g) {
    if (!(g.lo > 0.0) || !(g.hi >= g.lo))
        throw RangeError("mu grid bounds must satisfy 0 < lo <= hi");
    if (g.points < 1) throw RangeError("mu grid needs at least one point");
    std::vector<double> out;
    out.reserve(static_cast<size_t>(g.points));
    if (g.points == 1) {
        out.push_back(g.lo);
        return out;
    }
    const double ratio = g.hi / g.lo;
    for (int i = 0; i < g.points; ++i)
        out.push_back(g.lo * std::pow(ratio, static_cast<double>(i) /
                                                 (g.points - 1)));
    return out;
}

OptResult optimize_intensity(const ProtocolParams& p,
                             const std::vector<double>& mu_grid,
                             DetectorModel model, const ExModel& ex_model) {
    if (mu_grid.empty()) throw RangeError("mu grid must be nonempty");
    OptResult best;
    best.rate_star = -1.0;
    for (const double mu : mu_grid) {
        if (!(mu > 0.0)) throw RangeError("mu grid values must be > 0");
        ProtocolParams pp = p;
        pp.mu_a = mu;
        pp.mu_b = mu;
        const Observables obs = analytic_observables(pp, model, ex_model);
        const double rate = rate_pm(p.n, p.M, obs, p.f);
        const bool better =
            rate > best.rate_star ||
            (rate == best.rate_star && mu < best.mu_star);
        if (better) {
            best.mu_star = mu;
            best.rate_star = rate;
            best.obs = obs;
        }
    }
    return best;
}

}  // namespace pmqkd
