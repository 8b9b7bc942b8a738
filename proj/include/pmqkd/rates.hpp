#pragma once

#include <string>
#include <vector>

#include "pmqkd/montecarlo.hpp"
#include "pmqkd/params.hpp"

namespace pmqkd {

struct Observables {
    double q = 0.0;  // gain: sifted successes per pulse pair (q_hat semantics)
    double ez = 0.0; // Z-basis (key) error rate
    double ex = 0.0; // X-basis (phase) error rate
};

// Closed-form detector response used by analytic_observables.
//  Multiport: the physically interfering n-port with threshold detectors,
//    exactly what the Monte Carlo samples (including the triangular
//    within-slice phase-jitter distribution over accepted slice pairs).
//  Ideal: the protocol's idealized discriminator; all received light drives
//    the matched detector, errors come only from dark counts and
//    misalignment. This is the model behind the headline rate curves.
enum class DetectorModel { Multiport, Ideal };

std::string to_string(DetectorModel m);
DetectorModel parse_detector_model(const std::string& selector);

// Two-point entropy in the given base: -x*log(x) - (1-x)*log(1-x), natural
// log ratios; entropy(0)=entropy(1)=0. Throws DomainError outside [0,1] or
// for base <= 1.
double entropy(double x, double base = 2.0);

// 1 - H2(ez) - H2(ex), clamped at 0.
double rate_shor_preskill(double ez, double ex);

// (n/M) * obs.q * max(0, 1 - f*Hn(ez) - Hn(ex)), key symbols (base-n units)
// per pulse. Returns 0 outright when ez or ex exceeds 1/2 (abort region;
// two-point entropy turns over there and the literal bracket would grow
// again, breaking monotonicity in the error rates).
double rate_pm(int n, int M, const Observables& obs, double f);

// Secret bits per pulse: rate_pm in base-n symbols times log2(n).
double rate_bits_from_trits(double rate_trits, int n);

// Repeaterless bound -log2(1 - eta_total); DomainError for eta outside [0,1).
double plob_bound(double eta_total);

// Channel-only end-to-end transmittance 10^(-alpha*L/10) (no detector eta).
double channel_transmittance(const ProtocolParams& p);

// Closed-form per-round observables for the chosen response model;
// ex = ex_model applied to the model's ez.
Observables analytic_observables(const ProtocolParams& p,
                                 DetectorModel model = DetectorModel::Multiport,
                                 const ExModel& ex_model = {});

// Logarithmic mu grid, per-party values.
struct MuGrid {
    double lo = 5e-5;
    double hi = 0.5;
    int points = 40;
};
std::vector<double> make_mu_grid(const MuGrid& g);

struct OptResult {
    double mu_star = 0.0;   // per-party mean photon number
    double rate_star = 0.0; // key symbols (base n) per pulse at mu_star
    Observables obs;        // observables at mu_star
};

// Grid argmax of rate_pm over mu_a = mu_b = mu; ties resolved toward the
// smaller mu. The grid must be nonempty.
OptResult optimize_intensity(const ProtocolParams& p,
                             const std::vector<double>& mu_grid,
                             DetectorModel model = DetectorModel::Multiport,
                             const ExModel& ex_model = {});

}  // namespace pmqkd
