#include "pmqkd/photonics.hpp"

#include <cmath>

#include "pmqkd/errors.hpp"
#include "pmqkd/sifting.hpp"

namespace pmqkd {

void ProtocolParams::validate() const {
    if (n < 2 || n > kMaxPorts)
        throw RangeError("n must be in [2, " + std::to_string(kMaxPorts) + "]");
    if (!(mu_a >= 0.0) || !std::isfinite(mu_a))
        throw RangeError("mu_a must be >= 0");
    if (!(mu_b >= 0.0) || !std::isfinite(mu_b))
        throw RangeError("mu_b must be >= 0");
    if (!(p_d >= 0.0 && p_d <= 1.0)) throw RangeError("p_d must be in [0, 1]");
    if (!(eta_d >= 0.0 && eta_d <= 1.0))
        throw RangeError("eta_d must be in [0, 1]");
    if (!(f >= 1.0) || !std::isfinite(f)) throw RangeError("f must be >= 1");
    if (M < n) throw RangeError("M must be >= n");
    if (!(e_d >= 0.0 && e_d <= 1.0)) throw RangeError("e_d must be in [0, 1]");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw RangeError("alpha must be >= 0");
    if (!(L >= 0.0) || !std::isfinite(L)) throw RangeError("L must be >= 0");
}

double arm_transmittance(const ProtocolParams& p) {
    p.validate();
    return p.eta_d * std::pow(10.0, -p.alpha * (p.L / 2.0) / 10.0);
}

PortIntensities port_intensities(double I_a, double I_b, double delta_theta,
                                 int n) {
    if (n < 2 || n > kMaxPorts)
        throw RangeError("n must be in [2, " + std::to_string(kMaxPorts) + "]");
    if (!(I_a >= 0.0) || !(I_b >= 0.0))
        throw RangeError("intensities must be >= 0");
    PortIntensities out;
    out.n = n;
    const double base = (I_a + I_b) / n;
    const double amp = 2.0 * std::sqrt(I_a * I_b) / n;
    for (int k = 0; k < n; ++k) {
        double I = base + amp * std::cos(delta_theta - kTwoPi * k / n);
        if (I < 0.0) I = 0.0; // cancellation noise at perfect destructive points
        out[k] = I;
    }
    return out;
}

PortVec click_probabilities(const PortIntensities& ports, double p_d) {
    if (!(p_d >= 0.0 && p_d <= 1.0)) throw RangeError("p_d must be in [0, 1]");
    PortVec out;
    out.n = ports.n;
    for (int k = 0; k < ports.n; ++k)
        out[k] = 1.0 - (1.0 - p_d) * std::exp(-ports[k]);
    return out;
}

ClickPattern sample_clicks(const PortVec& probs, Prng& rng) {
    ClickPattern cp;
    cp.n = probs.n;
    for (int k = 0; k < probs.n; ++k)
        if (rng.uniform() < probs[k]) cp.bits |= (1u << k);
    return cp;
}

DetectorId apply_misalignment(DetectorId d_true, double e_d, int n, Prng& rng) {
    if (d_true < 0 || d_true >= n)
        throw RangeError("detector id must be in [0, n)");
    if (!(e_d >= 0.0 && e_d <= 1.0)) throw RangeError("e_d must be in [0, 1]");
    if (e_d > 0.0 && rng.uniform() < e_d) {
        // shift by 1..n-1 so the result is uniform over the other detectors
        const int shift = 1 + rng.uniform_int(n - 1);
        return (d_true + shift) % n;
    }
    return d_true;
}

}  // namespace pmqkd
