#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "pmqkd/params.hpp"
#include "pmqkd/rng.hpp"

namespace pmqkd {

using DetectorId = int;  // matches sifting.hpp

// Fixed-capacity per-port vector (intensities or probabilities).
struct PortVec {
    std::array<double, kMaxPorts> v{};
    int n = 0;

    double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
    double sum() const {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += v[static_cast<std::size_t>(i)];
        return s;
    }
};
using PortIntensities = PortVec;

// Click outcomes of one gate as a bitmask over ports.
struct ClickPattern {
    std::uint32_t bits = 0;
    int n = 0;

    bool clicked(int k) const { return (bits >> k) & 1u; }
    int count() const { return __builtin_popcount(bits); }
    // Index of the single clicking port; only meaningful when count() == 1.
    int single_index() const { return __builtin_ctz(bits); }
    bool operator==(const ClickPattern&) const = default;
};

// One-arm transmittance source->node: eta_d * 10^(-alpha*(L/2)/10).
double arm_transmittance(const ProtocolParams& p);

// Mean photon numbers at the n output ports of the symmetric multiport for
// input intensities I_a, I_b and phase difference delta_theta:
//   I_k = (1/n) * (I_a + I_b + 2*sqrt(I_a*I_b)*cos(delta_theta - 2*pi*k/n)).
PortIntensities port_intensities(double I_a, double I_b, double delta_theta,
                                 int n);

// Click probability per port for threshold detectors with dark counts:
//   p_k = 1 - (1 - p_d) * exp(-I_k).
PortVec click_probabilities(const PortIntensities& ports, double p_d);

// Independent Bernoulli click per port.
ClickPattern sample_clicks(const PortVec& probs, Prng& rng);

// With probability e_d, replace the true detector by one of the other n-1
// uniformly; otherwise keep it.
DetectorId apply_misalignment(DetectorId d_true, double e_d, int n, Prng& rng);

}  // namespace pmqkd
