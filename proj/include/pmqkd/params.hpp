#pragma once

#include <cstdint>

namespace pmqkd {

inline constexpr int kMaxPorts = 16;

// Physical / protocol parameters. Defaults are the standard operating point:
// n=3, 16 phase slices, detector efficiency 0.145, dark count 8e-8 per gate,
// misalignment 1.5%, error-correction inefficiency 1.15, fiber loss
// 0.2 dB/km. mu_a/mu_b are per-party mean photon numbers.
struct ProtocolParams {
    int n = 3;            // number of phase states (and output ports)
    double mu_a = 0.05;   // Alice mean photon number
    double mu_b = 0.05;   // Bob mean photon number
    double p_d = 8e-8;    // dark-count probability per detector per gate
    double eta_d = 0.145; // detector efficiency
    double f = 1.15;      // error-correction inefficiency
    int M = 16;           // phase slices per 2*pi
    double e_d = 0.015;   // misalignment error probability
    double alpha = 0.2;   // fiber attenuation, dB/km
    double L = 0.0;       // total Alice-Bob distance, km (node at midpoint)

    // Throws RangeError naming the violated field.
    void validate() const;
};

}  // namespace pmqkd
