#pragma once

#include <string>
#include <vector>

#include "pmqkd/errors.hpp"

namespace pmqkd {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Key symbol in {0, ..., n-1}.
struct Trit {
    int value = 0;
    bool operator==(const Trit&) const = default;
};

// Random global phase in [0, 2*pi).
struct PhaseSample {
    double radians = 0.0;
    bool operator==(const PhaseSample&) const = default;
};

// Detector index in {0, ..., n-1}; detector k fires for delta_phi = 2*pi*k/n.
using DetectorId = int;

struct SiftOutcome {
    DetectorId detector = 0;
    Trit kappa_b_prime;        // after the detector flip
    Trit kappa_b_double_prime; // after the phase-class flip; equals kappa_a
    bool accepted = false;
    bool operator==(const SiftOutcome&) const = default;
};

// One row of the announcement-class correspondence: for phase class s, the
// detector response and Bob's two flips as a function of (kappa_a, kappa_b).
struct CorrespondenceRow {
    int kappa_a = 0;
    int kappa_b = 0;
    int delta_class = 0; // delta_phi = 2*pi*delta_class/n
    DetectorId detector = 0;
    int kappa_b_prime = 0;
    int kappa_b_double_prime = 0;
    bool operator==(const CorrespondenceRow&) const = default;
};

// Result of comparing announced slice indices.
struct SliceMatch {
    bool accepted = false;
    int s = 0;                    // phase class k mod n of the nearest lattice point
    double residual_slices = 0.0; // |distance to that lattice point| in slice units
    bool operator==(const SliceMatch&) const = default;
};

// Fold an angle into [0, 2*pi).
double reduce_phase(double radians);

// theta = 2*pi*kappa/n + phi, folded into [0, 2*pi).
double total_phase(Trit kappa, PhaseSample phi, int n);

// (theta_a - theta_b) mod 2*pi, in [0, 2*pi).
double phase_delta(double theta_a, double theta_b);

// Snap delta to the nearest lattice point 2*pi*k/n and return k; throws
// NotOnLattice if the circular distance exceeds tol (default 1e-9 rad).
DetectorId ideal_detector(double delta, int n, double tol = 1e-9);

// Bob's first flip: kappa_b' = (kappa_b + d) mod n.
Trit flip_by_detector(Trit kappa_b, DetectorId d, int n);

// Bob's second flip: kappa_b'' = (kappa_b' - s) mod n.
Trit flip_by_phase(Trit kappa_b_prime, int s, int n);

// Full noiseless sifting of one round with on-lattice announced phases:
// derives s and the detector from the phases, applies both flips.
SiftOutcome sift_round(Trit kappa_a, Trit kappa_b, PhaseSample phi_a,
                       PhaseSample phi_b, int n);

// Index of the slice containing phi (folded first); M slices of width 2*pi/M.
int slice_index(double phi, int M);

// Compare announced slice indices: accept iff the circular slice difference
// d = (m_a - m_b) mod M lies within half a slice of some multiple k*M/n, and
// report s = k mod n plus the residual distance in slice units.
SliceMatch slice_match(int m_a, int m_b, int M, int n);

// All slice differences d in {0..M-1} accepted by slice_match, with their
// phase class and *signed* residual in slice units (d - k*M/n, folded).
struct SliceOffset {
    int d = 0;
    int s = 0;
    double residual_signed = 0.0;
};
std::vector<SliceOffset> accepted_slice_offsets(int M, int n);

// The n*n correspondence rows for phase class s, in (kappa_a, kappa_b)
// lexicographic order. Serves as documentation generator and test oracle.
std::vector<CorrespondenceRow> correspondence_table(int n, int s);

// Lattice phase 2*pi*k/n as a short exact string ("0", "pi/2", "2pi/3", ...).
std::string format_lattice_phase(int k, int n);

// Plain-text rendering of correspondence_table(n, s) with columns
// kappa_a, kappa_b, |phi_a - phi_b|, delta_phi, response, kappa_b', kappa_b''.
std::string render_table(int n, int s);

}  // namespace pmqkd
