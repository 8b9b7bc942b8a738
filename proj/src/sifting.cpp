#include "pmqkd/sifting.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace pmqkd {

namespace {

void check_n(int n) {
    if (n < 2) throw RangeError("n must be >= 2");
}

void check_trit(Trit k, int n) {
    if (k.value < 0 || k.value >= n)
        throw RangeError("kappa must be in [0, n)");
}

int mod_n(int x, int n) { return ((x % n) + n) % n; }

// Signed distance (in slice units) from slice difference d to the nearest
// lattice multiple k*M/n, k chosen over 0..n-1 with ties toward smaller k.
struct Nearest {
    int k;
    double r; // signed, in [-M/2, M/2]
};

Nearest nearest_lattice(int d, int M, int n) {
    Nearest best{0, 1e300};
    for (int k = 0; k < n; ++k) {
        double r = static_cast<double>(d) -
                   static_cast<double>(k) * static_cast<double>(M) / n;
        r -= M * std::round(r / M);
        if (std::abs(r) < std::abs(best.r)) best = {k, r};
    }
    return best;
}

}  // namespace

double reduce_phase(double radians) {
    double r = std::fmod(radians, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0; // fmod/rounding edge
    return r;
}

double total_phase(Trit kappa, PhaseSample phi, int n) {
    check_n(n);
    check_trit(kappa, n);
    return reduce_phase(phi.radians + kTwoPi * kappa.value / n);
}

double phase_delta(double theta_a, double theta_b) {
    return reduce_phase(theta_a - theta_b);
}

DetectorId ideal_detector(double delta, int n, double tol) {
    check_n(n);
    const double d = reduce_phase(delta);
    const double spacing = kTwoPi / n;
    const int k = static_cast<int>(std::llround(d / spacing)); // 0..n
    const double dist = std::abs(d - k * spacing);
    if (dist > tol)
        throw NotOnLattice("phase difference " + std::to_string(d) +
                           " rad is " + std::to_string(dist) +
                           " rad from the nearest 2*pi*k/" + std::to_string(n) +
                           " point (tol " + std::to_string(tol) + ")");
    return k % n;
}

Trit flip_by_detector(Trit kappa_b, DetectorId d, int n) {
    check_n(n);
    check_trit(kappa_b, n);
    if (d < 0 || d >= n) throw RangeError("detector id must be in [0, n)");
    return Trit{mod_n(kappa_b.value + d, n)};
}

Trit flip_by_phase(Trit kappa_b_prime, int s, int n) {
    check_n(n);
    check_trit(kappa_b_prime, n);
    if (s < 0 || s >= n) throw RangeError("phase class s must be in [0, n)");
    return Trit{mod_n(kappa_b_prime.value - s, n)};
}

SiftOutcome sift_round(Trit kappa_a, Trit kappa_b, PhaseSample phi_a,
                       PhaseSample phi_b, int n) {
    const int s = ideal_detector(phase_delta(phi_a.radians, phi_b.radians), n);
    const DetectorId d = ideal_detector(
        phase_delta(total_phase(kappa_a, phi_a, n), total_phase(kappa_b, phi_b, n)),
        n);
    const Trit kbp = flip_by_detector(kappa_b, d, n);
    const Trit kbpp = flip_by_phase(kbp, s, n);
    return SiftOutcome{d, kbp, kbpp, true};
}

int slice_index(double phi, int M) {
    if (M < 1) throw RangeError("M must be >= 1");
    int m = static_cast<int>(std::floor(reduce_phase(phi) * M / kTwoPi));
    if (m >= M) m = M - 1; // phi just below 2*pi can round up
    return m;
}

SliceMatch slice_match(int m_a, int m_b, int M, int n) {
    check_n(n);
    if (M < n) throw RangeError("M must be >= n");
    if (m_a < 0 || m_a >= M || m_b < 0 || m_b >= M)
        throw RangeError("slice indices must be in [0, M)");
    const int d = mod_n(m_a - m_b, M);
    const Nearest nb = nearest_lattice(d, M, n);
    const double residual = std::abs(nb.r);
    return SliceMatch{residual <= 0.5, nb.k % n, residual};
}

std::vector<SliceOffset> accepted_slice_offsets(int M, int n) {
    check_n(n);
    if (M < n) throw RangeError("M must be >= n");
    std::vector<SliceOffset> out;
    for (int d = 0; d < M; ++d) {
        const Nearest nb = nearest_lattice(d, M, n);
        if (std::abs(nb.r) <= 0.5) out.push_back({d, nb.k % n, nb.r});
    }
    return out;
}

std::vector<CorrespondenceRow> correspondence_table(int n, int s) {
    check_n(n);
    if (s < 0 || s >= n) throw RangeError("phase class s must be in [0, n)");
    std::vector<CorrespondenceRow> rows;
    rows.reserve(static_cast<size_t>(n) * n);
    for (int ka = 0; ka < n; ++ka) {
        for (int kb = 0; kb < n; ++kb) {
            const int dc = mod_n(ka - kb + s, n);
            const DetectorId det = dc;
            const int kbp = mod_n(kb + det, n);
            const int kbpp = mod_n(kbp - s, n);
            rows.push_back({ka, kb, dc, det, kbp, kbpp});
        }
    }
    return rows;
}

std::string format_lattice_phase(int k, int n) {
    // 2*pi*k/n as (num/den)*pi in lowest terms
    int num = 2 * mod_n(k, n);
    int den = n;
    const int g = std::gcd(num, den);
    if (num == 0) return "0";
    num /= g;
    den /= g;
    std::string head = (num == 1) ? "pi" : std::to_string(num) + "pi";
    if (den == 1) return head;
    return head + "/" + std::to_string(den);
}

std::string render_table(int n, int s) {
    const auto rows = correspondence_table(n, s);
    const std::string announced = format_lattice_phase(s, n);
    std::ostringstream os;
    os << std::left;
    os << std::setw(8) << "kappa_a" << std::setw(8) << "kappa_b"
       << std::setw(14) << "|phi_a-phi_b|" << std::setw(10) << "delta_phi"
       << std::setw(9) << "response" << std::setw(9) << "kappa_b'"
       << "kappa_b''" << '\n';
    os << std::string(66, '-') << '\n';
    for (const auto& r : rows) {
        os << std::setw(8) << r.kappa_a << std::setw(8) << r.kappa_b
           << std::setw(14) << announced << std::setw(10)
           << format_lattice_phase(r.delta_class, n) << std::setw(9)
           << ("D_" + std::to_string(r.detector)) << std::setw(9)
           << r.kappa_b_prime << r.kappa_b_double_prime << '\n';
    }
    return os.str();
}

}  // namespace pmqkd
