#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pmqkd/photonics.hpp"
#include "pmqkd/rng.hpp"
#include "pmqkd/sifting.hpp"

using namespace pmqkd;

TEST_CASE("params validation names the violated field") {
    ProtocolParams p;
    CHECK_NOTHROW(p.validate());

    p.eta_d = 1.5;
    try {
        p.validate();
        FAIL("expected RangeError");
    } catch (const RangeError& e) {
        CHECK(std::string(e.what()).find("eta_d") != std::string::npos);
    }
    p = ProtocolParams{};
    p.n = 1;
    CHECK_THROWS_AS(p.validate(), RangeError);
    p = ProtocolParams{};
    p.M = 2; // below n=3
    CHECK_THROWS_AS(p.validate(), RangeError);
    p = ProtocolParams{};
    p.mu_a = -0.1;
    CHECK_THROWS_AS(p.validate(), RangeError);
    p = ProtocolParams{};
    p.L = -1.0;
    CHECK_THROWS_AS(p.validate(), RangeError);
}

TEST_CASE("arm transmittance") {
    ProtocolParams p; // eta_d=0.145, alpha=0.2
    p.L = 0.0;
    CHECK(arm_transmittance(p) == doctest::Approx(0.145).epsilon(1e-15));
    p.L = 200.0;
    CHECK(arm_transmittance(p) == doctest::Approx(1.45e-3).epsilon(1e-12));
    p = ProtocolParams{};
    p.eta_d = 1.0;
    CHECK(arm_transmittance(p) == doctest::Approx(1.0).epsilon(1e-15));

    SUBCASE("strictly decreasing in L, linear in eta_d") {
        ProtocolParams q;
        double prev = 2.0;
        for (double L : {0.0, 10.0, 50.0, 100.0, 400.0}) {
            q.L = L;
            const double t = arm_transmittance(q);
            CHECK(t < prev);
            prev = t;
        }
        ProtocolParams h = q;
        h.eta_d = q.eta_d / 2.0;
        CHECK(arm_transmittance(h) ==
              doctest::Approx(arm_transmittance(q) / 2.0).epsilon(1e-14));
    }
}

TEST_CASE("port intensities at lattice offsets") {
    SUBCASE("matched phase n=3: (4/3, 1/3, 1/3)") {
        const auto I = port_intensities(1.0, 1.0, 0.0, 3);
        CHECK(I[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
        CHECK(I[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(I[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("single beam spreads uniformly") {
        for (double t : {0.0, 0.7, 3.0}) {
            const auto I = port_intensities(1.0, 0.0, t, 3);
            for (int k = 0; k < 3; ++k)
                CHECK(I[k] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        }
    }
    SUBCASE("shift symmetry: delta=2pi/3 puts the peak on port 1") {
        const auto I = port_intensities(1.0, 1.0, kTwoPi / 3.0, 3);
        CHECK(I[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
        CHECK(I[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
        CHECK(I[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("matched-port dominance and the exact 1:4 side ratio") {
        for (int n = 2; n <= 6; ++n)
            for (int d = 0; d < n; ++d) {
                const auto I = port_intensities(1.0, 1.0, kTwoPi * d / n, n);
                for (int k = 0; k < n; ++k)
                    if (k != d) CHECK(I[k] < I[d]);
            }
        const auto I3 = port_intensities(1.0, 1.0, 0.0, 3);
        CHECK(I3[1] / I3[0] == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("energy conservation over random inputs") {
    Prng rng(7);
    for (int trial = 0; trial < 100000; ++trial) {
        const double Ia = rng.uniform() * 2.0;
        const double Ib = rng.uniform() * 2.0;
        const double th = rng.uniform() * kTwoPi;
        const int n = 2 + rng.uniform_int(15);
        const auto I = port_intensities(Ia, Ib, th, n);
        const double total = Ia + Ib;
        if (total == 0.0) {
            CHECK(I.sum() == 0.0);
        } else {
            CHECK(std::abs(I.sum() - total) / total <= 1e-12);
        }
        for (int k = 0; k < n; ++k) CHECK(I[k] >= 0.0);
    }
}

TEST_CASE("n=2 reduces to the balanced beam splitter") {
    Prng rng(8);
    for (int trial = 0; trial < 100000; ++trial) {
        const double Ia = rng.uniform();
        const double Ib = rng.uniform();
        const double th = rng.uniform() * kTwoPi;
        const auto I = port_intensities(Ia, Ib, th, 2);
        const double cross = std::sqrt(Ia * Ib) * std::cos(th);
        CHECK(I[0] == doctest::Approx(0.5 * (Ia + Ib) + cross)
                          .epsilon(1e-12)
                          .scale(1.0));
        CHECK(I[1] == doctest::Approx(0.5 * (Ia + Ib) - cross)
                          .epsilon(1e-12)
                          .scale(1.0));
    }
    // delta = pi matches port 1 (lattice phase pi); port 0 fully extinct
    const auto ext = port_intensities(0.3, 0.3, kTwoPi / 2.0, 2);
    CHECK(ext[0] <= 1e-16);
    CHECK(ext[1] == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("click probabilities") {
    PortIntensities zero;
    zero.n = 3;
    const auto dark = click_probabilities(zero, 8e-8);
    for (int k = 0; k < 3; ++k)
        CHECK(dark[k] == doctest::Approx(8e-8).epsilon(1e-12));

    PortIntensities one;
    one.n = 2;
    one[0] = 0.1;
    const auto p = click_probabilities(one, 0.0);
    CHECK(p[0] == doctest::Approx(1.0 - std::exp(-0.1)).epsilon(1e-15));

    PortIntensities sat;
    sat.n = 2;
    sat[0] = 1e3;
    CHECK(click_probabilities(sat, 0.0)[0] == doctest::Approx(1.0));

    SUBCASE("monotone in intensity and dark rate") {
        PortIntensities a;
        a.n = 2;
        a[0] = 0.1;
        a[1] = 0.2;
        const auto pa = click_probabilities(a, 1e-6);
        CHECK(pa[0] < pa[1]);
        const auto pb = click_probabilities(a, 1e-3);
        CHECK(pa[0] < pb[0]);
    }
}

TEST_CASE("sample_clicks degenerate and statistical behavior") {
    Prng rng(99);
    PortVec probs;
    probs.n = 3;

    for (int k = 0; k < 3; ++k) probs[k] = 0.0;
    for (int t = 0; t < 1000; ++t)
        CHECK(sample_clicks(probs, rng).count() == 0);

    for (int k = 0; k < 3; ++k) probs[k] = 1.0;
    for (int t = 0; t < 1000; ++t)
        CHECK(sample_clicks(probs, rng).count() == 3);

    SUBCASE("empirical rate within 3 sigma of 0.5 per port") {
        for (int k = 0; k < 3; ++k) probs[k] = 0.5;
        const int N = 1000000;
        int hits[3] = {0, 0, 0};
        for (int t = 0; t < N; ++t) {
            const ClickPattern cp = sample_clicks(probs, rng);
            for (int k = 0; k < 3; ++k)
                if (cp.clicked(k)) ++hits[k];
        }
        const double sigma = std::sqrt(0.25 / N);
        for (int k = 0; k < 3; ++k)
            CHECK(std::abs(hits[k] / static_cast<double>(N) - 0.5) <=
                  3.0 * sigma);
    }
}

TEST_CASE("apply_misalignment") {
    Prng rng(123);
    for (int t = 0; t < 1000; ++t)
        CHECK(apply_misalignment(1, 0.0, 3, rng) == 1);
    for (int t = 0; t < 100000; ++t)
        CHECK(apply_misalignment(1, 1.0, 3, rng) != 1);

    SUBCASE("shift rate within 3 sigma of e_d; spread uniform") {
        const int N = 1000000;
        const double e_d = 0.015;
        int shifted = 0;
        int to[3] = {0, 0, 0};
        for (int t = 0; t < N; ++t) {
            const DetectorId d = apply_misalignment(0, e_d, 3, rng);
            if (d != 0) {
                ++shifted;
                ++to[d];
            }
        }
        const double sigma = std::sqrt(e_d * (1.0 - e_d) / N);
        CHECK(std::abs(shifted / static_cast<double>(N) - e_d) <= 3.0 * sigma);
        // each wrong index gets half the shifts
        const double half_sigma = std::sqrt(0.25 * shifted);
        CHECK(std::abs(to[1] - shifted / 2.0) <= 3.0 * half_sigma);
        CHECK(std::abs(to[2] - shifted / 2.0) <= 3.0 * half_sigma);
    }
}
