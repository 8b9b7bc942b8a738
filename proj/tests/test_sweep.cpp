#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmqkd/errors.hpp"
#include "pmqkd/sweep.hpp"

using namespace pmqkd;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("single-distance analytic sweep at L=0") {
    ProtocolParams p;
    SweepSpec spec;
    spec.L_start = spec.L_end = 0.0;
    spec.L_step = 10.0;

    const SweepResult res = run_sweep(p, spec);
    REQUIRE(res.rows.size() == 1);
    CHECK_FALSE(res.has_mc);

    const SweepRow& r = res.rows[0];
    CHECK(r.L == 0.0);
    CHECK(r.rate_bits > 0.0);
    CHECK(r.rate_2pm_bits > 0.0);
    CHECK(std::isinf(r.plob_bits)); // lossless channel saturates the bound
    CHECK(r.rate_trits > 0.0);
    CHECK(r.rate_bits ==
          doctest::Approx(r.rate_trits * std::log2(3.0)).epsilon(1e-12));
}

TEST_CASE("row grid covers [L_start, L_end] inclusively") {
    ProtocolParams p;
    SweepSpec spec;
    spec.L_start = 0.0;
    spec.L_end = 100.0;
    spec.L_step = 30.0;
    const SweepResult res = run_sweep(p, spec);
    REQUIRE(res.rows.size() == 4); // 0, 30, 60, 90
    for (size_t i = 0; i < res.rows.size(); ++i)
        CHECK(res.rows[i].L == doctest::Approx(30.0 * i));

    spec.L_end = 90.0; // exact endpoint must be included
    CHECK(run_sweep(p, spec).rows.size() == 4);
}

TEST_CASE("full optimized sweep: monotone rate, cutoff in band") {
    ProtocolParams p;
    SweepSpec spec; // defaults: 0..500 step 10, ideal model, optimize
    const SweepResult res = run_sweep(p, spec);
    REQUIRE(res.rows.size() == 51);

    double prev = std::numeric_limits<double>::infinity();
    double last_positive = -1.0;
    for (const SweepRow& r : res.rows) {
        CHECK(r.rate_bits <= prev + 1e-15);
        prev = r.rate_bits;
        if (r.rate_bits > 0.0) last_positive = r.L;
        if (r.L > 0.0) CHECK(std::isfinite(r.plob_bits));
    }
    CHECK(last_positive >= 400.0);
    CHECK(last_positive <= 540.0);
}

TEST_CASE("analytic sweep is deterministic") {
    ProtocolParams p;
    SweepSpec spec;
    spec.L_end = 60.0;
    spec.L_step = 20.0;
    const std::string a = to_csv(run_sweep(p, spec));
    const std::string b = to_csv(run_sweep(p, spec));
    CHECK(a == b);
}

TEST_CASE("csv schema and round-trip precision") {
    ProtocolParams p;
    SweepSpec spec;
    spec.L_start = 40.0;
    spec.L_end = 60.0;
    spec.L_step = 20.0;
    const SweepResult res = run_sweep(p, spec);
    const std::string csv = to_csv(res);
    const auto ls = lines_of(csv);
    REQUIRE(ls.size() == 3);
    CHECK(ls[0] == "L_km,mu,Q,Ez,Ex,rate_trits,rate_bits,rate_2pm_bits,plob_bits");

    const auto cells = split(ls[1], ',');
    REQUIRE(cells.size() == 9);
    CHECK(std::stod(cells[0]) == 40.0);
    CHECK(std::stod(cells[1]) == doctest::Approx(res.rows[0].mu).epsilon(1e-11));
    CHECK(std::stod(cells[2]) == doctest::Approx(res.rows[0].obs.q).epsilon(1e-11));
    CHECK(std::stod(cells[6]) ==
          doctest::Approx(res.rows[0].rate_bits).epsilon(1e-11));
}

TEST_CASE("fixed mu disables optimization") {
    ProtocolParams p;
    SweepSpec spec;
    spec.L_start = spec.L_end = 100.0;
    spec.fixed_mu = 0.07;
    const SweepResult res = run_sweep(p, spec);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].mu == doctest::Approx(0.07));

    ProtocolParams pp = p;
    pp.L = 100.0;
    pp.mu_a = pp.mu_b = 0.07;
    const Observables o = analytic_observables(pp, DetectorModel::Ideal);
    CHECK(res.rows[0].obs.q == doctest::Approx(o.q).epsilon(1e-12));
}

TEST_CASE("monte carlo mode carries estimates into the base columns") {
    ProtocolParams p;
    SweepSpec spec;
    spec.L_start = spec.L_end = 50.0;
    spec.mode = SweepMode::MonteCarlo;
    spec.rounds = 50'000;
    spec.seed = 7;
    spec.streams = 2;
    spec.optimize_mu = false;
    spec.detector_model = DetectorModel::Multiport;

    const SweepResult res = run_sweep(p, spec);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.has_mc);
    const SweepRow& r = res.rows[0];
    REQUIRE(r.mc.has_value());
    CHECK(r.mc->rounds_total == 50'000);
    CHECK(r.obs.q == r.mc->q_hat);
    CHECK(r.obs.ez == r.mc->ez_hat);
    CHECK(r.rate_trits == rate_pm(p.n, p.M, r.obs, p.f));

    const std::string csv = to_csv(res);
    CHECK(lines_of(csv)[0] ==
          "L_km,mu,Q,Ez,Ex,rate_trits,rate_bits,rate_2pm_bits,plob_bits,"
          "q_hat,ez_hat,std_q,std_ez");
    REQUIRE(split(lines_of(csv)[1], ',').size() == 13);
}

TEST_CASE("monte carlo sweep is stream-count invariant") {
    ProtocolParams p;
    SweepSpec spec;
    spec.L_start = 0.0;
    spec.L_end = 40.0;
    spec.L_step = 40.0;
    spec.mode = SweepMode::MonteCarlo;
    spec.rounds = 20'000;
    spec.seed = 11;
    spec.optimize_mu = false;

    spec.streams = 1;
    const std::string one = to_csv(run_sweep(p, spec));
    spec.streams = 5;
    const std::string five = to_csv(run_sweep(p, spec));
    CHECK(one == five);
}

TEST_CASE("both mode keeps analytic base columns and appends estimates") {
    ProtocolParams p;
    SweepSpec spec;
    spec.L_start = spec.L_end = 30.0;
    spec.mode = SweepMode::Both;
    spec.rounds = 20'000;
    spec.seed = 3;
    spec.streams = 2;
    spec.optimize_mu = false;

    const SweepResult both = run_sweep(p, spec);
    spec.mode = SweepMode::Analytic;
    const SweepResult plain = run_sweep(p, spec);

    REQUIRE(both.rows.size() == 1);
    REQUIRE(both.rows[0].mc.has_value());
    CHECK(both.rows[0].obs.q == plain.rows[0].obs.q);
    CHECK(both.rows[0].obs.ez == plain.rows[0].obs.ez);
    CHECK(both.rows[0].rate_bits == plain.rows[0].rate_bits);
}

TEST_CASE("errors carry the offending distance") {
    ProtocolParams p;
    SweepSpec spec;
    spec.L_start = spec.L_end = 70.0;
    spec.mu_grid.lo = 0.0; // invalid grid trips inside the row evaluation
    try {
        run_sweep(p, spec);
        FAIL("expected an error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("at L=70") != std::string::npos);
    }
}

TEST_CASE("spec validation") {
    ProtocolParams p;
    SweepSpec spec;
    spec.L_step = 0.0;
    CHECK_THROWS_AS(run_sweep(p, spec), RangeError);
    spec = SweepSpec{};
    spec.L_end = -1.0;
    CHECK_THROWS_AS(run_sweep(p, spec), RangeError);
    spec = SweepSpec{};
    spec.mode = SweepMode::MonteCarlo;
    spec.rounds = 0;
    CHECK_THROWS_AS(run_sweep(p, spec), RangeError);
    spec = SweepSpec{};
    spec.fixed_mu = -0.5;
    CHECK_THROWS_AS(run_sweep(p, spec), RangeError);
}

TEST_CASE("mode names round-trip") {
    for (SweepMode m :
         {SweepMode::Analytic, SweepMode::MonteCarlo, SweepMode::Both})
        CHECK(parse_sweep_mode(to_string(m)) == m);
    CHECK_THROWS_AS(parse_sweep_mode("exact"), ModelUnavailable);
}

TEST_CASE("write_atomic replaces the whole file") {
    const std::string path = "test_sweep_atomic.txt";
    write_atomic(path, "first\n");
    write_atomic(path, "second version\n");
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == "second version\n");
    std::remove(path.c_str());
}

TEST_CASE("sidecar json parses and records the run setup") {
    ProtocolParams p;
    p.L = 25.0;
    SweepSpec spec;
    spec.mode = SweepMode::Both;
    spec.seed = 42;
    spec.fixed_mu = 0.2;
    spec.detector_model = DetectorModel::Multiport;

    const auto j = nlohmann::json::parse(sidecar_json(p, spec));
    CHECK(j["params"]["n"] == 3);
    CHECK(j["params"]["eta_d"] == 0.145);
    CHECK(j["sweep"]["mode"] == "both");
    CHECK(j["sweep"]["seed"] == 42);
    CHECK(j["sweep"]["fixed_mu"] == 0.2);
    CHECK(j["sweep"]["detector_model"] == "multiport");
    CHECK(j["sweep"]["ex_model"] == "slice");
    CHECK(j["sweep"]["mu_grid"]["points"] == 40);

    spec.fixed_mu.reset();
    const auto j2 = nlohmann::json::parse(sidecar_json(p, spec));
    CHECK(j2["sweep"]["fixed_mu"].is_null());
}
