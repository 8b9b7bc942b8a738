#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmqkd/config.hpp"
#include "pmqkd/montecarlo.hpp"
#include "pmqkd/rates.hpp"
#include "pmqkd/sifting.hpp"
#include "pmqkd/sweep.hpp"

namespace {

pmqkd::ProtocolParams load_params(const std::string& config_path) {
    if (config_path.empty()) return pmqkd::parse_config("");
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot read config " + config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return pmqkd::parse_config(buf.str());
}

pmqkd::MuGrid parse_mu_grid(const std::string& text) {
    pmqkd::MuGrid g;
    if (text.empty()) return g;
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::runtime_error("--mu-grid expects lo:hi:points");
    try {
        g.lo = std::stod(text.substr(0, c1));
        g.hi = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
        g.points = std::stoi(text.substr(c2 + 1));
    } catch (const std::exception&) {
        throw std::runtime_error("--mu-grid expects lo:hi:points");
    }
    return g;
}

std::string sidecar_path(const std::string& out_path) {
    std::filesystem::path p(out_path);
    p.replace_extension(".json");
    return p.string();
}

int cmd_sweep(const std::string& config_path, const std::string& out_path,
              const pmqkd::SweepSpec& spec) {
    const pmqkd::ProtocolParams params = load_params(config_path);
    const pmqkd::SweepResult result = pmqkd::run_sweep(params, spec);
    const std::string csv = pmqkd::to_csv(result);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        pmqkd::write_atomic(out_path, csv);
        pmqkd::write_atomic(sidecar_path(out_path),
                            pmqkd::sidecar_json(params, spec));
    }
    return 0;
}

int cmd_table(int n, int s, const std::string& out_path) {
    const std::string text = pmqkd::render_table(n, s);
    if (out_path.empty())
        std::cout << text;
    else
        pmqkd::write_atomic(out_path, text);
    return 0;
}

std::vector<double> parse_distances(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::runtime_error("--distances list is empty");
    return out;
}

int cmd_mc_check(const std::string& config_path, const std::string& out_path,
                 double mu, const std::string& distances,
                 std::uint64_t rounds, std::uint64_t seed, int streams,
                 const std::string& ex_model_sel) {
    pmqkd::ProtocolParams params = load_params(config_path);
    params.mu_a = params.mu_b = mu;
    const pmqkd::ExModel ex_model = pmqkd::parse_ex_model(ex_model_sel);
    const int workers =
        streams > 0 ? streams
                    : std::max(1u, std::thread::hardware_concurrency());

    bool all_ok = true;
    nlohmann::ordered_json report = nlohmann::ordered_json::array();
    std::uint64_t row = 0;
    for (const double L : parse_distances(distances)) {
        pmqkd::ProtocolParams p = params;
        p.L = L;
        const pmqkd::Observables model = pmqkd::analytic_observables(
            p, pmqkd::DetectorModel::Multiport, ex_model);
        const pmqkd::TallySummary mc =
            pmqkd::run_batch(p, rounds, pmqkd::derive_seed(seed, row++), workers);
        const double zq =
            mc.std_q > 0 ? (mc.q_hat - model.q) / mc.std_q
                         : (mc.q_hat == model.q ? 0.0 : INFINITY);
        const double zez =
            mc.std_ez > 0 ? (mc.ez_hat - model.ez) / mc.std_ez
                          : (mc.ez_hat == model.ez ? 0.0 : INFINITY);
        const bool ok = std::abs(zq) <= 3.0 && std::abs(zez) <= 3.0;
        all_ok = all_ok && ok;
        std::cout << "L=" << L << " km: q_hat=" << mc.q_hat
                  << " Q=" << model.q << " z=" << zq
                  << " | ez_hat=" << mc.ez_hat << " Ez=" << model.ez
                  << " z=" << zez << " -> " << (ok ? "ok" : "MISMATCH")
                  << "\n";
        nlohmann::ordered_json entry;
        entry["L_km"] = L;
        entry["q_hat"] = mc.q_hat;
        entry["Q_model"] = model.q;
        entry["z_q"] = zq;
        entry["ez_hat"] = mc.ez_hat;
        entry["Ez_model"] = model.ez;
        entry["z_ez"] = zez;
        entry["rounds"] = rounds;
        entry["ok"] = ok;
        report.push_back(entry);
    }
    if (!out_path.empty())
        pmqkd::write_atomic(out_path, report.dump(2) + "\n");
    std::cout << (all_ok ? "consistency: PASS" : "consistency: FAIL") << "\n";
    return all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Phase-matching n-state QKD simulator: distance sweeps, "
        "correspondence tables, Monte Carlo consistency checks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 1;

    // sweep
    auto* sweep = app.add_subcommand(
        "sweep", "Rate vs distance sweep, CSV output with JSON sidecar");
    pmqkd::SweepSpec spec;
    std::string mode_sel = "analytic";
    std::string detector_sel = "ideal";
    std::string ex_sel = "slice";
    std::string grid_sel;
    double fixed_mu = 0.0;
    sweep->add_option("--config", config_path, "parameter file (key=value)");
    sweep->add_option("--out", out_path,
                      "CSV path; sidecar written next to it (stdout if unset)");
    sweep->add_option("--seed", seed, "master RNG seed")->capture_default_str();
    sweep->add_option("--l-start", spec.L_start, "first distance, km")
        ->capture_default_str();
    sweep->add_option("--l-end", spec.L_end, "last distance, km")
        ->capture_default_str();
    sweep->add_option("--l-step", spec.L_step, "distance step, km")
        ->capture_default_str();
    sweep->add_option("--mode", mode_sel, "analytic | montecarlo | both")
        ->capture_default_str();
    sweep->add_option("--rounds", spec.rounds, "MC rounds per distance")
        ->capture_default_str();
    sweep->add_option("--streams", spec.streams,
                      "MC worker threads (0 = hardware)")
        ->capture_default_str();
    auto* fixed_mu_opt = sweep->add_option(
        "--fixed-mu", fixed_mu, "pin per-party mu instead of optimizing");
    sweep->add_option("--mu-grid", grid_sel,
                      "optimizer grid as lo:hi:points (default 5e-05:0.5:40)");
    sweep->add_option("--detector-model", detector_sel, "ideal | multiport")
        ->capture_default_str();
    sweep->add_option("--ex-model", ex_sel, "slice | constant:<value>")
        ->capture_default_str();

    // table
    auto* table = app.add_subcommand(
        "table", "Render the key-correspondence table for (n, s)");
    int table_n = 3;
    int table_s = 2;
    std::string table_out;
    table->add_option("--n", table_n, "phase-state count")
        ->capture_default_str();
    table->add_option("--s", table_s, "announced phase class")
        ->capture_default_str();
    table->add_option("--out", table_out, "output path (stdout if unset)");

    // mc-check
    auto* check = app.add_subcommand(
        "mc-check", "Monte Carlo vs closed-form consistency suite");
    std::string check_config;
    std::string check_out;
    std::string check_dist = "50,100,200";
    std::string check_ex = "slice";
    double check_mu = 0.05;
    std::uint64_t check_rounds = 10'000'000;
    std::uint64_t check_seed = 1;
    int check_streams = 0;
    check->add_option("--config", check_config, "parameter file (key=value)");
    check->add_option("--out", check_out, "JSON report path");
    check->add_option("--mu", check_mu, "per-party mean photon number")
        ->capture_default_str();
    check->add_option("--distances", check_dist, "comma-separated L list, km")
        ->capture_default_str();
    check->add_option("--rounds", check_rounds, "MC rounds per distance")
        ->capture_default_str();
    check->add_option("--seed", check_seed, "master RNG seed")
        ->capture_default_str();
    check->add_option("--streams", check_streams,
                      "MC worker threads (0 = hardware)")
        ->capture_default_str();
    check->add_option("--ex-model", check_ex, "slice | constant:<value>")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            spec.seed = seed;
            spec.mode = pmqkd::parse_sweep_mode(mode_sel);
            spec.detector_model = pmqkd::parse_detector_model(detector_sel);
            spec.ex_model = pmqkd::parse_ex_model(ex_sel);
            if (!grid_sel.empty()) spec.mu_grid = parse_mu_grid(grid_sel);
            if (fixed_mu_opt->count() > 0) {
                spec.fixed_mu = fixed_mu;
                spec.optimize_mu = false;
            }
            return cmd_sweep(config_path, out_path, spec);
        }
        if (table->parsed()) return cmd_table(table_n, table_s, table_out);
        if (check->parsed())
            return cmd_mc_check(check_config, check_out, check_mu, check_dist,
                                check_rounds, check_seed, check_streams,
                                check_ex);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
