// Command-line front end: rate calculators, sweeps, scalings, packings and
// the verification suite.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ermip/harness.hpp"
#include "ermip/nets.hpp"
#include "ermip/rates.hpp"
#include "ermip/rng.hpp"

namespace {

using namespace ermip;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

std::vector<std::pair<double, double>> parse_additive(const std::string& text) {
    std::vector<std::pair<double, double>> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string token = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const auto colon = token.find(':');
        if (colon == std::string::npos) throw ConfigError("--additive", "expected s:q pairs, got '" + token + "'");
        try {
            out.emplace_back(std::stod(token.substr(0, colon)), std::stod(token.substr(colon + 1)));
        } catch (const std::logic_error&) {
            throw ConfigError("--additive", "expected s:q pairs, got '" + token + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

ExecPolicy policy_for(int jobs) {
    if (jobs == 1) return ExecPolicy::serial();
    return ExecPolicy::openmp(jobs > 0 ? jobs : hardware_jobs());
}

int cmd_rates(const std::optional<double>& s, const std::optional<double>& q, const std::optional<int>& d,
              const std::optional<std::string>& additive) {
    if (additive) {
        const auto comps = parse_additive(*additive);
        fmt::print("mise_exponent = {}\n", rate_additive(comps));
        fmt::print("psi_exponent = {}\n", rate_additive(comps) / 2.0);
        for (std::size_t k = 0; k < comps.size(); ++k) {
            fmt::print("component_{}_mise_exponent = {}\n", k + 1, rate_convolution(comps[k].first, comps[k].second, 1));
        }
        return 0;
    }
    if (!s) throw ConfigError("--s", "required unless --additive is given");
    const double qq = q.value_or(0.0);
    const int dd = d.value_or(1);
    const double a = qq / *s;
    const double b = dd / *s;
    fmt::print("mise_exponent = {}\n", rate_convolution(*s, qq, dd));
    fmt::print("psi_exponent = {}\n", rate_exponent_net(a, b));
    fmt::print("lower_psi_exponent = {}\n", rate_exponent_lower(a, b));
    fmt::print("a = {}\n", a);
    fmt::print("b = {}\n", b);
    fmt::print("dense_eligible = {}\n", a + b / 2.0 < 1.0);
    return 0;
}

double first_n(const ExperimentConfig& cfg, const std::optional<double>& n) {
    if (n) return *n;
    if (cfg.n_grid.empty()) throw ConfigError("sweep.n_grid", "needed when --n is not given");
    return cfg.n_grid.front();
}

int cmd_estimate(const ExperimentConfig& cfg, std::uint64_t seed, const std::optional<double>& n_flag) {
    const double n = first_n(cfg, n_flag);
    const auto run = run_single(cfg, n, seed);
    fmt::print("experiment = {}\n", cfg.name);
    fmt::print("n = {}\n", format_real(n));
    fmt::print("seed = {}\n", seed);
    fmt::print("delta = {}\n", format_real(run.delta));
    fmt::print("mise = {}\n", format_real(run.mise));
    fmt::print("risk = {}\n", format_real(run.risk));
    return 0;
}

int cmd_simulate(const ExperimentConfig& cfg, std::uint64_t seed, const std::optional<double>& n_flag) {
    const double n = first_n(cfg, n_flag);
    const auto op = cfg.make_operator();
    const auto truth = cfg.truth();
    fmt::print("# rng = {}\n", kRngAlgorithm);
    if (cfg.model == StatModel::density) {
        const auto sample = sample_density(op, truth, static_cast<std::size_t>(n), seed);
        fmt::print("point\n");
        for (const auto& p : sample.points) {
            std::string line;
            for (std::size_t i = 0; i < p.size(); ++i) line += (i ? " " : "") + format_real(p[i]);
            fmt::print("{}\n", line);
        }
        return 0;
    }
    std::vector<MultiIndex> active;
    if (cfg.estimator == EstimatorKind::additive) {
        for (const auto& net : additive_nets(cfg.dim(), cfg.components, sweep_deltas(cfg, n))) {
            active.insert(active.end(), net.active.begin(), net.active.end());
        }
    } else {
        active = build_net(cfg.ellipsoid, cfg.basis(), sweep_deltas(cfg, n).front()).active;
    }
    for (const auto& [j, v] : truth) active.push_back(j);
    const auto obs = simulate_white_noise(op, truth, n, active, seed);
    fmt::print("index,theta,y\n");
    for (const auto& j : obs.active) {
        fmt::print("\"{}\",{},{}\n", j.to_string(), format_real(obs.theta_true.get(j)), format_real(obs.y.get(j)));
    }
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& out, bool force, int jobs) {
    SweepOptions options;
    options.policy = policy_for(jobs);
    const auto result = run_mise_sweep(cfg, options);
    write_sweep_outputs(result, out, force);
    std::cout << sweep_report_text(result);
    return result.pass() ? 0 : kExitFail;
}

int cmd_scalings(const ExperimentConfig& cfg, int jobs) {
    if (cfg.delta_grid.empty()) throw ConfigError("scalings.delta_grid", "missing required key");
    const auto report = verify_scalings(cfg, cfg.delta_grid, policy_for(jobs));
    std::cout << scaling_report_text(report);
    return report.pass() ? 0 : kExitFail;
}

int cmd_packing(const ExperimentConfig& cfg, double delta, std::uint64_t seed, int jobs) {
    if (cfg.estimator == EstimatorKind::additive) throw ConfigError("experiment.estimator", "packings need a single ellipsoid");
    const auto packing = build_packing(cfg.ellipsoid, cfg.basis(), delta, seed);
    fmt::print("delta = {}\n", format_real(delta));
    fmt::print("M = {}\n", packing.M);
    fmt::print("shell_size = {}\n", packing.shell_size());
    fmt::print("gamma = {}\n", format_real(packing.gamma));
    fmt::print("min_hamming = {}\n", packing.min_hamming);
    fmt::print("count = {}\n", packing.codebook.size());
    if (packing.codebook.size() < 2) {
        fmt::print("pass = false\n");
        return kExitFail;
    }
    const auto check = verify_packing(packing, policy_for(jobs));
    bool inside = true;
    for (const auto& p : packing.points()) inside = inside && in_ellipsoid(cfg.ellipsoid, p);
    const bool pass = check.min_dist >= delta * (1.0 - 1e-12) && check.max_dist <= 2.0 * delta * (1.0 + 1e-12) && inside;
    fmt::print("min_dist = {}\n", format_real(check.min_dist));
    fmt::print("max_dist = {}\n", format_real(check.max_dist));
    fmt::print("inside_ellipsoid = {}\n", inside);
    fmt::print("pass = {}\n", pass);
    return pass ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Empirical risk minimization for linear inverse problems"};
    app.require_subcommand(1, 1);
    int jobs = 0;
    std::uint64_t seed = 1;
    app.add_option("--jobs", jobs, "Worker threads (default: all logical cores)")->check(CLI::NonNegativeNumber);

    std::optional<double> s;
    std::optional<double> q;
    std::optional<int> d;
    std::optional<std::string> additive;
    auto* rates = app.add_subcommand("rates", "Print rate exponents");
    rates->add_option("--s", s, "Smoothness");
    rates->add_option("--q", q, "Degree of ill-posedness");
    rates->add_option("--d", d, "Dimension");
    rates->add_option("--additive", additive, "Additive components as s1:q1,s2:q2");

    std::string config_path;
    std::optional<double> n;
    auto* simulate = app.add_subcommand("simulate", "Simulate one observation and print it");
    simulate->add_option("--config", config_path)->required();
    simulate->add_option("--seed", seed);
    simulate->add_option("--n", n, "Sample size (default: first grid value)");

    auto* estimate = app.add_subcommand("estimate", "Simulate and estimate once; print MISE and risk");
    estimate->add_option("--config", config_path)->required();
    estimate->add_option("--seed", seed);
    estimate->add_option("--n", n, "Sample size (default: first grid value)");

    std::string out;
    bool force = false;
    auto* sweep = app.add_subcommand("sweep", "Run a MISE sweep and write CSV files");
    sweep->add_option("--config", config_path)->required();
    sweep->add_option("--out", out)->required();
    sweep->add_flag("--force", force, "Overwrite existing output files");
    sweep->add_option("--jobs", jobs);

    bool full = false;
    auto* verify = app.add_subcommand("verify", "Run the oracle verification suite");
    verify->add_flag("--full", full);
    verify->add_option("--seed", seed);
    verify->add_option("--jobs", jobs);

    auto* scalings = app.add_subcommand("scalings", "Check entropy and operator-norm scalings");
    scalings->add_option("--config", config_path)->required();
    scalings->add_option("--jobs", jobs);

    double delta = 0.0;
    auto* packing = app.add_subcommand("packing", "Build and verify a packing set");
    packing->add_option("--config", config_path)->required();
    packing->add_option("--delta", delta)->required();
    packing->add_option("--seed", seed);
    packing->add_option("--jobs", jobs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitUsage;
    }

    try {
        if (*rates) return cmd_rates(s, q, d, additive);
        if (*verify) {
            const auto report = run_verification_suite(full ? SuiteLevel::full : SuiteLevel::fast, policy_for(jobs), seed);
            std::cout << report.to_text();
            return report.pass() ? 0 : kExitFail;
        }
        const auto cfg = load_config(config_path);
        if (*simulate) return cmd_simulate(cfg, seed, n);
        if (*estimate) return cmd_estimate(cfg, seed, n);
        if (*sweep) return cmd_sweep(cfg, out, force, jobs);
        if (*scalings) return cmd_scalings(cfg, jobs);
        if (*packing) return cmd_packing(cfg, delta, seed, jobs);
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error [{}]: {}\n", e.key(), e.what());
        return kExitFail;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitFail;
    }
    return kExitUsage;
}
