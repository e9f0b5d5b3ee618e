// One line per acceptance criterion; exit status 0 iff all of them pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "ermip/harness.hpp"
#include "ermip/oracles.hpp"
#include "ermip/rates.hpp"

using namespace ermip;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig config(const char* name) { return load_config(std::filesystem::path(ERMIP_CONFIG_DIR) / name); }

const ExecPolicy kPolicy = ExecPolicy::openmp();

// Sweeps are shared between the rate criteria and the bound criterion.
std::map<std::string, SweepResult> g_sweeps;
std::map<std::string, double> g_sweep_seconds;

const SweepResult& sweep(const char* name) {
    auto it = g_sweeps.find(name);
    if (it == g_sweeps.end()) {
        const auto t0 = std::chrono::steady_clock::now();
        it = g_sweeps.emplace(name, run_mise_sweep(config(name), {kPolicy})).first;
        g_sweep_seconds[name] = seconds_since(t0);
    }
    return it->second;
}

const CheckResult& suite_check(const SuiteReport& report, const std::string& name) {
    for (const auto& c : report.checks)
        if (c.name == name) return c;
    throw Error("suite has no check named " + name);
}

Outcome rate_outcome(const char* name, std::size_t min_reps, double tolerance, double expected_slope) {
    const auto& r = sweep(name);
    std::size_t reps = r.rows.empty() ? 0 : r.rows.front().mise.size();
    const bool setup = reps >= min_reps && std::abs(r.slope_tolerance - tolerance) < 1e-12 &&
                       std::abs(r.theory_slope - expected_slope) < 1e-12;
    const bool pass = setup && std::abs(r.fit.slope - expected_slope) <= tolerance;
    return {pass, fmt::format("slope {:.4f} (ci95 +-{:.4f}), target {:.4f} +- {}, {} rows x {} reps, {:.1f} s", r.fit.slope,
                              r.fit.ci95, expected_slope, tolerance, r.rows.size(), reps, g_sweep_seconds[name])};
}

Outcome criterion_radon() {
    const auto t0 = std::chrono::steady_clock::now();
    RadonOracleOptions options;  // j + k <= 6, 8 x 8 test points
    const auto result = radon_svd_oracle(options, {}, kPolicy);
    const double secs = seconds_since(t0);
    const bool enough = options.max_total >= 6 && options.u_points * options.phi_points >= 50;
    return {enough && result.max_error <= 1e-6 && secs < 60.0,
            fmt::format("max error {:.3e} over {} evaluations, {:.2f} s", result.max_error, result.checks, secs)};
}

Outcome criterion_convolution() {
    ConvolutionOracleOptions options;  // |j| <= 8
    const double default_rule = convolution_oracle(DiagonalOperator::convolution(1, 1.0), options, kPolicy).max_error;
    CoefVec kernel;
    for (int j = 0; j <= 8; ++j) kernel.set(MultiIndex::with_parity({j}, {0}), std::pow(0.6, j));
    const double explicit_kernel =
        convolution_oracle(DiagonalOperator::convolution_kernel(1, kernel), options, kPolicy).max_error;
    return {options.max_index >= 8 && default_rule <= 1e-8 && explicit_kernel <= 1e-8,
            fmt::format("max error {:.3e} (b_j = j^-1), {:.3e} (kernel 0.6^j)", default_rule, explicit_kernel)};
}

Outcome criterion_lemma1(const SuiteReport& suite) {
    const auto& c = suite_check(suite, "lemma1_identity");
    return {c.pass && c.max_residual < 1e-10, fmt::format("max residual {:.3e}, {}", c.max_residual, c.detail)};
}

Outcome criterion_cover_pack(const SuiteReport& suite) {
    const auto& cover = suite_check(suite, "covering");
    const auto& pack = suite_check(suite, "packing");
    return {cover.pass && pack.pass,
            fmt::format("covering ratio {:.4f} ({}); packing ratio {:.12f}", cover.max_residual, cover.detail,
                        pack.max_residual)};
}

Outcome criterion_estimators(const SuiteReport& suite) {
    const auto& argmin = suite_check(suite, "grid_argmin_exact");
    const auto& kkt = suite_check(suite, "dense_kkt");
    const auto& beats = suite_check(suite, "dense_beats_random_feasible");
    return {argmin.pass && kkt.pass && beats.pass,
            fmt::format("grid mismatches {} ({}); KKT residual {:.3e}; random feasible points beating dense {}",
                        argmin.max_residual, argmin.detail, kkt.max_residual, beats.max_residual)};
}

Outcome criterion_theorem1_bounds() {
    const auto c = theorem1_constants(0.48, 9.0, StatModel::white_noise);
    bool pass = std::abs(c.C1 - 49.0) < 1e-9 && std::abs(c.C2 - 108.0) < 1e-9;
    std::size_t rows = 0;
    double worst = 0.0;
    for (const char* name : {"direct.ini", "deconvolution.ini", "radon.ini"}) {
        const auto cfg = config(name);
        pass = pass && cfg.xi == 0.48 && cfg.C_tau == 9.0;
        const auto& r = sweep(name);
        pass = pass && r.bound_kind == "theorem1_white_noise" && r.bounds_pass;
        for (const auto& row : r.rows) {
            pass = pass && row.pass && row.mise_mean <= row.bound;
            worst = std::max(worst, row.mise_mean / row.bound);
            ++rows;
        }
    }
    return {pass, fmt::format("C1 = {}, C2 = {}; {} rows, max MISE/bound = {:.3e}", c.C1, c.C2, rows, worst)};
}

Outcome criterion_additive() {
    auto out = rate_outcome("additive.ini", 100, 0.12, -4.0 / 7.0);
    const auto& r = sweep("additive.ini");
    const auto cfg = config("additive.ini");
    double worst = 0.0;
    bool bounds = r.bound_kind == "theorem5" && cfg.orthogonality_c == 1.0;
    for (const auto& row : r.rows) {
        bounds = bounds && row.pass && row.mise_mean <= row.bound;
        worst = std::max(worst, row.mise_mean / row.bound);
    }
    out.pass = out.pass && bounds;
    out.detail += fmt::format("; c = 1 bound on every row: {} (max MISE/bound {:.3e})", bounds ? "yes" : "no", worst);
    return out;
}

Outcome criterion_scalings() {
    bool pass = true;
    std::string detail;
    for (const char* name : {"scalings_convolution.ini", "scalings_radon.ini"}) {
        const auto cfg = config(name);
        const auto r = verify_scalings(cfg, cfg.delta_grid, kPolicy);
        pass = pass && r.pass();
        detail += fmt::format("{}: card {:.3f}/{:.3f} rho {:.3f}/{:.3f} rho_K {:.3f}/{:.3f}; ", cfg.name, r.card_fit.slope,
                              r.expected_card, r.rho_fit.slope, r.expected_rho, r.rho_K_fit.slope, r.expected_rho_K);
    }
    // Upper (rate equation) and lower (packing equation) exponents for every example config.
    std::size_t matched = 0, total = 0;
    for (const char* name : {"direct.ini", "deconvolution.ini", "radon.ini", "additive.ini", "density.ini"}) {
        const auto cfg = config(name);
        std::vector<std::pair<double, double>> ab;
        if (cfg.estimator == EstimatorKind::additive) {
            for (const auto& c : cfg.components) ab.emplace_back(c.q / c.spec.s, 1.0 / c.spec.s);
        } else {
            const double q = cfg.operator_kind == OperatorKind::radon2d ? 0.5 : cfg.q;
            ab.emplace_back(q / cfg.ellipsoid.s, cfg.ellipsoid.d / cfg.ellipsoid.s);
        }
        for (const auto& [a, b] : ab) {
            ++total;
            if (std::abs(rate_exponent_net(a, b) - rate_exponent_lower(a, b)) < 1e-15) ++matched;
        }
    }
    pass = pass && matched == total;
    detail += fmt::format("upper = lower exponent for {}/{} example operators", matched, total);
    return {pass, detail};
}

Outcome criterion_density() {
    auto out = rate_outcome("density.ini", 50, 0.15, -4.0 / 7.0);
    const auto& r = sweep("density.ini");
    const auto cfg = config("density.ini");
    const bool setup = cfg.model == StatModel::density && cfg.ellipsoid.d == 1 && cfg.ellipsoid.s == 2.0 &&
                       cfg.q == 1.0 && r.rows.size() == 6 && r.rows.front().n == 1024.0 && r.rows.back().n == 32768.0;
    // Strict positivity of the truth's image on a fine grid.
    const auto af = density_on_grid(cfg.make_operator(), cfg.truth(), 4096);
    const double min_af = *std::min_element(af.begin(), af.end());
    out.pass = out.pass && setup && r.conditions_pass && min_af > 0.0;
    if (r.density_bounds) {
        out.detail += fmt::format("; B = {:.4f}, B' = {:.4f}, C_tau = {:.4f}, xi = {}, min Af = {:.4f}, conditions {}",
                                  r.density_bounds->B_inf, r.density_bounds->B_prime_inf, r.C_tau_used, cfg.xi, min_af,
                                  r.conditions_pass ? "hold" : "FAIL");
    }
    return out;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };

    SuiteReport suite;
    bool suite_ready = false;
    const auto full_suite = [&]() -> const SuiteReport& {
        if (!suite_ready) {
            suite = run_verification_suite(SuiteLevel::full, kPolicy);
            suite_ready = true;
        }
        return suite;
    };

    const std::vector<Criterion> criteria = {
        {1, "radon_svd_oracle", criterion_radon},
        {2, "convolution_svd_oracle", criterion_convolution},
        {3, "excess_risk_identity", [&] { return criterion_lemma1(full_suite()); }},
        {4, "covering_and_packing", [&] { return criterion_cover_pack(full_suite()); }},
        {5, "estimator_exactness", [&] { return criterion_estimators(full_suite()); }},
        {6, "rate_direct", [] { return rate_outcome("direct.ini", 100, 0.12, -0.8); }},
        {7, "rate_deconvolution", [] { return rate_outcome("deconvolution.ini", 100, 0.12, -4.0 / 7.0); }},
        {8, "rate_radon", [] { return rate_outcome("radon.ini", 50, 0.15, -4.0 / 7.0); }},
        {9, "rate_additive", criterion_additive},
        {10, "risk_bound_domination", criterion_theorem1_bounds},
        {11, "scaling_laws", criterion_scalings},
        {12, "density_model", criterion_density},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        if (!o.pass) ++failures;
        fmt::print("[{}] criterion {:>2} {}: {}\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
