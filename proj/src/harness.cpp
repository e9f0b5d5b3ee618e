#include "ermip/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "ermip/estimators.hpp"
#include "ermip/nets.hpp"
#include "ermip/rng.hpp"

namespace ermip {

SlopeFit fit_loglog_slope(const std::vector<std::pair<double, double>>& rows) {
    if (rows.size() < 3) throw DomainError("slope fit needs at least 3 rows");
    const auto m = static_cast<double>(rows.size());
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& [x, y] : rows) {
        if (!(x > 0.0) || !(y > 0.0)) throw DomainError("slope fit needs positive values");
        sx += std::log(x);
        sy += std::log(y);
    }
    const double mx = sx / m;
    const double my = sy / m;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : rows) {
        sxx += (std::log(x) - mx) * (std::log(x) - mx);
        sxy += (std::log(x) - mx) * (std::log(y) - my);
    }
    if (!(sxx > 0.0)) throw DomainError("slope fit needs at least two distinct x values");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (const auto& [x, y] : rows) {
        const double r = std::log(y) - fit.intercept - fit.slope * std::log(x);
        sse += r * r;
    }
    const double se = std::sqrt(sse / (m - 2.0) / sxx);
    const boost::math::students_t dist(m - 2.0);
    fit.ci95 = boost::math::quantile(dist, 0.975) * se;
    return fit;
}

std::vector<double> sweep_deltas(const ExperimentConfig& config, double n) {
    if (config.estimator == EstimatorKind::additive) {
        std::vector<double> out;
        for (const auto& c : config.components) {
            out.push_back(config.delta_rule == DeltaRule::fixed ? config.delta
                                                                : optimal_delta(n, c.spec.s, c.q, 1, config.kappa));
        }
        return out;
    }
    if (config.delta_rule == DeltaRule::fixed) return {config.delta};
    return {optimal_delta(n, config.ellipsoid.s, config.q, config.ellipsoid.d, config.kappa)};
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t rep, double n) {
    return mix_seed({base_seed, rep, std::bit_cast<std::uint64_t>(n)});
}

namespace {

std::vector<MultiIndex> with_support(std::vector<MultiIndex> active, const CoefVec& theta) {
    for (const auto& [j, v] : theta) {
        if (v != 0.0) active.push_back(j);
    }
    std::sort(active.begin(), active.end());
    active.erase(std::unique(active.begin(), active.end()), active.end());
    return active;
}

double sum(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
}

}  // namespace

SingleRun run_single(const ExperimentConfig& config, double n, std::uint64_t seed, NoiseMode noise) {
    const auto op = config.make_operator();
    const CoefVec truth = config.truth();
    const auto deltas = sweep_deltas(config, n);
    SingleRun run;
    run.delta = sum(deltas);

    EstimateReport est;
    if (config.estimator == EstimatorKind::additive) {
        const auto nets = additive_nets(config.dim(), config.components, deltas);
        std::vector<MultiIndex> active;
        for (const auto& net : nets) active.insert(active.end(), net.active.begin(), net.active.end());
        const auto obs = simulate_white_noise(op, truth, n, with_support(active, truth), seed, noise);
        est = additive_estimate(obs, config.components, deltas);
    } else {
        const auto net = build_net(config.ellipsoid, config.basis(), deltas.front());
        if (config.model == StatModel::density) {
            const auto sample = sample_density(op, truth, static_cast<std::size_t>(n), seed);
            est = delta_net_estimate(sample, op, net);
        } else {
            const auto obs = simulate_white_noise(op, truth, n, with_support(net.active, truth), seed, noise);
            est = config.estimator == EstimatorKind::dense ? dense_estimate(obs, config.ellipsoid)
                                                           : delta_net_estimate(obs, net);
        }
    }
    run.mise = mise(est.theta_hat, truth);
    run.risk = est.risk_value;
    run.theta_hat = std::move(est.theta_hat);
    return run;
}

DensityBounds density_sup_bounds(const EllipsoidSpec& spec, const DiagonalOperator& op, int grid_points, int cutoff) {
    if (spec.d != 1 || !(op.input_basis() == BasisId::fourier(1)) || op.kernel() || !op.axis_q().empty()) {
        throw DomainError("sup-norm bounds are implemented for the one-dimensional Fourier basis with the default rule");
    }
    const double q = op.kind() == OperatorKind::identity ? 0.0 : op.q();
    if (!(2.0 * (spec.s - q) > 1.0)) throw InfeasibleError("Q f is unbounded on the class: need s - q > 1/2");
    const auto indices = index_box(BasisId::fourier(1), cutoff);
    std::vector<double> wa(indices.size());
    std::vector<double> wq(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const double a = ell_coeff(spec, indices[i]);
        const double b = op.singular_value(indices[i]);
        wa[i] = b / a;
        wq[i] = 1.0 / (b * a);
    }
    double sa = 0.0;
    double sq = 0.0;
    for (int g = 0; g < grid_points; ++g) {
        const double x[1] = {(g + 0.5) / grid_points};
        double acc_a = 0.0;
        double acc_q = 0.0;
        for (std::size_t i = 0; i < indices.size(); ++i) {
            const double phi = basis_eval(BasisId::fourier(1), indices[i], x);
            acc_a += wa[i] * wa[i] * phi * phi;
            acc_q += wq[i] * wq[i] * phi * phi;
        }
        sa = std::max(sa, acc_a);
        sq = std::max(sq, acc_q);
    }
    // Each frequency t > cutoff contributes 2 (b_t / a_t)^2 (cos^2 + sin^2 = 1).
    const double c = static_cast<double>(cutoff);
    const double tail_a = 2.0 * std::pow(c, 1.0 - 2.0 * (q + spec.s)) / (2.0 * (q + spec.s) - 1.0);
    const double tail_q = 2.0 * std::pow(c, 1.0 + 2.0 * q - 2.0 * spec.s) / (2.0 * (spec.s - q) - 1.0);
    return {spec.L * std::sqrt(sa + tail_a), spec.L * std::sqrt(sq + tail_q)};
}

SweepResult run_mise_sweep(const ExperimentConfig& config, const SweepOptions& options) {
    if (config.n_grid.size() < 3) throw ConfigError("sweep.n_grid", "a sweep needs at least 3 sample sizes");
    const auto op = config.make_operator();
    const CoefVec truth = config.truth();

    SweepResult result;
    result.name = config.name;
    result.rng_algorithm = std::string(kRngAlgorithm);
    result.theory_slope = -config.theory_mise_exponent();
    result.slope_tolerance = config.slope_tolerance;

    if (config.model == StatModel::density) {
        result.density_bounds = density_sup_bounds(config.ellipsoid, op);
        result.C_tau_used = std::max(config.C_tau, density_min_C_tau(config.xi, *result.density_bounds));
        result.bound_kind = "theorem1_density";
        result.conditions_pass = std::isfinite(result.density_bounds->B_inf) &&
                                 std::isfinite(result.density_bounds->B_prime_inf);
    } else if (config.estimator == EstimatorKind::additive) {
        result.bound_kind = "theorem5";
    } else if (config.estimator == EstimatorKind::net) {
        result.bound_kind = "theorem1_white_noise";
        result.C_tau_used = config.C_tau;
    } else {
        result.bound_kind = "none";
    }

    // Per-row setup is serial; replications run under the policy.
    for (double n : config.n_grid) {
        SweepRow row;
        row.n = n;
        const auto deltas = sweep_deltas(config, n);
        row.delta = sum(deltas);
        if (config.estimator == EstimatorKind::additive) {
            std::vector<double> rhos;
            std::vector<double> lambdas;
            for (const auto& net : additive_nets(config.dim(), config.components, deltas)) {
                rhos.push_back(grid_op_norm(op, net));
                lambdas.push_back(net_log_cardinality(net));
            }
            row.rho = *std::max_element(rhos.begin(), rhos.end());
            row.log_card = sum(lambdas);
            row.bound = theorem5_bound(row.delta, rhos, lambdas, n, config.orthogonality_c);
        } else {
            const auto net = build_net(config.ellipsoid, config.basis(), row.delta);
            row.rho = grid_op_norm(op, net);
            row.log_card = net_log_cardinality(net);
            if (config.model == StatModel::density) {
                row.bound = theorem1_bound(row.delta, row.rho, row.log_card, n, config.xi, result.C_tau_used,
                                           StatModel::density, result.density_bounds);
                if (row.rho < 1.0) result.conditions_pass = false;
            } else if (config.estimator == EstimatorKind::net) {
                row.bound = theorem1_bound(row.delta, row.rho, row.log_card, n, config.xi, config.C_tau,
                                           StatModel::white_noise);
            } else {
                row.bound = std::numeric_limits<double>::quiet_NaN();
            }
        }
        row.mise.assign(static_cast<std::size_t>(config.replications), 0.0);
        result.rows.push_back(std::move(row));
    }

    const std::size_t reps = static_cast<std::size_t>(config.replications);
    const std::size_t total = result.rows.size() * reps;
    std::vector<std::string> errors(total);
    parallel_for(options.policy, total, [&](std::size_t flat) {
        auto& row = result.rows[flat / reps];
        const std::size_t rep = flat % reps;
        try {
            row.mise[rep] = run_single(config, row.n, replication_seed(config.base_seed, rep, row.n), options.noise).mise;
        } catch (const std::exception& e) {
            errors[flat] = fmt::format("n = {}, replication {}: {}", format_real(row.n), rep, e.what());
        }
    });
    for (const auto& e : errors) {
        if (!e.empty()) throw Error(e);
    }

    std::vector<std::pair<double, double>> points;
    result.bounds_pass = true;
    for (auto& row : result.rows) {
        const double m = static_cast<double>(reps);
        row.mise_mean = sum(row.mise) / m;
        double ss = 0.0;
        for (double v : row.mise) ss += (v - row.mise_mean) * (v - row.mise_mean);
        row.mise_stderr = reps > 1 ? std::sqrt(ss / (m - 1.0)) / std::sqrt(m) : 0.0;
        row.pass = std::isnan(row.bound) || row.mise_mean <= row.bound;
        result.bounds_pass = result.bounds_pass && row.pass;
        points.emplace_back(row.n, row.mise_mean);
    }
    result.fit = fit_loglog_slope(points);
    result.slope_pass = std::abs(result.fit.slope - result.theory_slope) <= result.slope_tolerance;
    return result;
}

// ---------------------------------------------------------------------------
// Scalings

ScalingReport verify_scalings(const ExperimentConfig& config, const std::vector<double>& delta_grid,
                              const ExecPolicy& policy) {
    if (config.estimator == EstimatorKind::additive) throw DomainError("scalings are defined for a single ellipsoid");
    if (delta_grid.size() < 4) throw DomainError("scalings need at least 4 delta values");
    const auto [lo, hi] = std::minmax_element(delta_grid.begin(), delta_grid.end());
    if (*hi < 10.0 * *lo * (1.0 - 1e-12)) throw DomainError("the delta grid must span at least one decade");

    const auto op = config.make_operator();
    const auto basis = config.basis();
    const auto& spec = config.ellipsoid;
    ScalingReport report;
    std::vector<std::pair<double, double>> card;
    std::vector<std::pair<double, double>> rho;
    std::vector<std::pair<double, double>> rho_k;
    std::vector<std::pair<double, double>> packing;
    for (double delta : delta_grid) {
        ScalingPoint p;
        p.delta = delta;
        const auto net = build_net(spec, basis, delta);
        p.log_card = net_log_cardinality(net);
        p.rho = grid_op_norm(op, net);
        card.emplace_back(delta, p.log_card);
        rho.emplace_back(delta, p.rho);
        try {
            const auto pk = build_packing(spec, basis, delta, config.packing_seed);
            p.packing_shell = pk.shell_size();
            if (pk.codebook.size() < 2) throw InfeasibleError("packing has a single point");
            p.packing_log_count = std::log(static_cast<double>(pk.codebook.size()));
            p.rho_K = rho_K(op, pk.points(), StatModel::white_noise, policy);
            rho_k.emplace_back(delta, p.rho_K);
            packing.emplace_back(delta, p.packing_log_count);
        } catch (const Error& e) {
            p.error = e.what();
        }
        report.points.push_back(std::move(p));
    }
    report.expected_card = -spec.d / spec.s;
    report.expected_rho = -config.q / spec.s;
    report.expected_rho_K = config.q / spec.s;
    report.card_fit = fit_loglog_slope(card);
    report.rho_fit = fit_loglog_slope(rho);
    report.card_pass = std::abs(report.card_fit.slope - report.expected_card) <= 0.25;
    report.rho_pass = std::abs(report.rho_fit.slope - report.expected_rho) <= 0.1;
    if (rho_k.size() >= 3) {
        report.rho_K_fit = fit_loglog_slope(rho_k);
        report.packing_fit = fit_loglog_slope(packing);
        report.rho_K_pass = std::abs(report.rho_K_fit.slope - report.expected_rho_K) <= 0.1;
    }
    const double a = config.q / spec.s;
    const double b = spec.d / spec.s;
    report.upper_exponent = rate_exponent_net(a, b);
    report.lower_exponent = rate_exponent_lower(a, b);
    report.measured_upper_exponent = rate_exponent_net(std::max(0.0, -report.rho_fit.slope), -report.card_fit.slope);
    if (report.rho_K_pass && report.packing_fit.slope < 0.0) {
        report.measured_lower_exponent =
            rate_exponent_lower(std::max(0.0, report.rho_K_fit.slope), -report.packing_fit.slope);
    }
    report.exponents_match = std::abs(report.upper_exponent - report.lower_exponent) <= 1e-15;
    return report;
}

// ---------------------------------------------------------------------------
// Output

std::string format_real(double x) { return fmt::format("{:.17g}", x); }

std::string sweep_raw_csv(const SweepResult& result) {
    std::string out = "n,replication,delta,mise\n";
    for (const auto& row : result.rows) {
        for (std::size_t r = 0; r < row.mise.size(); ++r) {
            out += fmt::format("{},{},{},{}\n", format_real(row.n), r, format_real(row.delta), format_real(row.mise[r]));
        }
    }
    return out;
}

std::string sweep_aggregate_csv(const SweepResult& result) {
    std::string out = "n,mise_mean,mise_stderr,delta,bound,pass\n";
    for (const auto& row : result.rows) {
        out += fmt::format("{},{},{},{},{},{}\n", format_real(row.n), format_real(row.mise_mean),
                           format_real(row.mise_stderr), format_real(row.delta), format_real(row.bound),
                           row.pass ? 1 : 0);
    }
    return out;
}

std::string sweep_report_text(const SweepResult& result) {
    std::string out;
    out += fmt::format("experiment = {}\n", result.name);
    out += fmt::format("rng = {}\n", result.rng_algorithm);
    out += fmt::format("bound = {}\n", result.bound_kind);
    if (result.density_bounds) {
        out += fmt::format("B_inf = {}\n", format_real(result.density_bounds->B_inf));
        out += fmt::format("B_prime_inf = {}\n", format_real(result.density_bounds->B_prime_inf));
    }
    if (result.C_tau_used > 0.0) out += fmt::format("C_tau = {}\n", format_real(result.C_tau_used));
    for (const auto& row : result.rows) {
        out += fmt::format("row n = {} delta = {} log_card = {} rho = {} mise_mean = {} mise_stderr = {} bound = {} pass = {}\n",
                           format_real(row.n), format_real(row.delta), format_real(row.log_card), format_real(row.rho),
                           format_real(row.mise_mean), format_real(row.mise_stderr), format_real(row.bound),
                           row.pass);
    }
    out += fmt::format("slope = {}\n", format_real(result.fit.slope));
    out += fmt::format("slope_ci95 = {}\n", format_real(result.fit.ci95));
    out += fmt::format("theory_slope = {}\n", format_real(result.theory_slope));
    out += fmt::format("slope_tolerance = {}\n", format_real(result.slope_tolerance));
    out += fmt::format("slope_pass = {}\n", result.slope_pass);
    out += fmt::format("bounds_pass = {}\n", result.bounds_pass);
    out += fmt::format("conditions_pass = {}\n", result.conditions_pass);
    out += fmt::format("pass = {}\n", result.pass());
    return out;
}

std::string scaling_report_text(const ScalingReport& r) {
    std::string out;
    for (const auto& p : r.points) {
        out += fmt::format("point delta = {} log_card = {} rho = {} rho_K = {} packing_log_count = {} shell = {}{}\n",
                           format_real(p.delta), format_real(p.log_card), format_real(p.rho), format_real(p.rho_K),
                           format_real(p.packing_log_count), p.packing_shell,
                           p.error.empty() ? "" : " error = " + p.error);
    }
    out += fmt::format("log_card_slope = {} expected = {} pass = {}\n", format_real(r.card_fit.slope),
                       format_real(r.expected_card), r.card_pass);
    out += fmt::format("rho_slope = {} expected = {} pass = {}\n", format_real(r.rho_fit.slope),
                       format_real(r.expected_rho), r.rho_pass);
    out += fmt::format("rho_K_slope = {} expected = {} pass = {}\n", format_real(r.rho_K_fit.slope),
                       format_real(r.expected_rho_K), r.rho_K_pass);
    out += fmt::format("packing_log_count_slope = {}\n", format_real(r.packing_fit.slope));
    out += fmt::format("upper_exponent = {}\n", format_real(r.upper_exponent));
    out += fmt::format("lower_exponent = {}\n", format_real(r.lower_exponent));
    out += fmt::format("measured_upper_exponent = {}\n", format_real(r.measured_upper_exponent));
    out += fmt::format("measured_lower_exponent = {}\n", format_real(r.measured_lower_exponent));
    out += fmt::format("exponents_match = {}\n", r.exponents_match);
    out += fmt::format("pass = {}\n", r.pass());
    return out;
}

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir, bool force) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const std::pair<const char*, std::string> files[] = {
        {"raw.csv", sweep_raw_csv(result)},
        {"aggregate.csv", sweep_aggregate_csv(result)},
        {"report.txt", sweep_report_text(result)},
    };
    if (!force) {
        for (const auto& [name, body] : files) {
            if (fs::exists(dir / name)) throw Error((dir / name).string() + " exists; pass --force to overwrite");
        }
    }
    for (const auto& [name, body] : files) {
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + (dir / name).string());
        out << body;
    }
}

}  // namespace ermip
