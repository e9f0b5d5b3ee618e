#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ermip/estimators.hpp"
#include "ermip/harness.hpp"
#include "ermip/nets.hpp"
#include "ermip/oracles.hpp"
#include "ermip/rng.hpp"

namespace ermip {

namespace {

CheckResult below(std::string name, double residual, double tolerance, std::string detail = {}) {
    return {std::move(name), residual, tolerance, residual <= tolerance, std::move(detail)};
}

CoefVec random_coefs(const std::vector<MultiIndex>& support, CounterRng& rng, double scale) {
    CoefVec c;
    for (const auto& j : support) c.set(j, scale * rng.normal());
    return c;
}

// Random point of the ellipsoid restricted to `support`.
CoefVec random_feasible(const EllipsoidSpec& spec, const std::vector<MultiIndex>& support, CounterRng& rng) {
    CoefVec c = random_coefs(support, rng, 1.0);
    const double w = std::sqrt(ell_weighted_norm_sq(spec, c));
    const double radius = spec.L * std::pow(rng.uniform(), 1.0 / static_cast<double>(support.size()));
    c *= radius / w;
    return c;
}

// Brute-force grid argmin with ties broken toward the smaller l1 norm.
CoefVec brute_force_argmin(const WhiteNoiseObs& obs, const std::vector<CoefVec>& points) {
    double best = std::numeric_limits<double>::infinity();
    double best_l1 = std::numeric_limits<double>::infinity();
    const CoefVec* arg = nullptr;
    for (const auto& p : points) {
        const double g = empirical_risk(obs, p);
        double l1 = 0.0;
        for (const auto& [j, v] : p) l1 += std::abs(v);
        if (g < best || (g == best && l1 < best_l1)) {
            best = g;
            best_l1 = l1;
            arg = &p;
        }
    }
    return *arg;
}

}  // namespace

bool SuiteReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

std::string SuiteReport::to_text() const {
    std::string out;
    for (const auto& c : checks) {
        out += fmt::format("check = {} max_residual = {} tolerance = {} status = {}{}\n", c.name,
                           format_real(c.max_residual), format_real(c.tolerance), c.pass ? "pass" : "FAIL",
                           c.detail.empty() ? "" : " detail = " + c.detail);
    }
    out += fmt::format("overall = {}\n", pass() ? "pass" : "FAIL");
    return out;
}

SuiteReport run_verification_suite(SuiteLevel level, const ExecPolicy& policy, std::uint64_t seed) {
    const bool full = level == SuiteLevel::full;
    SuiteReport report;
    auto& checks = report.checks;

    // Orthonormality of every basis (midpoint rules are exact for these trig degrees).
    checks.push_back(below("gram_fourier_d1", gram_orthonormality(BasisId::fourier(1), 6, 512, policy).max_error, 1e-8));
    checks.push_back(
        below("gram_fourier_d2", gram_orthonormality(BasisId::fourier(2), 6, full ? 256 : 64, policy).max_error, 1e-8));
    checks.push_back(below("gram_zernike", gram_orthonormality(BasisId::zernike(), 6, 64, policy).max_error, 1e-8));
    checks.push_back(
        below("gram_radon_output", gram_orthonormality(BasisId::chebyshev_halfplane(), 6, 64, policy).max_error, 1e-8));

    // Closed-form SVDs against quadrature.
    RadonOracleOptions radon;
    if (full) {
        radon.u_points = 12;
        radon.phi_points = 12;
    }
    checks.push_back(below("radon_svd", radon_svd_oracle(radon, {}, policy).max_error, 1e-6));
    {
        const auto op = DiagonalOperator::radon2d();
        const MultiIndex b00{0, 0};
        const auto mutated = [&](const MultiIndex& j) {
            return op.singular_value(j) * (j == b00 ? 1.0 + 1e-3 : 1.0);
        };
        const double err = radon_svd_oracle(radon, mutated, policy).max_error;
        checks.push_back({"radon_svd_detects_b00_mutation", err, 1e-6, err > 1e-6, "residual must exceed tolerance"});
    }
    checks.push_back(
        below("convolution_svd_q1", convolution_oracle(DiagonalOperator::convolution(1, 1.0), {}, policy).max_error, 1e-8));
    {
        CoefVec kernel;
        for (int j = 0; j <= 8; ++j) kernel.set(MultiIndex::with_parity({j}, {0}), std::pow(0.6, j));
        checks.push_back(below("convolution_svd_kernel",
                               convolution_oracle(DiagonalOperator::convolution_kernel(1, kernel), {}, policy).max_error,
                               1e-8));
    }

    // Excess-risk decomposition on random white-noise instances.
    {
        double worst = 0.0;
        const EllipsoidSpec spec{1, 2.0, 1.0};
        const auto op = DiagonalOperator::convolution(1, 1.0);
        for (std::uint64_t t = 0; t < 100; ++t) {
            CounterRng rng(mix_seed({seed, 0x4c31ULL, t}));
            const auto net = build_net(spec, BasisId::fourier(1), 0.05 + 0.3 * rng.uniform());
            const CoefVec f = random_feasible(spec, net.active, rng);
            const auto obs = simulate_white_noise(op, f, 50.0 + 1e4 * rng.uniform(), net.active, mix_seed({seed, t}));
            const CoefVec f0 = quantize(net, random_feasible(spec, net.active, rng));
            const CoefVec fhat = delta_net_estimate(obs, net).theta_hat;
            const double lhs = mise(fhat, f) - empirical_risk(obs, fhat) + empirical_risk(obs, f0) - mise(f0, f);
            const double rhs = 2.0 * nu_n(obs, fhat - f0);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        checks.push_back(below("lemma1_identity", worst, 1e-10, "100 instances"));
    }

    // Covering by sampling, packing by brute force.
    {
        const std::size_t trials = full ? 10000 : 1000;
        const std::vector<std::pair<EllipsoidSpec, double>> cases = {
            {{1, 2.0, 1.0}, 0.2},  {{1, 1.0, 1.0}, 0.1},  {{1, 3.0, 2.0}, 0.05},
            {{2, 2.0, 1.0}, 0.3},  {{2, 3.0, 1.0}, 0.15}, {{1, 1.5, 0.5}, 0.08},
        };
        double worst = 0.0;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const auto& [spec, delta] = cases[i];
            const auto net = build_net(spec, BasisId::fourier(spec.d), delta);
            worst = std::max(worst, verify_covering(net, trials, mix_seed({seed, 0x636f76ULL, i}), policy) / delta);
        }
        checks.push_back(below("covering", worst, 1.0, fmt::format("max distance / delta over {} trials x 6 configs", trials)));
    }
    {
        const std::vector<std::tuple<EllipsoidSpec, BasisId, double>> cases = {
            {{1, 2.0, 1.0}, BasisId::fourier(1), 0.05},
            {{1, 1.0, 1.0}, BasisId::fourier(1), 0.1},
            {{2, 2.0, 1.0}, BasisId::fourier(2), 0.05},
            {{2, 2.0, 1.0}, BasisId::zernike(), 0.02},
        };
        double worst = 0.0;
        for (std::size_t i = 0; i < cases.size(); ++i) {
            const auto& [spec, basis, delta] = cases[i];
            const auto packing = build_packing(spec, basis, delta, mix_seed({seed, 0x70616bULL, i}));
            if (packing.codebook.size() < 2) {
                worst = std::numeric_limits<double>::infinity();
                continue;
            }
            const auto check = verify_packing(packing, policy);
            worst = std::max({worst, delta / check.min_dist, check.max_dist / (2.0 * delta)});
            for (const auto& p : packing.points()) {
                if (!in_ellipsoid(spec, p)) worst = std::numeric_limits<double>::infinity();
            }
        }
        checks.push_back(below("packing", worst, 1.0 + 1e-12, "max of delta/min_dist and max_dist/(2 delta)"));
    }

    // Grid argmin against brute force on enumerable nets.
    {
        std::size_t mismatches = 0;
        std::size_t instances = 0;
        const auto op = DiagonalOperator::identity(BasisId::fourier(1));
        const std::vector<NetSpec> nets = {
            NetSpec::manual({1, 1.0, 1.0}, BasisId::fourier(1), 1, 0.5),
            NetSpec::manual({1, 2.0, 1.0}, BasisId::fourier(1), 1, 0.3),
            build_net({1, 2.0, 1.0}, BasisId::fourier(1), 0.6),
        };
        for (std::size_t k = 0; k < nets.size(); ++k) {
            const auto points = enumerate_net(nets[k], 100000);
            for (std::uint64_t t = 0; t < (full ? 50U : 10U); ++t) {
                CounterRng rng(mix_seed({seed, 0x6172ULL, k, t}));
                const CoefVec theta = random_coefs(nets[k].active, rng, 0.4);
                const auto obs = simulate_white_noise(op, theta, 4.0, nets[k].active, mix_seed({seed, k, t}));
                const CoefVec fast = delta_net_estimate(obs, nets[k]).theta_hat;
                if (!fast.same_sequence(brute_force_argmin(obs, points))) ++mismatches;
                ++instances;
            }
        }
        checks.push_back(below("grid_argmin_exact", static_cast<double>(mismatches), 0.0,
                               fmt::format("{} instances", instances)));
    }

    // Dense minimizer: KKT residual and random feasible competitors.
    {
        double worst_kkt = 0.0;
        std::size_t beaten = 0;
        const EllipsoidSpec spec{1, 2.0, 1.0};
        const auto op = DiagonalOperator::convolution(1, 1.0);
        const auto active = index_box(BasisId::fourier(1), 6);
        for (std::uint64_t t = 0; t < (full ? 20U : 5U); ++t) {
            CounterRng rng(mix_seed({seed, 0x6b6b74ULL, t}));
            const CoefVec theta = random_feasible(spec, active, rng);
            const auto obs = simulate_white_noise(op, theta, 20.0, active, mix_seed({seed, 0x6f6273ULL, t}));
            const auto est = dense_estimate(obs, spec);
            worst_kkt = std::max(worst_kkt, est.certificate.kkt_residual);
            for (int r = 0; r < 1000; ++r) {
                if (empirical_risk(obs, random_feasible(spec, active, rng)) < est.risk_value) ++beaten;
            }
        }
        checks.push_back(below("dense_kkt", worst_kkt, 1e-12));
        checks.push_back(below("dense_beats_random_feasible", static_cast<double>(beaten), 0.0, "1000 competitors per instance"));
    }
    return report;
}

}  // namespace ermip
