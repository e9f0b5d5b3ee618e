#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ermip/estimators.hpp"
#include "ermip/nets.hpp"
#include "ermip/rng.hpp"
#include "ermip/simulate.hpp"

using namespace ermip;

namespace {

MultiIndex cos1(int j) { return MultiIndex::with_parity({j}, {0}); }

const BasisId kBasis = BasisId::fourier(1);

CoefVec truth() { return {{cos1(0), 0.2}, {cos1(1), -0.1}, {MultiIndex::with_parity({2}, {1}), 0.05}}; }

}  // namespace

TEST(Rng, Deterministic) {
    CounterRng a(99), b(99);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.normal(), b.normal());
    EXPECT_NE(mix_seed({1, 2}), mix_seed({2, 1}));
}

TEST(Rng, UniformRange) {
    CounterRng r(4);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(WhiteNoise, NoiselessHook) {
    const auto active = index_box(kBasis, 3);
    const auto obs = simulate_white_noise(DiagonalOperator::convolution(1, 1.0), truth(), 100.0, active, 1,
                                          NoiseMode::zero);
    for (const auto& j : active) EXPECT_EQ(obs.y.get(j), truth().get(j));
}

TEST(WhiteNoise, IdentityUnitN) {
    const auto active = index_box(kBasis, 3);
    const auto obs = simulate_white_noise(DiagonalOperator::identity(kBasis), truth(), 1.0, active, 17);
    for (const auto& j : active) EXPECT_EQ(obs.y.get(j), truth().get(j) + obs.xi.get(j));
}

TEST(WhiteNoise, ReconstructionIdentity) {
    const auto op = DiagonalOperator::convolution(1, 1.0);
    const auto active = index_box(kBasis, 6);
    const auto obs = simulate_white_noise(op, truth(), 512.0, active, 5);
    for (const auto& j : active) {
        const double expected = truth().get(j) + obs.xi.get(j) / (std::sqrt(512.0) * op.singular_value(j));
        EXPECT_DOUBLE_EQ(obs.y.get(j), expected);
    }
}

TEST(WhiteNoise, Deterministic) {
    const auto active = index_box(kBasis, 5);
    const auto op = DiagonalOperator::convolution(1, 1.0);
    const auto a = simulate_white_noise(op, truth(), 1000.0, active, 123);
    const auto b = simulate_white_noise(op, truth(), 1000.0, active, 123);
    EXPECT_EQ(a.y.entries(), b.y.entries());
    // Shared indices share noise across box sizes.
    const auto c = simulate_white_noise(op, truth(), 1000.0, index_box(kBasis, 2), 123);
    for (const auto& [j, v] : c.xi) EXPECT_EQ(v, a.xi.get(j));
}

TEST(WhiteNoise, Preconditions) {
    const auto active = index_box(kBasis, 1);
    const auto id = DiagonalOperator::identity(kBasis);
    EXPECT_THROW(simulate_white_noise(id, truth(), 0.0, active, 1), DomainError);
    EXPECT_THROW(simulate_white_noise(id, truth(), -3.0, active, 1), DomainError);
    EXPECT_THROW(simulate_white_noise(id, truth(), 1.0, active, 1), DomainError);  // truth at index 2 is off the box
}

TEST(WhiteNoise, StandardizedResidualDistribution) {
    const auto op = DiagonalOperator::convolution(1, 1.0);
    const auto j = cos1(3);
    const std::vector<MultiIndex> active{j};
    const CoefVec theta{{j, 0.01}};
    const int reps = 10000;
    const double n = 250.0;
    double sum = 0.0, sum_sq = 0.0;
    for (int r = 0; r < reps; ++r) {
        const auto obs = simulate_white_noise(op, theta, n, active, mix_seed({2024, static_cast<std::uint64_t>(r)}));
        const double z = std::sqrt(n) * op.singular_value(j) * (obs.y.get(j) - theta.get(j));
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / reps;
    const double var = (sum_sq - reps * mean * mean) / (reps - 1);
    EXPECT_LT(std::abs(mean), 4.0 / std::sqrt(reps));
    EXPECT_GE(var, 0.94);
    EXPECT_LE(var, 1.06);
}

TEST(EmpiricalRisk, WhiteNoiseExamples) {
    const auto active = index_box(kBasis, 3);
    const auto obs = simulate_white_noise(DiagonalOperator::convolution(1, 1.0), truth(), 50.0, active, 8);
    EXPECT_EQ(empirical_risk(obs, {}), 0.0);
    EXPECT_NEAR(empirical_risk(obs, obs.y), -obs.y.norm_sq(), 1e-14);
    CounterRng rng(12);
    for (int t = 0; t < 100; ++t) {
        CoefVec c, c2;
        for (const auto& j : active) {
            c.set(j, rng.normal());
            c2.set(j, rng.normal());
        }
        const double lhs = empirical_risk(obs, c) - empirical_risk(obs, c2);
        const double rhs = l2_dist(c, obs.y) * l2_dist(c, obs.y) - l2_dist(c2, obs.y) * l2_dist(c2, obs.y);
        EXPECT_NEAR(lhs, rhs, 1e-12);
    }
    EXPECT_THROW(empirical_risk(obs, {{cos1(9), 1.0}}), DomainError);
}

TEST(NuN, WhiteNoiseExamples) {
    const auto active = index_box(kBasis, 3);
    const auto op = DiagonalOperator::convolution(1, 1.0);
    const auto obs = simulate_white_noise(op, truth(), 50.0, active, 8);
    EXPECT_EQ(nu_n(obs, {}), 0.0);
    const auto quiet = simulate_white_noise(op, truth(), 50.0, active, 8, NoiseMode::zero);
    EXPECT_EQ(nu_n(quiet, {{cos1(1), 3.0}, {cos1(2), -1.0}}), 0.0);
}

TEST(NuN, ExcessRiskDecomposition) {
    CounterRng rng(31);
    const EllipsoidSpec spec{1, 2.0, 1.0};
    const auto op = DiagonalOperator::convolution(1, 1.0);
    const auto net = build_net(spec, kBasis, 0.1);
    for (int t = 0; t < 100; ++t) {
        CoefVec f;
        for (const auto& j : net.active) f.set(j, rng.normal() / (ell_coeff(spec, j) * 4.0));
        const auto obs = simulate_white_noise(op, f, 200.0 + 50.0 * t, net.active, rng());
        CoefVec a, b;
        for (const auto& j : net.active) {
            a.set(j, rng.normal());
            b.set(j, rng.normal());
        }
        const auto f_hat = quantize(net, a);
        const auto f0 = quantize(net, b);
        const double lhs = mise(f_hat, f) - empirical_risk(obs, f_hat) + empirical_risk(obs, f0) - mise(f0, f);
        // nu_n(Q(f_hat - f0)) in coefficients of g = f_hat - f0.
        const double rhs = 2.0 * nu_n(obs, f_hat - f0);
        EXPECT_LT(std::abs(lhs - rhs), 1e-10);
    }
}

TEST(Density, UniformTarget) {
    const auto id = DiagonalOperator::identity(kBasis);
    const auto s = sample_density(id, {{cos1(0), 1.0}}, 2000, 3);
    EXPECT_EQ(s.points.size(), 2000u);
    EXPECT_LT(static_cast<double>(s.proposals), 2000 * 1.05);
    for (const auto& p : s.points) {
        EXPECT_GE(p[0], 0.0);
        EXPECT_LT(p[0], 1.0);
    }
}

TEST(Density, CosineMoment) {
    const auto op = DiagonalOperator::convolution(1, 1.0);
    const CoefVec f{{cos1(0), 1.0}, {cos1(1), 0.5}};
    const std::size_t n = 20000;
    const auto s = sample_density(op, f, n, 11);
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& p : s.points) {
        const double c = std::cos(2.0 * std::numbers::pi * p[0]);
        sum += c;
        sum_sq += c * c;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    // int cos(2 pi y) (1 + 0.5 sqrt2 cos(2 pi y)) dy = 0.5 sqrt2 / 2
    EXPECT_LT(std::abs(mean - 0.25 * std::numbers::sqrt2), 3.0 * se);
}

TEST(Density, Deterministic) {
    const auto op = DiagonalOperator::convolution(1, 1.0);
    const CoefVec f{{cos1(0), 1.0}, {cos1(1), 0.5}};
    const auto a = sample_density(op, f, 500, 77);
    const auto b = sample_density(op, f, 500, 77);
    EXPECT_EQ(a.points, b.points);
}

TEST(Density, RejectsNegativeOrUnnormalized) {
    const auto id = DiagonalOperator::identity(kBasis);
    EXPECT_THROW(sample_density(id, {{cos1(0), 1.0}, {cos1(1), 1.0}}, 10, 1), DomainError);
    EXPECT_THROW(sample_density(id, {{cos1(0), 0.9}}, 10, 1), DomainError);
    EXPECT_THROW(sample_density(DiagonalOperator::radon2d(), {{MultiIndex{0, 0}, 1.0}}, 10, 1), DomainError);
}

TEST(Density, EmpiricalRiskAndNuN) {
    const auto op = DiagonalOperator::convolution(1, 1.0);
    const CoefVec f{{cos1(0), 1.0}, {cos1(1), 0.3}};
    const auto s = sample_density(op, f, 1000, 2);
    EXPECT_EQ(empirical_risk(s, op, {}), 0.0);
    EXPECT_EQ(nu_n(s, op, f, {}), 0.0);
    // Pointwise risk agrees with the statistics form -2 <c, z> + ||c||^2.
    const CoefVec c{{cos1(1), 0.7}, {MultiIndex::with_parity({2}, {1}), -0.4}};
    std::vector<MultiIndex> idx;
    for (const auto& [j, v] : c) idx.push_back(j);
    const auto z = density_statistics(s, op, idx);
    double inner = 0.0;
    for (const auto& [j, v] : c) inner += v * z.get(j);
    EXPECT_NEAR(empirical_risk(s, op, c), -2.0 * inner + c.norm_sq(), 1e-12);
    EXPECT_THROW(empirical_risk(s, DiagonalOperator::radon2d(), {{MultiIndex{0, 0}, 1.0}}), DomainError);
}

TEST(Density, StatisticsUnbiased) {
    const auto op = DiagonalOperator::convolution(1, 1.0);
    const CoefVec f{{cos1(0), 1.0}, {cos1(1), 0.3}, {MultiIndex::with_parity({1}, {1}), -0.2}, {cos1(2), 0.1}};
    const std::size_t n = 100000;
    const auto s = sample_density(op, f, n, 19);
    const auto indices = index_box(kBasis, 5);
    const auto z = density_statistics(s, op, indices);
    for (const auto& j : indices) {
        // Standard error of the mean of (Q phi_j)(Y) from the sample itself.
        double sum = 0.0, sum_sq = 0.0;
        for (const auto& p : s.points) {
            const double v = q_point_eval(op, {{j, 1.0}}, p);
            sum += v;
            sum_sq += v * v;
        }
        const double mean = sum / n;
        const double se = std::sqrt((sum_sq / n - mean * mean) / n);
        EXPECT_NEAR(mean, z.get(j), 1e-12);
        EXPECT_LE(std::abs(z.get(j) - f.get(j)), 4.0 * se) << j.to_string();
    }
}
