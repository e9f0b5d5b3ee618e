#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ermip/nets.hpp"
#include "ermip/operators.hpp"
#include "ermip/oracles.hpp"
#include "ermip/quadrature.hpp"
#include "ermip/rng.hpp"
#include "ermip/special.hpp"

using namespace ermip;

namespace {

constexpr double kPi = std::numbers::pi;

MultiIndex cos1(int j) { return MultiIndex::with_parity({j}, {0}); }

}  // namespace

TEST(Special, ChebyshevU) {
    EXPECT_EQ(chebyshev_U(0, 0.3), 1.0);
    EXPECT_DOUBLE_EQ(chebyshev_U(1, 0.5), 1.0);
    EXPECT_NEAR(chebyshev_U(2, 0.5), 0.0, 1e-15);
    for (int m = 0; m < 12; ++m) {
        const double t = 0.7;
        EXPECT_NEAR(chebyshev_U(m, std::cos(t)), std::sin((m + 1) * t) / std::sin(t), 1e-12);
    }
}

TEST(Special, ZernikeRadial) {
    EXPECT_EQ(zernike_radial(0, 0, 0.4), 1.0);
    EXPECT_DOUBLE_EQ(zernike_radial(1, 1, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(zernike_radial(2, 0, 0.5), -0.5);
    EXPECT_THROW(zernike_radial(3, 0, 0.5), DomainError);
}

TEST(SingularValue, Rules) {
    const auto radon = DiagonalOperator::radon2d();
    EXPECT_DOUBLE_EQ(radon.singular_value(MultiIndex{0, 0}), 1.0 / kPi);
    EXPECT_DOUBLE_EQ(radon.singular_value(MultiIndex{2, 1}), 1.0 / (2.0 * kPi));
    const auto direct = DiagonalOperator::convolution(1, 0.0);
    for (int j = 0; j < 10; ++j) EXPECT_EQ(direct.singular_value(cos1(j)), 1.0);
    const auto conv = DiagonalOperator::convolution(1, 1.0);
    EXPECT_DOUBLE_EQ(conv.singular_value(cos1(4)), 0.25);
}

TEST(SingularValue, ConvolutionBoundedByOne) {
    const auto conv = DiagonalOperator::convolution(2, 1.5);
    for (const auto& j : index_box(BasisId::fourier(2), 6)) {
        EXPECT_GT(conv.singular_value(j), 0.0);
        EXPECT_LE(conv.singular_value(j), 1.0);
    }
}

TEST(ApplyA, Examples) {
    const auto id = DiagonalOperator::identity(BasisId::fourier(1));
    EXPECT_TRUE(apply_A_seq(id, {}).empty());
    const CoefVec theta{{cos1(2), 0.7}, {cos1(0), -0.1}};
    EXPECT_TRUE(apply_A_seq(id, theta).same_sequence(theta));
    const auto radon = apply_A_seq(DiagonalOperator::radon2d(), {{MultiIndex{0, 0}, 1.0}});
    EXPECT_DOUBLE_EQ(radon.get(MultiIndex{0, 0}), 1.0 / kPi);
}

TEST(ApplyQ, Examples) {
    const auto id = DiagonalOperator::identity(BasisId::fourier(1));
    EXPECT_TRUE(apply_Q_seq(id, {}).empty());
    const CoefVec c{{cos1(3), 1.5}};
    EXPECT_TRUE(apply_Q_seq(id, c).same_sequence(c));
    const auto q = apply_Q_seq(DiagonalOperator::convolution(1, 1.0), {{cos1(2), 1.0}});
    EXPECT_DOUBLE_EQ(q.get(cos1(2)), 2.0);
}

TEST(ApplyQ, InvertsA) {
    CounterRng rng(3);
    const auto radon = DiagonalOperator::radon2d();
    CoefVec theta;
    for (int j = 0; j < 6; ++j)
        for (int k = 0; k < 6; ++k) theta.set(MultiIndex{j, k}, rng.normal());
    const auto back = apply_Q_seq(radon, apply_A_seq(radon, theta));
    for (const auto& [j, v] : theta) EXPECT_NEAR(back.get(j), v, 1e-12 * (1.0 + std::abs(v)));
}

TEST(ApplyQ, OverflowGuard) {
    const auto conv = DiagonalOperator::convolution(1, 300.0);
    EXPECT_THROW(apply_Q_seq(conv, {{cos1(100), 1e300}}), DomainError);
}

TEST(QPointEval, Examples) {
    const double y[1] = {0.0};
    const double y2[1] = {0.63};
    const auto id = DiagonalOperator::identity(BasisId::fourier(1));
    EXPECT_EQ(q_point_eval(id, {}, y), 0.0);
    EXPECT_DOUBLE_EQ(q_point_eval(id, {{cos1(0), 1.0}}, y2), 1.0);
    EXPECT_DOUBLE_EQ(q_point_eval(DiagonalOperator::convolution(1, 1.0), {{cos1(1), 1.0}}, y), std::numbers::sqrt2);
    const double p[2] = {0.2, 0.3};
    EXPECT_THROW(q_point_eval(DiagonalOperator::radon2d(), {{MultiIndex{0, 0}, 1.0}}, p), DomainError);
}

TEST(Radon, MeasureMass) { EXPECT_NEAR(RadonGeometry::total_mass(), kPi, 1e-10); }

TEST(Radon, ForwardExamples) {
    EXPECT_EQ(radon_forward_quadrature({}, 0.4, 1.0), 0.0);
    const CoefVec constant{{MultiIndex{0, 0}, 1.0}};
    for (double u : {0.0, 0.5, 0.9}) {
        EXPECT_NEAR(radon_forward_quadrature(constant, u, 2.0), std::pow(kPi, -1.5), 1e-14);
    }
    const CoefVec mode{{MultiIndex{1, 0}, 1.0}};
    const double point[2] = {0.3, 1.0};
    const double predicted =
        DiagonalOperator::radon2d().singular_value(MultiIndex{1, 0}) *
        basis_eval(BasisId::chebyshev_halfplane(), MultiIndex{1, 0}, point);
    EXPECT_NEAR(radon_forward_quadrature(mode, 0.3, 1.0), predicted, 1e-12);
    EXPECT_THROW(radon_forward_quadrature(constant, 1.0, 0.0), DomainError);
}

TEST(Radon, SvdOracle) {
    RadonOracleOptions options;
    ASSERT_GE(options.u_points * options.phi_points, 50);
    EXPECT_LT(radon_svd_oracle(options).max_error, 1e-6);
}

TEST(Radon, PerturbedSingularValueFails) {
    const auto radon = DiagonalOperator::radon2d();
    const auto mutated = [&](const MultiIndex& j) {
        const double b = radon.singular_value(j);
        return j == MultiIndex{0, 0} ? b * (1.0 + 1e-3) : b;
    };
    EXPECT_GT(radon_svd_oracle({}, mutated).max_error, 1e-6);
}

TEST(Radon, PiAverageNormalizationScalesByPiSquared) {
    const CoefVec mode{{MultiIndex{2, 1}, 1.0}};
    const double a = radon_forward_quadrature(mode, 0.35, 0.8, 64, ChordNormalization::inverse_pi_average);
    const double b = radon_forward_quadrature(mode, 0.35, 0.8, 64, ChordNormalization::pi_average);
    EXPECT_NEAR(b / a, kPi * kPi, 1e-12);
}

TEST(Convolution, DefaultRuleOracle) {
    EXPECT_LT(convolution_oracle(DiagonalOperator::convolution(1, 1.0)).max_error, 1e-8);
}

TEST(Convolution, ExplicitKernelOracle) {
    CoefVec kernel;
    for (int j = 0; j <= 40; ++j) kernel.set(cos1(j), std::pow(0.6, j));
    const auto op = DiagonalOperator::convolution_kernel(1, kernel);
    EXPECT_LT(convolution_oracle(op).max_error, 1e-8);
    EXPECT_DOUBLE_EQ(op.singular_value(cos1(3)), std::pow(0.6, 3) / std::numbers::sqrt2);
    EXPECT_DOUBLE_EQ(op.singular_value(MultiIndex::with_parity({3}, {1})), std::pow(0.6, 3) / std::numbers::sqrt2);
}

TEST(Convolution, KernelWithoutParityIsCosine) {
    const auto a = DiagonalOperator::convolution_kernel(1, {{MultiIndex{0}, 1.0}, {MultiIndex{1}, 0.5}});
    EXPECT_DOUBLE_EQ(a.singular_value(cos1(1)), 0.5 / std::numbers::sqrt2);
}

TEST(OpNormRho, Examples) {
    const auto basis = BasisId::fourier(1);
    const auto id = DiagonalOperator::identity(basis);
    const std::vector<CoefVec> pair{{{cos1(3), 0.0}}, {{cos1(3), 0.2}}};
    EXPECT_DOUBLE_EQ(op_norm_rho(id, pair), 1.0);
    EXPECT_DOUBLE_EQ(op_norm_rho(DiagonalOperator::convolution(1, 1.0), pair), 3.0);
    EXPECT_THROW(op_norm_rho(id, std::vector<CoefVec>{{}}), DomainError);
}

TEST(OpNormRho, GridNetMatchesLargestInverseSingularValue) {
    // Small s keeps three grid values on every active coordinate.
    const auto conv = DiagonalOperator::convolution(1, 1.0);
    const auto small = NetSpec::manual({1, 0.1, 1.0}, BasisId::fourier(1), 3, 0.6);
    const auto points = enumerate_net(small, 200000);
    ASSERT_EQ(points.size(), 2187u);
    EXPECT_DOUBLE_EQ(op_norm_rho(conv, points), 3.0);
    EXPECT_DOUBLE_EQ(grid_op_norm(conv, small), 3.0);
    // 3^11 points at M = 5 is too many for the pairwise scan; the closed form still applies.
    EXPECT_DOUBLE_EQ(grid_op_norm(conv, NetSpec::manual({1, 0.1, 1.0}, BasisId::fourier(1), 5, 0.6)), 5.0);
}

TEST(OpNormRho, SerialMatchesOpenMP) {
    const auto conv = DiagonalOperator::convolution(1, 1.0);
    const auto net = NetSpec::manual({1, 0.1, 1.0}, BasisId::fourier(1), 2, 0.6);
    const auto points = enumerate_net(net, 200000);
    EXPECT_EQ(op_norm_rho(conv, points, ExecPolicy::serial()), op_norm_rho(conv, points, ExecPolicy::openmp(4)));
}

TEST(RhoK, WhiteNoise) {
    const auto basis = BasisId::fourier(1);
    const std::vector<CoefVec> pair{{{cos1(1), 0.1}}, {{cos1(2), -0.3}}};
    EXPECT_DOUBLE_EQ(rho_K(DiagonalOperator::identity(basis), pair, StatModel::white_noise), 1.0 / std::numbers::sqrt2);
    const std::vector<CoefVec> same{{{cos1(1), 0.1}}, {{cos1(1), 0.1}}};
    EXPECT_THROW(rho_K(DiagonalOperator::identity(basis), same, StatModel::white_noise), DomainError);
}

TEST(RhoK, ShellRange) {
    const auto packing = build_packing({1, 1.0, 1.0}, BasisId::fourier(1), 0.02, 9);
    ASSERT_GE(packing.codebook.size(), 2u);
    const auto conv = DiagonalOperator::convolution(1, 1.0);
    const double value = rho_K(conv, packing.points(), StatModel::white_noise);
    const double lo = 1.0 / (std::numbers::sqrt2 * packing.M);
    const double hi = 1.0 / (std::numbers::sqrt2 * std::max(1, packing.M_star));
    EXPECT_GE(value, lo - 1e-15);
    EXPECT_LE(value, hi + 1e-15);
}

TEST(RhoK, DensityRejectsNonpositive) {
    const auto basis = BasisId::fourier(1);
    const auto id = DiagonalOperator::identity(basis);
    const std::vector<CoefVec> pts{{{cos1(0), 1.0}, {cos1(1), 0.9}}, {{cos1(0), 1.0}}};
    EXPECT_THROW(rho_K(id, pts, StatModel::density), DomainError);
}

TEST(KlDistance, Examples) {
    const auto basis = BasisId::fourier(1);
    const CoefVec f{{cos1(0), 1.0}};
    const CoefVec g{{cos1(0), 1.0}, {cos1(1), 0.5}};
    EXPECT_EQ(kl_distance(basis, f, f), 0.0);
    // D^2 = -int log(1 + 0.5 sqrt2 cos 2 pi x) dx by an independent Gauss-Legendre rule.
    const auto& gl = gauss_legendre(200);
    const double reference =
        -gl.integrate([](double x) { return std::log(1.0 + 0.5 * std::numbers::sqrt2 * std::cos(2.0 * kPi * x)); }, 0.0,
                      1.0);
    EXPECT_NEAR(kl_distance(basis, f, g) * kl_distance(basis, f, g), reference, 1e-10);
    const CoefVec negative{{cos1(0), 1.0}, {cos1(1), 1.0}};
    EXPECT_THROW(kl_distance(basis, f, negative), DomainError);
}
