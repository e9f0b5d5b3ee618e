#pragma once

// Empirical risk minimizers over a grid net, over the whole ellipsoid, and
// over a direct sum of one-dimensional component nets.

#include <optional>
#include <vector>

#include "ermip/nets.hpp"
#include "ermip/simulate.hpp"

namespace ermip {

enum class CertificateKind { exact_grid_argmin, kkt_projection, direct_sum };

struct Certificate {
    CertificateKind kind = CertificateKind::exact_grid_argmin;
    double kkt_residual = 0.0;
    double lambda = 0.0;             // dense only
    double duality_gap = 0.0;        // dense only: bound on gamma_n(theta_hat) - inf gamma_n
    double eps_n = 0.0;              // dense only
    std::vector<Certificate> per_component;  // additive only
};

struct EstimateReport {
    CoefVec theta_hat;
    double risk_value = 0.0;  // gamma_n at theta_hat
    Certificate certificate;
};

/// Grid argmin of gamma_n: gamma_n(c) = ||c - y||^2 - ||y||^2 separates over
/// coordinates, so the argmin is quantize(net, y). The observation box must
/// contain the net's active indices.
EstimateReport delta_net_estimate(const WhiteNoiseObs& obs, const NetSpec& net);

/// Density version: the same rounding applied to z_j = n^{-1} sum_i (Q phi_j)(Y_i).
EstimateReport delta_net_estimate(const DensitySample& sample, const DiagonalOperator& op, const NetSpec& net);

/// Projection of y onto {sum a_j^2 c_j^2 <= L^2} over the active box.
/// eps_n < 0 selects the default 1e-10 (1 + ||y||^2).
EstimateReport dense_estimate(const WhiteNoiseObs& obs, const EllipsoidSpec& spec, double eps_n = -1.0);

struct AdditiveComponent {
    int axis = 0;
    EllipsoidSpec spec;  // d must be 1
    double q = 0.0;
};

/// Component k uses the one-dimensional cosine system on its axis with its
/// own net of radius delta_k; the estimate is the sum of the component argmins.
EstimateReport additive_estimate(const WhiteNoiseObs& obs, const std::vector<AdditiveComponent>& components,
                                 const std::vector<double>& deltas);

/// Component nets used by additive_estimate, in component order.
std::vector<NetSpec> additive_nets(int dim, const std::vector<AdditiveComponent>& components,
                                   const std::vector<double>& deltas);

/// ||theta_hat - theta_true||^2
double mise(const CoefVec& theta_hat, const CoefVec& theta_true);

}  // namespace ermip
