#pragma once

// Rate exponents, risk bounds, the entropy integral and the
// rate equations. Constants default to 1 and are always explicit.

#include <optional>
#include <utility>
#include <vector>

#include "ermip/operators.hpp"

namespace ermip {

/// rho(Q, F_delta) = c_prime delta^{-a}, log #F_delta = C delta^{-b}.
struct RateModel {
    double a = 0.0;
    double b = 1.0;
    double c_prime = 1.0;
    double C = 1.0;

    void validate() const;
    double rho(double delta) const;
    double log_card(double delta) const;
};

/// psi_n exponent 1 / (2(a+1) + b) of the net estimator; the MISE exponent is twice this.
double rate_exponent_net(double a, double b);

/// psi_n exponent 1 / (2 + 2 a_K + b) from the packing equation with
/// rho_K(A, D_delta) ~ delta^{a_K} and log #D_delta ~ delta^{-b}.
double rate_exponent_lower(double a_K, double b);

/// MISE exponent 2s / (2s + 2q + d).
double rate_convolution(double s, double q, int d);
/// MISE exponent 2s / (2s + 3).
double rate_radon(double s);
/// min_k 2 s_k / (2 s_k + 2 q_k + 1) over (s_k, q_k) pairs.
double rate_additive(const std::vector<std::pair<double, double>>& components);

struct TheoremOneConstants {
    double C1 = 0.0;
    double C2 = 0.0;
};

/// sup ||Af||_inf and sup ||Qf||_inf over the class (density branch).
struct DensityBounds {
    double B_inf = 0.0;
    double B_prime_inf = 0.0;
};

/// Smallest admissible xi for the given C_tau.
double theorem1_xi_min(double C_tau, StatModel model, const std::optional<DensityBounds>& density = {});

/// C1 = (1+2xi)/(1-2xi), C2 = xi C_tau/(1-2xi). Throws DomainError naming the
/// admissible interval when xi is outside it.
TheoremOneConstants theorem1_constants(double xi, double C_tau, StatModel model,
                                       const std::optional<DensityBounds>& density = {});

/// C1 delta^2 + C2 rho^2 (logN + 1) / n.
double theorem1_bound(double delta, double rho, double logN, double n, double xi, double C_tau, StatModel model,
                      const std::optional<DensityBounds>& density = {});

/// Smallest C_tau for which xi is admissible in the density branch.
double density_min_C_tau(double xi, const DensityBounds& density);

/// 3 delta^2 + 32 c^{-1} n^{-1} [sum rho_j^2 lambda_j + (sum rho_j)^2].
double theorem5_bound(double delta, const std::vector<double>& rho, const std::vector<double>& lambda, double n,
                      double c);

/// G(delta) = int_0^delta rho(u) sqrt(log #F_u) du in closed form; requires a + b/2 < 1.
double entropy_integral_G(const RateModel& model, double delta);
/// Same integral by tanh-sinh quadrature.
double entropy_integral_numeric(const RateModel& model, double delta);

enum class RateEquation { net, dense };

struct RateSolution {
    double psi = 0.0;
    double residual = 0.0;  // relative
};

/// net:   n psi^2 = rho(psi)^2 log #F_psi
/// dense: psi^2 = n^{-1/2} G(psi)
/// Solved by bisection in log psi on (0, upper].
RateSolution solve_rate_equation(double n, const RateModel& model, RateEquation which, double upper = 1.0);

/// kappa n^{-s/(2s+2q+d)}
double optimal_delta(double n, double s, double q, int d, double kappa = 1.0);

}  // namespace ermip
