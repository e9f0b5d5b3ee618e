#include "ermip/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace ermip {

void RateModel::validate() const {
    if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("rate model needs a >= 0");
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("rate model needs b > 0");
    if (!(c_prime > 0.0) || !(C > 0.0)) throw DomainError("rate model constants must be positive");
}

double RateModel::rho(double delta) const { return c_prime * std::pow(delta, -a); }
double RateModel::log_card(double delta) const { return C * std::pow(delta, -b); }

double rate_exponent_net(double a, double b) {
    if (!(a >= 0.0)) throw DomainError("operator-norm exponent a must be >= 0");
    if (!(b > 0.0)) throw DomainError("entropy exponent b must be > 0");
    return 1.0 / (2.0 * (a + 1.0) + b);
}

double rate_exponent_lower(double a_K, double b) {
    if (!(a_K >= 0.0)) throw DomainError("packing operator-norm exponent must be >= 0");
    if (!(b > 0.0)) throw DomainError("packing entropy exponent must be > 0");
    return 1.0 / (2.0 + 2.0 * a_K + b);
}

double rate_convolution(double s, double q, int d) {
    if (!(s > 0.0)) throw DomainError("smoothness s must be > 0");
    if (!(q >= 0.0)) throw DomainError("ill-posedness q must be >= 0");
    if (d < 1) throw DomainError("dimension d must be >= 1");
    if (std::isinf(s)) return 1.0;
    return 2.0 * s / (2.0 * s + 2.0 * q + d);
}

double rate_radon(double s) { return rate_convolution(s, 0.5, 2); }

double rate_additive(const std::vector<std::pair<double, double>>& components) {
    if (components.empty()) throw DomainError("additive rate needs at least one component");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [s, q] : components) best = std::min(best, rate_convolution(s, q, 1));
    return best;
}

double theorem1_xi_min(double C_tau, StatModel model, const std::optional<DensityBounds>& density) {
    if (!(C_tau > 0.0)) throw DomainError("C_tau must be > 0");
    if (model == StatModel::white_noise) return std::sqrt(2.0 / C_tau);
    if (!density) throw DomainError("density branch needs B_inf and B'_inf");
    const double Bp = density->B_prime_inf;
    const double B = density->B_inf;
    return (4.0 * Bp / 3.0 + std::sqrt(2.0 * (8.0 * Bp * Bp / 9.0 + C_tau * B))) / C_tau;
}

TheoremOneConstants theorem1_constants(double xi, double C_tau, StatModel model,
                                       const std::optional<DensityBounds>& density) {
    const double lo = theorem1_xi_min(C_tau, model, density);
    if (!(xi >= lo) || !(xi < 0.5)) {
        throw DomainError(fmt::format("xi = {} is not admissible; need {:.17g} <= xi < 0.5", xi, lo));
    }
    return {(1.0 + 2.0 * xi) / (1.0 - 2.0 * xi), xi * C_tau / (1.0 - 2.0 * xi)};
}

double theorem1_bound(double delta, double rho, double logN, double n, double xi, double C_tau, StatModel model,
                      const std::optional<DensityBounds>& density) {
    if (!(n > 0.0)) throw DomainError("n must be > 0");
    const auto c = theorem1_constants(xi, C_tau, model, density);
    return c.C1 * delta * delta + c.C2 * rho * rho * (logN + 1.0) / n;
}

double density_min_C_tau(double xi, const DensityBounds& density) {
    if (!(xi > 0.0) || !(xi < 0.5)) throw DomainError("xi must lie in (0, 1/2)");
    // xi_min(C_tau) decreases in C_tau; find where it crosses xi.
    double lo = 1e-12;
    double hi = 1.0;
    while (theorem1_xi_min(hi, StatModel::density, density) > xi) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) throw InfeasibleError("no admissible C_tau for this xi");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (theorem1_xi_min(mid, StatModel::density, density) > xi) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

double theorem5_bound(double delta, const std::vector<double>& rho, const std::vector<double>& lambda, double n,
                      double c) {
    if (rho.size() != lambda.size()) throw DomainError("rho and lambda lists differ in length");
    if (!(c > 0.0)) throw DomainError("orthogonality constant c must be > 0");
    if (!(n > 0.0)) throw DomainError("n must be > 0");
    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
        weighted += rho[k] * rho[k] * lambda[k];
        total += rho[k];
    }
    return 3.0 * delta * delta + 32.0 / (c * n) * (weighted + total * total);
}

namespace {

double entropy_power(const RateModel& model) {
    model.validate();
    const double p = 1.0 - model.a - 0.5 * model.b;
    if (!(p > 0.0)) {
        throw DomainError(fmt::format("entropy integral diverges: a + b/2 = {} >= 1", model.a + 0.5 * model.b));
    }
    return p;
}

}  // namespace

double entropy_integral_G(const RateModel& model, double delta) {
    const double p = entropy_power(model);
    if (!(delta > 0.0)) throw DomainError("delta must be > 0");
    return model.c_prime * std::sqrt(model.C) * std::pow(delta, p) / p;
}

double entropy_integral_numeric(const RateModel& model, double delta) {
    const double p = entropy_power(model);
    if (!(delta > 0.0)) throw DomainError("delta must be > 0");
    // u = delta t^{1/p} flattens the u^{p-1} singularity at the origin;
    // Gauss-Kronrod never touches the endpoint.
    const double k = 1.0 / p;
    auto integrand = [&](double t) {
        const double u = delta * std::pow(t, k);
        return model.rho(u) * std::sqrt(model.log_card(u)) * delta * k * std::pow(t, k - 1.0);
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 1.0, 15, 1e-13);
}

RateSolution solve_rate_equation(double n, const RateModel& model, RateEquation which, double upper) {
    model.validate();
    if (!(n > 1.0)) throw DomainError("rate equation needs n > 1");
    if (!(upper > 0.0)) throw DomainError("upper bracket must be > 0");
    if (which == RateEquation::dense) entropy_power(model);

    // lhs(psi) / rhs(psi) is increasing in psi for both equations.
    auto sides = [&](double psi) -> std::pair<double, double> {
        if (which == RateEquation::net) {
            const double rho = model.rho(psi);
            return {n * psi * psi, rho * rho * model.log_card(psi)};
        }
        return {psi * psi, entropy_integral_G(model, psi) / std::sqrt(n)};
    };
    auto log_ratio = [&](double psi) {
        const auto [lhs, rhs] = sides(psi);
        return std::log(lhs) - std::log(rhs);
    };
    if (log_ratio(upper) < 0.0) throw InfeasibleError("rate equation has no root in (0, upper]");

    double lo = std::log(upper) - 1.0;
    while (log_ratio(std::exp(lo)) > 0.0) {
        lo -= 1.0;
        if (lo < -700.0) throw InfeasibleError("rate equation has no root above machine range");
    }
    double hi = std::log(upper);
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (log_ratio(std::exp(mid)) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    RateSolution sol;
    const double a = std::exp(lo);
    const double b = std::exp(hi);
    sol.psi = std::abs(log_ratio(a)) < std::abs(log_ratio(b)) ? a : b;
    const auto [lhs, rhs] = sides(sol.psi);
    sol.residual = std::abs(lhs - rhs) / rhs;
    return sol;
}

double optimal_delta(double n, double s, double q, int d, double kappa) {
    if (!(n > 1.0)) throw DomainError("optimal delta needs n > 1");
    if (!(kappa > 0.0)) throw DomainError("kappa must be > 0");
    return kappa * std::pow(n, -0.5 * rate_convolution(s, q, d));
}

}  // namespace ermip
