#pragma once

#include <cstddef>
#include <vector>

namespace ermip {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(std::size_t order);
    std::size_t order() const { return nodes.size(); }

    /// Integral of f over [a, b].
    template <class F>
    double integrate(F&& f, double a, double b) const {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (b + a);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            acc += weights[i] * f(mid + half * nodes[i]);
        }
        return half * acc;
    }
};

/// Cached rule for the given order; thread-safe.
const GaussLegendre& gauss_legendre(std::size_t order);

/// Periodic trapezoid rule on [0, 1): nodes (i + 0.5) / n, equal weights 1/n.
/// Midpoint placement keeps every node strictly inside the unit interval.
std::vector<double> periodic_nodes(std::size_t n);

}  // namespace ermip
