#include "ermip/operators.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "ermip/dense.hpp"
#include "ermip/quadrature.hpp"

namespace ermip {

namespace {

// Tensor midpoint grid on [0,1]^d, row-major.
std::vector<Point> unit_grid(int d, int per_axis) {
    const auto nodes = periodic_nodes(static_cast<std::size_t>(per_axis));
    std::vector<Point> grid;
    if (d == 1) {
        for (double x : nodes) grid.push_back({x});
    } else if (d == 2) {
        for (double x : nodes) {
            for (double y : nodes) grid.push_back({x, y});
        }
    } else {
        throw DomainError("grid quadrature supports d <= 2");
    }
    return grid;
}

std::vector<double> eval_on_grid(const BasisId& basis, const CoefVec& c, const std::vector<Point>& grid) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = coef_eval(basis, c, grid[i]);
    return out;
}

double kl_from_values(const std::vector<double>& f, const std::vector<double>& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f[i] > 0.0) || !(g[i] > 0.0)) {
            throw DomainError("Kullback-Leibler distance needs strictly positive densities on the grid");
        }
        acc += std::log(f[i] / g[i]) * f[i];
    }
    acc /= static_cast<double>(f.size());
    return std::sqrt(std::max(acc, 0.0));
}

void require_two_points(std::span<const CoefVec> set, const char* what) {
    if (set.size() < 2) throw DomainError(std::string(what) + " needs at least two points");
}

}  // namespace

// ---------------------------------------------------------------------------
// DiagonalOperator

DiagonalOperator DiagonalOperator::identity(const BasisId& basis) {
    DiagonalOperator op;
    op.kind_ = OperatorKind::identity;
    op.input_basis_ = basis;
    return op;
}

DiagonalOperator DiagonalOperator::convolution(int d, double q) {
    if (!(q >= 0.0) || !std::isfinite(q)) throw DomainError("convolution degree q must be >= 0");
    DiagonalOperator op;
    op.kind_ = OperatorKind::convolution;
    op.input_basis_ = BasisId::fourier(d);
    op.q_ = q;
    return op;
}

DiagonalOperator DiagonalOperator::convolution_kernel(int d, CoefVec kernel_coefficients) {
    DiagonalOperator op;
    op.kind_ = OperatorKind::convolution;
    op.input_basis_ = BasisId::fourier(d);
    kernel_coefficients = op.input_basis_.canonical(kernel_coefficients);
    for (const auto& [j, c] : kernel_coefficients) {
        if (static_cast<int>(j.dim()) != d || j.parity_mask() != 0) {
            throw DomainError("kernel coefficients must be cosine-only indices of dimension d");
        }
        if (!(c > 0.0)) throw DomainError("kernel coefficient at " + j.to_string() + " must be positive");
    }
    op.kernel_ = std::move(kernel_coefficients);
    return op;
}

DiagonalOperator DiagonalOperator::additive_convolution(std::vector<double> axis_q) {
    if (axis_q.empty() || axis_q.size() > kMaxDim) throw DomainError("additive operator needs 1..4 axes");
    for (double q : axis_q) {
        if (!(q >= 0.0) || !std::isfinite(q)) throw DomainError("additive degree q_k must be >= 0");
    }
    DiagonalOperator op;
    op.kind_ = OperatorKind::convolution;
    op.input_basis_ = BasisId::fourier(static_cast<int>(axis_q.size()));
    op.axis_q_ = std::move(axis_q);
    return op;
}

DiagonalOperator DiagonalOperator::radon2d() {
    DiagonalOperator op;
    op.kind_ = OperatorKind::radon2d;
    op.input_basis_ = BasisId::zernike();
    op.q_ = 0.5;
    return op;
}

BasisId DiagonalOperator::output_basis() const {
    return kind_ == OperatorKind::radon2d ? BasisId::chebyshev_halfplane() : input_basis_;
}

double DiagonalOperator::singular_value(const MultiIndex& j) const {
    switch (kind_) {
        case OperatorKind::identity:
            return 1.0;
        case OperatorKind::radon2d:
            return std::numbers::inv_pi / std::sqrt(static_cast<double>(j.total() + 1));
        case OperatorKind::convolution:
            break;
    }
    if (kernel_) {
        std::vector<int> idx(j.dim());
        std::vector<int> cos_parity(j.dim(), 0);
        for (std::size_t i = 0; i < j.dim(); ++i) idx[i] = j[i];
        const MultiIndex cos_j{std::span<const int>(idx), std::span<const int>(cos_parity)};
        const double c = kernel_->get(cos_j);
        if (!(c > 0.0)) throw DomainError("no kernel coefficient for index " + j.to_string());
        return c * std::pow(std::numbers::sqrt2, -j.nonzero_count());
    }
    if (!axis_q_.empty()) {
        if (j.nonzero_count() == 0) return 1.0;
        if (j.nonzero_count() != 1) {
            throw DomainError("additive operator only acts on single-axis indices, got " + j.to_string());
        }
        for (std::size_t i = 0; i < j.dim(); ++i) {
            if (j[i] != 0) return std::pow(static_cast<double>(j[i]), -axis_q_[i]);
        }
    }
    return std::pow(static_cast<double>(std::max(1, j.total())), -q_);
}

CoefVec apply_A_seq(const DiagonalOperator& op, const CoefVec& theta) {
    CoefVec out;
    for (const auto& [j, v] : theta) out.set(j, op.singular_value(j) * v);
    return out;
}

CoefVec apply_Q_seq(const DiagonalOperator& op, const CoefVec& c) {
    CoefVec out;
    for (const auto& [j, v] : c) {
        const double value = v / op.singular_value(j);
        if (!std::isfinite(value)) throw DomainError("Q overflow at index " + j.to_string());
        out.set(j, value);
    }
    return out;
}

double q_point_eval(const DiagonalOperator& op, const CoefVec& c, std::span<const double> y) {
    if (!op.self_basis()) throw DomainError("pointwise Q is only available for self-basis operators");
    double acc = 0.0;
    for (const auto& [j, v] : c) {
        if (v != 0.0) acc += v / op.singular_value(j) * basis_eval(op.input_basis(), j, y);
    }
    return acc;
}

double a_point_eval(const DiagonalOperator& op, const CoefVec& theta, std::span<const double> y) {
    if (!op.self_basis()) throw DomainError("pointwise A is only available for self-basis operators");
    double acc = 0.0;
    for (const auto& [j, v] : theta) {
        if (v != 0.0) acc += v * op.singular_value(j) * basis_eval(op.input_basis(), j, y);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Radon

double RadonGeometry::measure_density(double u) {
    if (u < 0.0 || u > 1.0) throw DomainError("Radon offset u outside [0, 1]");
    return 2.0 * std::numbers::inv_pi * std::sqrt(1.0 - u * u);
}

double RadonGeometry::total_mass(std::size_t order) {
    // The sqrt(1-u^2) endpoint singularity is removed by u = sin(t).
    const auto& gl = gauss_legendre(order);
    const double inner = gl.integrate(
        [](double t) { return measure_density(std::sin(t)) * std::cos(t); }, 0.0, std::numbers::pi / 2);
    return 2.0 * std::numbers::pi * inner;
}

double radon_forward_quadrature(const CoefVec& f, double u, double phi, int order, ChordNormalization norm) {
    if (!(u >= 0.0) || u >= 1.0) throw DomainError("Radon offset must satisfy 0 <= u < 1");
    if (!(phi >= 0.0) || phi >= 2.0 * std::numbers::pi) throw DomainError("Radon angle must be in [0, 2pi)");
    if (order < 8) throw DomainError("Radon quadrature order must be >= 8");

    const BasisId disk = BasisId::zernike();
    const double half = std::sqrt(1.0 - u * u);
    const double cphi = std::cos(phi);
    const double sphi = std::sin(phi);
    const auto& gl = gauss_legendre(static_cast<std::size_t>(order));
    const double integral = gl.integrate(
        [&](double t) {
            const double x = u * cphi - t * sphi;
            const double y = u * sphi + t * cphi;
            const double r = std::min(std::hypot(x, y), 1.0);
            const double angle = std::atan2(y, x);
            const double point[2] = {r, angle < 0.0 ? angle + 2.0 * std::numbers::pi : angle};
            return coef_eval(disk, f, point);
        },
        -half, half);
    const double mean = integral / (2.0 * half);
    return norm == ChordNormalization::inverse_pi_average ? mean * std::numbers::inv_pi
                                                          : mean * std::numbers::pi;
}

// ---------------------------------------------------------------------------
// Operator norms

namespace {

// max over pairs of ||W (x_a - x_b)|| / ||x_a - x_b|| with W diagonal.
double max_weighted_ratio(std::span<const CoefVec> set, const std::function<double(const MultiIndex&)>& weight,
                          const ExecPolicy& policy) {
    const auto dense = to_dense(set);
    std::vector<double> w(dense.cols());
    for (std::size_t c = 0; c < w.size(); ++c) {
        w[c] = weight(dense.columns[c]);
        if (!std::isfinite(w[c])) throw DomainError("operator weight overflow at index " + dense.columns[c].to_string());
    }
    const std::size_t n = dense.rows;
    return parallel_max(policy, n, [&](std::size_t a) {
        double row = -std::numeric_limits<double>::infinity();
        for (std::size_t b = a + 1; b < n; ++b) {
            const double denom = weighted_dist_sq(dense.row(a), dense.row(b));
            if (denom == 0.0) continue;
            row = std::max(row, std::sqrt(weighted_dist_sq(dense.row(a), dense.row(b), w) / denom));
        }
        return row;
    });
}

}  // namespace

double op_norm_rho(const DiagonalOperator& op, std::span<const CoefVec> net, const ExecPolicy& policy) {
    require_two_points(net, "op_norm_rho");
    const double best =
        max_weighted_ratio(net, [&](const MultiIndex& j) { return 1.0 / op.singular_value(j); }, policy);
    if (!std::isfinite(best)) throw DomainError("op_norm_rho: net has fewer than two distinct points");
    return best;
}

double rho_K(const DiagonalOperator& op, std::span<const CoefVec> packing, StatModel model,
             const ExecPolicy& policy, DensityQuadrature quad) {
    require_two_points(packing, "rho_K");
    const std::size_t n = packing.size();

    if (model == StatModel::white_noise) {
        const double best =
            max_weighted_ratio(packing, [&](const MultiIndex& j) { return op.singular_value(j); }, policy);
        if (!std::isfinite(best)) throw DomainError("rho_K: packing has fewer than two distinct points");
        return best / std::numbers::sqrt2;
    }

    if (!op.self_basis()) throw DomainError("density rho_K needs a self-basis operator");
    const auto grid = unit_grid(op.input_basis().d, quad.points_per_axis);
    std::vector<std::vector<double>> af(n);
    parallel_for(policy, n, [&](std::size_t i) {
        af[i] = eval_on_grid(op.input_basis(), apply_A_seq(op, packing[i]), grid);
    });
    // Exceptions must not escape an OpenMP region; validate afterwards.
    for (const auto& values : af) {
        for (double v : values) {
            if (!(v > 0.0)) throw DomainError("density rho_K: A f is not positive on the quadrature grid");
        }
    }
    const double best = parallel_max(policy, n, [&](std::size_t a) {
        double row = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            const double denom = l2_dist(packing[a], packing[b]);
            if (denom == 0.0) continue;
            row = std::max(row, kl_from_values(af[a], af[b]) / denom);
        }
        return row;
    });
    if (!std::isfinite(best)) throw DomainError("rho_K: packing has fewer than two distinct points");
    return best;
}

double kl_distance(const BasisId& basis, const CoefVec& f, const CoefVec& g, int points_per_axis) {
    const auto grid = unit_grid(basis.d, points_per_axis);
    return kl_from_values(eval_on_grid(basis, f, grid), eval_on_grid(basis, g, grid));
}

}  // namespace ermip
