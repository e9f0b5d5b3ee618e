#include "ermip/oracles.hpp"

#include <cmath>
#include <numbers>

#include "ermip/quadrature.hpp"

namespace ermip {

namespace {

struct WeightedGrid {
    std::vector<Point> points;
    std::vector<double> weights;
};

WeightedGrid unit_cube_grid(int d, int per_axis) {
    const auto nodes = periodic_nodes(static_cast<std::size_t>(per_axis));
    WeightedGrid g;
    const std::size_t total = static_cast<std::size_t>(std::pow(per_axis, d));
    const double w = 1.0 / static_cast<double>(total);
    std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
    for (std::size_t n = 0; n < total; ++n) {
        Point p(static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = nodes[idx[i]];
        g.points.push_back(std::move(p));
        g.weights.push_back(w);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (++idx[i] < static_cast<std::size_t>(per_axis)) break;
            idx[i] = 0;
        }
    }
    return g;
}

// Disk in polar coordinates, area element r dr dtheta.
WeightedGrid disk_grid(int angles) {
    const auto& gl = gauss_legendre(32);
    WeightedGrid g;
    for (std::size_t i = 0; i < gl.order(); ++i) {
        const double r = 0.5 * (gl.nodes[i] + 1.0);
        const double wr = 0.5 * gl.weights[i] * r;
        for (int a = 0; a < angles; ++a) {
            const double theta = 2.0 * std::numbers::pi * a / angles;
            g.points.push_back({r, theta});
            g.weights.push_back(wr * 2.0 * std::numbers::pi / angles);
        }
    }
    return g;
}

// Y = [0,1] x [0,2pi) with d nu = 2/pi sqrt(1-u^2) du dphi; u = cos t removes
// the square-root endpoint behaviour.
WeightedGrid radon_output_grid(int angles) {
    const auto& gl = gauss_legendre(48);
    WeightedGrid g;
    const double half_pi = 0.5 * std::numbers::pi;
    for (std::size_t i = 0; i < gl.order(); ++i) {
        const double t = half_pi * 0.5 * (gl.nodes[i] + 1.0);
        const double u = std::cos(t);
        const double wt = half_pi * 0.5 * gl.weights[i] * 2.0 * std::numbers::inv_pi * std::sin(t) * std::sin(t);
        for (int a = 0; a < angles; ++a) {
            const double phi = 2.0 * std::numbers::pi * a / angles;
            g.points.push_back({u, phi});
            g.weights.push_back(wt * 2.0 * std::numbers::pi / angles);
        }
    }
    return g;
}

std::vector<MultiIndex> indices_up_to(const BasisId& basis, int max_total) {
    std::vector<MultiIndex> out;
    for (const auto& j : index_box(basis, max_total)) {
        if (j.total() <= max_total) out.push_back(j);
    }
    return out;
}

}  // namespace

OracleResult gram_orthonormality(const BasisId& basis, int max_total, int resolution, const ExecPolicy& policy) {
    WeightedGrid grid;
    switch (basis.kind) {
        case BasisKind::fourier_periodic:
        case BasisKind::additive_component:
            grid = unit_cube_grid(basis.d, resolution);
            break;
        case BasisKind::zernike_disk:
            grid = disk_grid(resolution);
            break;
        case BasisKind::chebyshev_halfplane:
            grid = radon_output_grid(resolution);
            break;
        case BasisKind::sequence:
            throw DomainError("sequence basis has no pointwise form");
    }
    const auto indices = indices_up_to(basis, max_total);
    const std::size_t m = indices.size();
    const std::size_t npts = grid.points.size();

    // Basis values, one row per index.
    std::vector<std::vector<double>> values(m, std::vector<double>(npts));
    parallel_for(policy, m, [&](std::size_t a) {
        for (std::size_t p = 0; p < npts; ++p) values[a][p] = basis_eval(basis, indices[a], grid.points[p]);
    });

    OracleResult result;
    result.checks = m * (m + 1) / 2;
    result.max_error = parallel_max(policy, m, [&](std::size_t a) {
        double worst = 0.0;
        for (std::size_t b = a; b < m; ++b) {
            double acc = 0.0;
            for (std::size_t p = 0; p < npts; ++p) acc += grid.weights[p] * values[a][p] * values[b][p];
            worst = std::max(worst, std::abs(acc - (a == b ? 1.0 : 0.0)));
        }
        return worst;
    });
    return result;
}

OracleResult radon_svd_oracle(const RadonOracleOptions& options, const SingularValueFn& singular_value,
                              const ExecPolicy& policy) {
    const auto op = DiagonalOperator::radon2d();
    const auto indices = indices_up_to(BasisId::zernike(), options.max_total);
    const BasisId out_basis = BasisId::chebyshev_halfplane();

    std::vector<std::pair<double, double>> points;
    for (int iu = 0; iu < options.u_points; ++iu) {
        const double u = options.u_points == 1 ? 0.5 : 0.97 * (iu + 0.5) / options.u_points;
        for (int ip = 0; ip < options.phi_points; ++ip) {
            points.emplace_back(u, 2.0 * std::numbers::pi * (ip + 0.25) / options.phi_points);
        }
    }

    std::vector<double> b(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        b[i] = singular_value ? singular_value(indices[i]) : op.singular_value(indices[i]);
    }

    const std::size_t total = indices.size() * points.size();
    OracleResult result;
    result.checks = total;
    result.max_error = parallel_max(policy, total, [&](std::size_t flat) {
        const std::size_t ji = flat / points.size();
        const auto& j = indices[ji];
        const auto [u, phi] = points[flat % points.size()];
        const CoefVec mode{{j, 1.0}};
        const double forward = radon_forward_quadrature(mode, u, phi, options.order, options.normalization);
        const double point[2] = {u, phi};
        return std::abs(forward - b[ji] * basis_eval(out_basis, j, point));
    });
    return result;
}

OracleResult convolution_oracle(const DiagonalOperator& op, const ConvolutionOracleOptions& options,
                                const ExecPolicy& policy) {
    if (op.kind() != OperatorKind::convolution || op.input_basis().d != 1) {
        throw DomainError("convolution oracle needs a one-dimensional convolution operator");
    }
    const BasisId basis = BasisId::fourier(1);

    // Kernel a = sum_j c_j phi_j (cosine terms); explicit coefficients when
    // given, otherwise the cosine series implied by the singular-value rule.
    CoefVec kernel;
    if (op.kernel()) {
        kernel = *op.kernel();
    } else {
        for (int j = 0; j <= options.max_index; ++j) {
            const auto idx = MultiIndex::with_parity({j}, {0});
            kernel.set(idx, op.singular_value(idx) * (j == 0 ? 1.0 : std::numbers::sqrt2));
        }
    }

    std::vector<MultiIndex> indices;
    for (const auto& j : index_box(basis, options.max_index)) indices.push_back(j);
    std::vector<double> b(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) b[i] = op.singular_value(indices[i]);
    const auto xs = periodic_nodes(static_cast<std::size_t>(options.x_points));
    const auto ys = periodic_nodes(static_cast<std::size_t>(options.quadrature_points));

    const std::size_t total = indices.size() * xs.size();
    OracleResult result;
    result.checks = total;
    result.max_error = parallel_max(policy, total, [&](std::size_t flat) {
        const std::size_t ji = flat / xs.size();
        const auto& j = indices[ji];
        const double x = xs[flat % xs.size()];
        double conv = 0.0;
        for (double y : ys) {
            double shifted = x - y;
            if (shifted < 0.0) shifted += 1.0;
            const double ks[1] = {shifted};
            const double ys1[1] = {y};
            conv += coef_eval(basis, kernel, ks) * basis_eval(basis, j, ys1);
        }
        conv /= static_cast<double>(ys.size());
        const double xx[1] = {x};
        return std::abs(conv - b[ji] * basis_eval(basis, j, xx));
    });
    return result;
}

}  // namespace ermip
