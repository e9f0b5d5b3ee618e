#include "ermip/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "ermip/quadrature.hpp"
#include "ermip/rng.hpp"

namespace ermip {

namespace {

void require_density_operator(const DiagonalOperator& op) {
    if (!op.self_basis()) throw DomainError("density model needs an operator whose output basis is its input basis");
    const auto kind = op.input_basis().kind;
    if (kind != BasisKind::fourier_periodic && kind != BasisKind::additive_component) {
        throw DomainError("density model needs a periodic basis on [0,1]^d");
    }
    if (op.input_basis().d > 2) throw DomainError("density model supports d <= 2");
}

std::vector<Point> midpoint_grid(int d, int per_axis) {
    const auto nodes = periodic_nodes(static_cast<std::size_t>(per_axis));
    std::vector<Point> grid;
    if (d == 1) {
        for (double x : nodes) grid.push_back({x});
    } else {
        for (double x : nodes) {
            for (double y : nodes) grid.push_back({x, y});
        }
    }
    return grid;
}

int per_axis_for(int d, int total) {
    return d == 1 ? total : static_cast<int>(std::lround(std::sqrt(static_cast<double>(total))));
}

}  // namespace

std::uint64_t index_hash(const MultiIndex& j) {
    return mix_seed({j.dim(), static_cast<std::uint64_t>(j[0]), static_cast<std::uint64_t>(j.dim() > 1 ? j[1] : 0),
                     static_cast<std::uint64_t>(j.dim() > 2 ? j[2] : 0),
                     static_cast<std::uint64_t>(j.dim() > 3 ? j[3] : 0), j.parity_mask()});
}

WhiteNoiseObs simulate_white_noise(const DiagonalOperator& op, const CoefVec& theta_true, double n,
                                   const std::vector<MultiIndex>& active, std::uint64_t seed, NoiseMode noise) {
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("sample size n must be positive");
    WhiteNoiseObs obs;
    obs.n = n;
    obs.active = active;
    std::sort(obs.active.begin(), obs.active.end());
    obs.active.erase(std::unique(obs.active.begin(), obs.active.end()), obs.active.end());
    for (const auto& [j, v] : theta_true) {
        if (v != 0.0 && !std::binary_search(obs.active.begin(), obs.active.end(), j)) {
            throw DomainError("truth has mass at " + j.to_string() + " outside the active box");
        }
    }
    obs.theta_true = theta_true;
    obs.seed = seed;
    const double noise_scale = 1.0 / std::sqrt(n);
    for (const auto& j : obs.active) {
        double xi = 0.0;
        if (noise == NoiseMode::gaussian) {
            CounterRng rng(mix_seed({seed, index_hash(j)}));
            xi = rng.normal();
        }
        obs.xi.set(j, xi);
        obs.y.set(j, theta_true.get(j) + noise_scale / op.singular_value(j) * xi);
    }
    return obs;
}

double empirical_risk(const WhiteNoiseObs& obs, const CoefVec& c) {
    double cross = 0.0;
    double square = 0.0;
    for (const auto& [j, v] : c) {
        if (v == 0.0) continue;
        if (!obs.y.contains(j)) throw DomainError("candidate has mass at " + j.to_string() + " outside the active box");
        cross += v * obs.y.get(j);
        square += v * v;
    }
    return -2.0 * cross + square;
}

double nu_n(const WhiteNoiseObs& obs, const CoefVec& g) {
    double acc = 0.0;
    for (const auto& [j, v] : g) {
        if (v == 0.0) continue;
        if (!obs.y.contains(j)) throw DomainError("function has mass at " + j.to_string() + " outside the active box");
        acc += v * (obs.y.get(j) - obs.theta_true.get(j));
    }
    return acc;
}

// ---------------------------------------------------------------------------

std::vector<double> density_on_grid(const DiagonalOperator& op, const CoefVec& theta, int points_per_axis) {
    require_density_operator(op);
    const auto grid = midpoint_grid(op.input_basis().d, points_per_axis);
    const CoefVec af = apply_A_seq(op, theta);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = coef_eval(op.input_basis(), af, grid[i]);
    return values;
}

DensitySample sample_density(const DiagonalOperator& op, const CoefVec& theta_true, std::size_t n,
                             std::uint64_t seed, const DensitySamplerOptions& options) {
    require_density_operator(op);
    const int d = op.input_basis().d;
    const auto values = density_on_grid(op, theta_true, per_axis_for(d, options.check_points));
    double peak = 0.0;
    double mass = 0.0;
    for (double v : values) {
        if (v < 0.0) throw DomainError("A f is negative on the check grid");
        peak = std::max(peak, v);
        mass += v;
    }
    mass /= static_cast<double>(values.size());
    if (std::abs(mass - 1.0) > options.mass_tolerance) {
        throw DomainError("A f integrates to " + std::to_string(mass) + ", not 1");
    }
    const double envelope = peak * options.envelope_inflation;
    const CoefVec af = apply_A_seq(op, theta_true);

    DensitySample sample;
    sample.n = n;
    sample.seed = seed;
    sample.points.reserve(n);
    CounterRng rng(mix_seed({seed, 0x64656e73ULL}));
    Point x(static_cast<std::size_t>(d));
    while (sample.points.size() < n) {
        for (auto& xi : x) xi = rng.uniform();
        const double u = rng.uniform();
        ++sample.proposals;
        const double fx = coef_eval(op.input_basis(), af, x);
        if (fx > envelope) throw DomainError("rejection envelope violated; check grid too coarse");
        if (u * envelope <= fx) sample.points.push_back(x);
    }
    return sample;
}

CoefVec density_statistics(const DensitySample& sample, const DiagonalOperator& op,
                           const std::vector<MultiIndex>& indices) {
    require_density_operator(op);
    if (sample.points.empty()) throw DomainError("density sample is empty");
    CoefVec z;
    const double inv_n = 1.0 / static_cast<double>(sample.points.size());
    for (const auto& j : indices) {
        double acc = 0.0;
        for (const auto& x : sample.points) acc += basis_eval(op.input_basis(), j, x);
        z.set(j, acc * inv_n / op.singular_value(j));
    }
    return z;
}

double empirical_risk(const DensitySample& sample, const DiagonalOperator& op, const CoefVec& c) {
    require_density_operator(op);
    if (sample.points.empty()) throw DomainError("density sample is empty");
    double acc = 0.0;
    for (const auto& x : sample.points) acc += q_point_eval(op, c, x);
    return -2.0 * acc / static_cast<double>(sample.points.size()) + c.norm_sq();
}

double nu_n(const DensitySample& sample, const DiagonalOperator& op, const CoefVec& theta_true, const CoefVec& g,
            int points_per_axis) {
    require_density_operator(op);
    if (sample.points.empty()) throw DomainError("density sample is empty");
    double empirical = 0.0;
    for (const auto& x : sample.points) empirical += q_point_eval(op, g, x);
    empirical /= static_cast<double>(sample.points.size());

    const auto grid = midpoint_grid(op.input_basis().d, points_per_axis);
    const CoefVec af = apply_A_seq(op, theta_true);
    double integral = 0.0;
    for (const auto& x : grid) integral += q_point_eval(op, g, x) * coef_eval(op.input_basis(), af, x);
    integral /= static_cast<double>(grid.size());
    return empirical - integral;
}

}  // namespace ermip
