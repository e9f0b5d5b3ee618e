#include "ermip/nets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "ermip/dense.hpp"
#include "ermip/rng.hpp"

namespace ermip {

namespace {

double max_shell_coeff(const EllipsoidSpec& spec, const std::vector<MultiIndex>& indices) {
    double best = 0.0;
    for (const auto& j : indices) best = std::max(best, ell_coeff(spec, j));
    return best;
}

std::vector<MultiIndex> shell_indices(const BasisId& basis, int M, int M_star) {
    std::vector<MultiIndex> out;
    for (const auto& j : index_box(basis, M)) {
        bool inside = true;
        for (std::size_t i = 0; i < j.dim(); ++i) {
            const bool zero_axis = basis.kind == BasisKind::additive_component &&
                                   static_cast<int>(i) != basis.axis;
            if (!zero_axis && j[i] < M_star) inside = false;
        }
        if (inside) out.push_back(j);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Nets

NetSpec NetSpec::manual(const EllipsoidSpec& spec, const BasisId& basis, int M, double eps, double delta) {
    spec.validate();
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("net grid step must be positive");
    NetSpec net;
    net.spec = spec;
    net.basis = basis;
    net.delta = delta;
    net.M = M;
    net.eps = eps;
    net.active = index_box(basis, M);
    return net;
}

double NetSpec::box_bound(const MultiIndex& j) const { return spec.L / ell_coeff(spec, j); }

long NetSpec::grid_half_count(const MultiIndex& j) const {
    return static_cast<long>(std::floor(box_bound(j) / eps));
}

NetSpec build_net(const EllipsoidSpec& spec, const BasisId& basis, double delta) {
    spec.validate();
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("net radius delta must be positive");
    const double tail_budget = delta / std::numbers::sqrt2;
    auto tail_ok = [&](int M) { return spec.L * std::pow(M + 1.0, -spec.s) <= tail_budget; };

    int M = static_cast<int>(std::ceil(std::pow(spec.L / tail_budget, 1.0 / spec.s))) - 1;
    M = std::max(M, 0);
    while (!tail_ok(M)) ++M;
    while (M > 0 && tail_ok(M - 1)) --M;

    NetSpec net;
    net.spec = spec;
    net.basis = basis;
    net.delta = delta;
    net.M = M;
    net.active = index_box(basis, M);
    if (net.active.empty()) throw DomainError("net has no active indices for basis " + basis.name());
    net.eps = delta * std::numbers::sqrt2 / std::sqrt(static_cast<double>(net.active.size()));
    return net;
}

double quantize_coordinate(double y, double eps, long half_count) {
    const double u = y / eps;
    // Round half toward zero.
    double k = std::ceil(std::abs(u) - 0.5);
    k = std::min(k, static_cast<double>(half_count));
    return std::copysign(k, u) * eps + 0.0;
}

CoefVec quantize(const NetSpec& net, const CoefVec& y) {
    CoefVec out;
    for (const auto& j : net.active) {
        out.set(j, quantize_coordinate(y.get(j), net.eps, net.grid_half_count(j)));
    }
    return out;
}

std::vector<CoefVec> enumerate_net(const NetSpec& net, std::size_t cap) {
    const double log_count = net_log_cardinality(net);
    const double count = std::round(std::exp(log_count));
    if (count > static_cast<double>(cap)) {
        throw CardinalityError("net has " + std::to_string(static_cast<long long>(count)) +
                                   " points, above the cap of " + std::to_string(cap),
                               count);
    }
    const std::size_t n = net.active.size();
    std::vector<long> half(n);
    for (std::size_t i = 0; i < n; ++i) half[i] = net.grid_half_count(net.active[i]);

    std::vector<CoefVec> out;
    std::vector<long> k(n);
    for (std::size_t i = 0; i < n; ++i) k[i] = -half[i];
    while (true) {
        CoefVec point;
        for (std::size_t i = 0; i < n; ++i) point.set(net.active[i], static_cast<double>(k[i]) * net.eps + 0.0);
        out.push_back(std::move(point));
        // Odometer step, last coordinate fastest.
        std::size_t i = n;
        while (i > 0 && k[i - 1] == half[i - 1]) --i;
        if (i == 0) return out;
        ++k[i - 1];
        for (std::size_t r = i; r < n; ++r) k[r] = -half[r];
    }
}

double net_log_cardinality(const NetSpec& net) {
    double acc = 0.0;
    for (const auto& j : net.active) acc += std::log(2.0 * static_cast<double>(net.grid_half_count(j)) + 1.0);
    return acc;
}

double grid_op_norm(const DiagonalOperator& op, const NetSpec& net) {
    double best = 0.0;
    for (const auto& j : net.active) {
        if (net.grid_half_count(j) >= 1) best = std::max(best, 1.0 / op.singular_value(j));
    }
    if (best == 0.0) throw DomainError("grid net has a single point; operator norm undefined");
    return best;
}

double covering_distance(const NetSpec& net, const CoefVec& theta) { return l2_dist(theta, quantize(net, theta)); }

CoefVec sample_ellipsoid_point(const NetSpec& net, std::uint64_t key) {
    CounterRng rng(key);
    const auto support = index_box(net.basis, net.M + 1);
    std::vector<double> z(support.size());
    double weighted = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        z[i] = rng.normal();
        const double a = ell_coeff(net.spec, support[i]);
        weighted += a * a * z[i] * z[i];
    }
    const double radius = net.spec.L * std::pow(rng.uniform(), 1.0 / static_cast<double>(support.size()));
    const double scale = weighted > 0.0 ? radius / std::sqrt(weighted) : 0.0;
    CoefVec theta;
    for (std::size_t i = 0; i < support.size(); ++i) theta.set(support[i], z[i] * scale);
    return theta;
}

double verify_covering(const NetSpec& net, std::size_t trials, std::uint64_t seed, const ExecPolicy& policy) {
    if (trials == 0) throw DomainError("verify_covering needs at least one trial");
    return parallel_max(policy, trials, [&](std::size_t i) {
        return covering_distance(net, sample_ellipsoid_point(net, mix_seed({seed, i})));
    });
}

// ---------------------------------------------------------------------------
// Packings

std::size_t hamming_distance(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    std::size_t h = 0;
    for (std::size_t i = 0; i < a.size(); ++i) h += static_cast<std::size_t>(std::popcount(a[i] ^ b[i]));
    return h;
}

CoefVec PackingSpec::point(std::size_t word) const {
    CoefVec p = theta_star;
    const auto& w = codebook.at(word);
    for (std::size_t i = 0; i < shell.size(); ++i) {
        const bool negative = (w[i / 64] >> (i % 64)) & 1U;
        p[shell[i]] += negative ? -gamma : gamma;
    }
    return p;
}

std::vector<CoefVec> PackingSpec::points() const {
    std::vector<CoefVec> out;
    out.reserve(codebook.size());
    for (std::size_t i = 0; i < codebook.size(); ++i) out.push_back(point(i));
    return out;
}

PackingSpec build_packing(const EllipsoidSpec& spec, const BasisId& basis, double delta, std::uint64_t seed,
                          const PackingOptions& options) {
    spec.validate();
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("packing scale delta must be positive");
    const double baseline = std::sqrt(ell_weighted_norm_sq(spec, options.theta_star));
    if (baseline >= spec.L) throw InfeasibleError("baseline theta* must lie strictly inside the ellipsoid");

    // Every point theta* + gamma sigma has weighted norm at most
    // baseline + a_max * gamma * sqrt(m) = baseline + a_max * delta.
    auto feasible = [&](int M) {
        const auto shell = shell_indices(basis, M, M / 2);
        return !shell.empty() && baseline + max_shell_coeff(spec, shell) * delta <= spec.L;
    };
    if (!feasible(1)) {
        const double a1 = max_shell_coeff(spec, shell_indices(basis, 1, 0));
        throw InfeasibleError("packing infeasible at delta = " + std::to_string(delta) +
                              "; feasible range is 0 < delta <= " + std::to_string((spec.L - baseline) / a1));
    }
    int M = 1;
    constexpr int kMaxLevel = 1 << 16;
    while (M < kMaxLevel && feasible(M + 1)) ++M;

    PackingSpec p;
    p.spec = spec;
    p.basis = basis;
    p.delta = delta;
    p.M = M;
    p.M_star = M / 2;
    p.shell = shell_indices(basis, M, p.M_star);
    p.theta_star = options.theta_star;
    p.seed = seed;
    const std::size_t m = p.shell.size();
    p.gamma = delta / std::sqrt(static_cast<double>(m));
    p.min_hamming = (m + 3) / 4;

    const std::size_t words = (m + 63) / 64;
    CounterRng rng(mix_seed({seed, m}));
    auto random_word = [&] {
        std::vector<std::uint64_t> w(words);
        for (std::size_t i = 0; i < words; ++i) w[i] = rng();
        if (m % 64 != 0) w.back() &= (std::uint64_t{1} << (m % 64)) - 1;
        return w;
    };
    std::size_t rejected = 0;
    while (p.codebook.size() < options.max_words && rejected < options.patience) {
        auto candidate = random_word();
        const bool far = std::all_of(p.codebook.begin(), p.codebook.end(),
                                     [&](const auto& w) { return hamming_distance(w, candidate) >= p.min_hamming; });
        if (far) {
            p.codebook.push_back(std::move(candidate));
            rejected = 0;
        } else {
            ++rejected;
        }
    }
    return p;
}

PackingCheck pairwise_extremes(const std::vector<CoefVec>& points, const ExecPolicy& policy) {
    if (points.size() < 2) throw DomainError("packing check needs at least two points");
    const auto dense = to_dense(points);
    const std::size_t n = dense.rows;
    PackingCheck check;
    check.count = n;
    check.min_dist = std::sqrt(parallel_min(policy, n - 1, [&](std::size_t a) {
        double row = std::numeric_limits<double>::infinity();
        for (std::size_t b = a + 1; b < n; ++b) row = std::min(row, weighted_dist_sq(dense.row(a), dense.row(b)));
        return row;
    }));
    check.max_dist = std::sqrt(parallel_max(policy, n - 1, [&](std::size_t a) {
        double row = 0.0;
        for (std::size_t b = a + 1; b < n; ++b) row = std::max(row, weighted_dist_sq(dense.row(a), dense.row(b)));
        return row;
    }));
    return check;
}

PackingCheck verify_packing(const PackingSpec& packing, const ExecPolicy& policy) {
    return pairwise_extremes(packing.points(), policy);
}

}  // namespace ermip
