#pragma once

// delta-nets and delta-packings of Sobolev ellipsoids in sequence space.
//
// The net is truncate-then-quantize: indices outside the box {0..M}^d are set
// to zero (tail error <= L (M+1)^{-s} <= delta/sqrt 2) and each active
// coordinate is rounded onto eps * Z within [-L/a_j, L/a_j]
// (error <= eps/2 * sqrt(N_active) = delta/sqrt 2).

#include <cstdint>
#include <vector>

#include "ermip/operators.hpp"
#include "ermip/parallel.hpp"
#include "ermip/sequence_core.hpp"

namespace ermip {

struct NetSpec {
    EllipsoidSpec spec;
    BasisId basis;
    double delta = 0.0;
    int M = 0;
    double eps = 0.0;
    std::vector<MultiIndex> active;  // sorted

    /// A net with explicit truncation level and grid step (no budget checks).
    static NetSpec manual(const EllipsoidSpec& spec, const BasisId& basis, int M, double eps, double delta = 0.0);

    std::size_t active_count() const { return active.size(); }
    /// L / a_j
    double box_bound(const MultiIndex& j) const;
    /// floor(L / (a_j eps)): grid values are k * eps for |k| <= this.
    long grid_half_count(const MultiIndex& j) const;
};

/// M = smallest integer with L (M+1)^{-s} <= delta/sqrt 2,
/// eps = delta sqrt 2 / sqrt(N_active).
NetSpec build_net(const EllipsoidSpec& spec, const BasisId& basis, double delta);

/// Nearest grid value to y (half-grid ties round toward zero), clamped to
/// the grid range |k| <= half_count.
double quantize_coordinate(double y, double eps, long half_count);

/// Nearest net point to y: coordinate-wise rounding on the active box, zero
/// elsewhere.
CoefVec quantize(const NetSpec& net, const CoefVec& y);

/// Every net point, in lexicographic order of grid offsets. Throws
/// CardinalityError (carrying the exact count) if the net exceeds `cap`.
std::vector<CoefVec> enumerate_net(const NetSpec& net, std::size_t cap);

/// log(#net) = sum over active j of log(2 floor(L/(a_j eps)) + 1).
double net_log_cardinality(const NetSpec& net);

/// rho(Q, F_delta) for a grid net: the largest b_j^{-1} over active indices
/// whose grid has more than one value. Throws if every coordinate is pinned to 0.
double grid_op_norm(const DiagonalOperator& op, const NetSpec& net);

/// ||theta - quantize(theta)||_2.
double covering_distance(const NetSpec& net, const CoefVec& theta);

/// Draw from the ellipsoid restricted to the active box plus the first shell
/// beyond it: spherically symmetric direction, scaled to weighted norm
/// L * u^{1/N} with u uniform.
CoefVec sample_ellipsoid_point(const NetSpec& net, std::uint64_t key);

/// Largest covering distance over `trials` sampled ellipsoid points. Trial i
/// uses the substream mix_seed({seed, i}).
double verify_covering(const NetSpec& net, std::size_t trials, std::uint64_t seed,
                       const ExecPolicy& policy = ExecPolicy::serial());

// ---------------------------------------------------------------------------
// Packings

struct PackingOptions {
    CoefVec theta_star;                  // baseline, default 0
    std::size_t max_words = 20000;       // codebook size cap
    std::size_t patience = 4000;         // consecutive rejected candidates before stopping
};

struct PackingSpec {
    EllipsoidSpec spec;
    BasisId basis;
    double delta = 0.0;
    int M = 0;
    int M_star = 0;
    std::vector<MultiIndex> shell;       // indices with every coordinate in [M*, M]
    CoefVec theta_star;
    double gamma = 0.0;                  // delta / sqrt(m)
    std::size_t min_hamming = 0;         // ceil(m / 4)
    std::vector<std::vector<std::uint64_t>> codebook;  // sign words, bit set = -1
    std::uint64_t seed = 0;

    std::size_t shell_size() const { return shell.size(); }
    CoefVec point(std::size_t word) const;
    std::vector<CoefVec> points() const;
};

/// Largest M whose shell keeps every packing point inside the ellipsoid
/// (sqrt(weighted(theta*)) + a_max(shell) * delta <= L), then a greedy
/// Varshamov-Gilbert codebook over {-1,+1}^m with pairwise Hamming distance
/// >= m/4 from seeded random candidates. Points theta* + gamma * sigma.
PackingSpec build_packing(const EllipsoidSpec& spec, const BasisId& basis, double delta, std::uint64_t seed,
                          const PackingOptions& options = {});

struct PackingCheck {
    double min_dist = 0.0;
    double max_dist = 0.0;
    std::size_t count = 0;
};

/// Exact pairwise distance extremes by brute force over all pairs.
PackingCheck verify_packing(const PackingSpec& packing, const ExecPolicy& policy = ExecPolicy::serial());
PackingCheck pairwise_extremes(const std::vector<CoefVec>& points, const ExecPolicy& policy = ExecPolicy::serial());

std::size_t hamming_distance(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b);

}  // namespace ermip
