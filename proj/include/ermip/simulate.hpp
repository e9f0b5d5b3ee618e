#pragma once

// Observations under the two statistical models, the empirical risk gamma_n
// and the centered empirical operator nu_n.

#include <cstdint>
#include <vector>

#include "ermip/operators.hpp"
#include "ermip/sequence_core.hpp"

namespace ermip {

/// Sequence form of dY_n = Af dy + n^{-1/2} dW: y_j = theta_j + n^{-1/2} b_j^{-1} xi_j.
struct WhiteNoiseObs {
    CoefVec y;
    double n = 0.0;
    std::vector<MultiIndex> active;  // sorted
    CoefVec xi;                      // the standard normal draws, kept for oracles
    CoefVec theta_true;
    std::uint64_t seed = 0;
};

enum class NoiseMode { gaussian, zero };

/// xi_j comes from its own stream keyed by (seed, index), so two observations
/// with the same seed share noise on the indices they have in common.
WhiteNoiseObs simulate_white_noise(const DiagonalOperator& op, const CoefVec& theta_true, double n,
                                   const std::vector<MultiIndex>& active, std::uint64_t seed,
                                   NoiseMode noise = NoiseMode::gaussian);

/// 64-bit key of an index, used to derive per-coordinate noise streams.
std::uint64_t index_hash(const MultiIndex& j);

/// -2 sum c_j y_j + sum c_j^2. Throws if c has a nonzero entry off the active box.
double empirical_risk(const WhiteNoiseObs& obs, const CoefVec& c);

/// nu_n(Qg) = sum c_j (y_j - theta_j), using the stored truth.
double nu_n(const WhiteNoiseObs& obs, const CoefVec& g);

// ---------------------------------------------------------------------------
// Density model

struct DensitySample {
    std::vector<Point> points;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t proposals = 0;  // rejection-sampler draws used
};

struct DensitySamplerOptions {
    int check_points = 4096;  // total size of the positivity/envelope grid
    double envelope_inflation = 1.01;
    double mass_tolerance = 1e-8;
};

/// i.i.d. draws from A f by rejection from the uniform law on [0,1]^d.
/// Requires a self-basis operator on a periodic basis and d <= 2.
DensitySample sample_density(const DiagonalOperator& op, const CoefVec& theta_true, std::size_t n,
                             std::uint64_t seed, const DensitySamplerOptions& options = {});

/// z_j = n^{-1} sum_i (Q phi_j)(Y_i) for every j in `indices`.
CoefVec density_statistics(const DensitySample& sample, const DiagonalOperator& op,
                           const std::vector<MultiIndex>& indices);

/// -2 n^{-1} sum_i (Qg)(Y_i) + ||c||^2, evaluated pointwise.
double empirical_risk(const DensitySample& sample, const DiagonalOperator& op, const CoefVec& c);

/// n^{-1} sum_i (Qg)(Y_i) - int (Qg)(Af), the integral by midpoint quadrature.
double nu_n(const DensitySample& sample, const DiagonalOperator& op, const CoefVec& theta_true, const CoefVec& g,
            int points_per_axis = 512);

/// Values of A f on the tensor midpoint grid with `points_per_axis` nodes (d <= 2).
std::vector<double> density_on_grid(const DiagonalOperator& op, const CoefVec& theta, int points_per_axis);

}  // namespace ermip
