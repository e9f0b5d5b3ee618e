#pragma once

// Independent quadrature oracles for the closed-form SVDs. Each returns the
// worst absolute deviation it found; the callers decide the tolerance.

#include <cstddef>
#include <functional>
#include <vector>

#include "ermip/operators.hpp"
#include "ermip/parallel.hpp"
#include "ermip/sequence_core.hpp"

namespace ermip {

struct OracleResult {
    double max_error = 0.0;
    std::size_t checks = 0;
};

/// max |<phi_a, phi_b> - delta_ab| over all pairs of basis elements with
/// |j| <= max_total. Fourier/additive: midpoint rule with `resolution` points
/// per axis. Disk: Gauss-Legendre in r times `resolution` angles. Radon output
/// space: Gauss-Legendre in arccos(u) times `resolution` angles, measure nu.
OracleResult gram_orthonormality(const BasisId& basis, int max_total, int resolution,
                                 const ExecPolicy& policy = ExecPolicy::serial());

using SingularValueFn = std::function<double(const MultiIndex&)>;

struct RadonOracleOptions {
    int max_total = 6;        // all real Zernike indices with j + k <= max_total
    int u_points = 8;         // test offsets in (0, 0.97]
    int phi_points = 8;       // test angles in [0, 2 pi)
    int order = 64;           // chord quadrature order
    ChordNormalization normalization = ChordNormalization::inverse_pi_average;
};

/// max |A phi_jk (u, phi) - b_jk psi_jk(u, phi)| where A is the chord
/// quadrature and b_jk comes from `singular_value` (default: the Radon rule).
OracleResult radon_svd_oracle(const RadonOracleOptions& options = {},
                              const SingularValueFn& singular_value = {},
                              const ExecPolicy& policy = ExecPolicy::serial());

struct ConvolutionOracleOptions {
    int max_index = 8;
    int x_points = 64;
    int quadrature_points = 256;
};

/// d = 1: direct periodic convolution a * phi_j by the midpoint rule versus
/// b_j phi_j, for all Fourier indices j <= max_index, with a the kernel of `op`.
OracleResult convolution_oracle(const DiagonalOperator& op, const ConvolutionOracleOptions& options = {},
                                const ExecPolicy& policy = ExecPolicy::serial());

}  // namespace ermip
