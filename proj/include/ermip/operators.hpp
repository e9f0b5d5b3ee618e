#pragma once

// Linear operators with a known diagonal SVD, expressed in sequence space:
// A phi_j = b_j u_j and Q = (A^{-1})^* with Q phi_j = b_j^{-1} u_j.

#include <optional>
#include <span>
#include <vector>

#include "ermip/parallel.hpp"
#include "ermip/sequence_core.hpp"
#include "ermip/special.hpp"

namespace ermip {

enum class OperatorKind { identity, convolution, radon2d };

/// Prefactor applied to the chord integral in the Radon forward map.
///   inverse_pi_average: Af = (1/pi) * mean of f over the chord. This is the
///     scaling under which the singular values are pi^{-1} (j+k+1)^{-1/2}.
///   pi_average: Af = pi * mean of f over the chord; singular values then
///     carry an extra factor pi^2.
enum class ChordNormalization { inverse_pi_average, pi_average };

class DiagonalOperator {
public:
    static DiagonalOperator identity(const BasisId& basis);
    /// Periodic convolution on [0,1]^d with b_j = max(1, |j|)^{-q}.
    static DiagonalOperator convolution(int d, double q);
    /// Periodic convolution with an even kernel a = sum_j c_j phi_j given by
    /// its cosine-only Fourier coefficients c_j. The singular value of any
    /// index j is c_{cos(j)} * 2^{-nz(j)/2}, nz = number of nonzero coordinates.
    static DiagonalOperator convolution_kernel(int d, CoefVec kernel_coefficients);
    /// Convolution acting on additive functions: an index supported on axis k
    /// has b = max(1, j_k)^{-q_k}; the constant index has b = 1.
    static DiagonalOperator additive_convolution(std::vector<double> axis_q);
    static DiagonalOperator radon2d();

    OperatorKind kind() const { return kind_; }
    const BasisId& input_basis() const { return input_basis_; }
    BasisId output_basis() const;
    /// Identity and convolution share the input basis as output basis, so
    /// Q phi_j = b_j^{-1} phi_j pointwise.
    bool self_basis() const { return kind_ != OperatorKind::radon2d; }
    double q() const { return q_; }
    const std::vector<double>& axis_q() const { return axis_q_; }
    const std::optional<CoefVec>& kernel() const { return kernel_; }

    double singular_value(const MultiIndex& j) const;

private:
    OperatorKind kind_ = OperatorKind::identity;
    BasisId input_basis_ = BasisId::sequence(1);
    double q_ = 0.0;
    std::vector<double> axis_q_;
    std::optional<CoefVec> kernel_;
};

inline double singular_value(const DiagonalOperator& op, const MultiIndex& j) {
    return op.singular_value(j);
}

/// Coefficients {b_j theta_j} of A f in the output system.
CoefVec apply_A_seq(const DiagonalOperator& op, const CoefVec& theta);

/// Coefficients {b_j^{-1} c_j} of Q g. Throws DomainError on a non-finite result.
CoefVec apply_Q_seq(const DiagonalOperator& op, const CoefVec& c);

/// (Q g)(y) = sum_j c_j b_j^{-1} phi_j(y) for self-basis operators.
double q_point_eval(const DiagonalOperator& op, const CoefVec& c, std::span<const double> y);

/// (A f)(y) = sum_j theta_j b_j phi_j(y) for self-basis operators.
double a_point_eval(const DiagonalOperator& op, const CoefVec& theta, std::span<const double> y);

// ---------------------------------------------------------------------------
// Radon transform on the unit disk

struct RadonGeometry {
    /// Density of nu on Y = [0,1] x [0, 2pi): 2/pi * sqrt(1 - u^2).
    static double measure_density(double u);
    /// Total mass of nu by Gauss-Legendre in u (exact value pi).
    static double total_mass(std::size_t order = 64);
};

/// A f(u, phi) by Gauss-Legendre quadrature along the chord at offset u and
/// normal angle phi, t in [-sqrt(1-u^2), sqrt(1-u^2)]. f is in the Zernike basis.
double radon_forward_quadrature(const CoefVec& f, double u, double phi, int order = 64,
                                ChordNormalization norm = ChordNormalization::inverse_pi_average);

// ---------------------------------------------------------------------------
// Operator norms over finite sets

/// max over distinct pairs of ||Q(phi - phi')|| / ||phi - phi'||.
double op_norm_rho(const DiagonalOperator& op, std::span<const CoefVec> net,
                   const ExecPolicy& policy = ExecPolicy::serial());

enum class StatModel { white_noise, density };

struct DensityQuadrature {
    int points_per_axis = 512;
};

/// White noise: (1/sqrt 2) max pairs ||A(f-g)|| / ||f-g||.
/// Density: max pairs D_K(Af, Ag) / ||f-g|| with D_K by grid quadrature.
double rho_K(const DiagonalOperator& op, std::span<const CoefVec> packing, StatModel model,
             const ExecPolicy& policy = ExecPolicy::serial(), DensityQuadrature quad = {});

/// D_K(f, g) = sqrt(int log(f/g) f) over [0,1]^d by tensor midpoint quadrature.
/// f and g are coefficient vectors in `basis`; d <= 2.
double kl_distance(const BasisId& basis, const CoefVec& f, const CoefVec& g,
                   int points_per_axis = 512);

}  // namespace ermip
