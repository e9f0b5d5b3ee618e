#pragma once

// Shared vocabulary: multi-indices, Sobolev ellipsoids, sparse coefficient
// vectors and the orthonormal bases they are expressed in.

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ermip/error.hpp"

namespace ermip {

inline constexpr std::size_t kMaxDim = 4;

/// A d-tuple of nonnegative integers, optionally tagged with a sine/cosine
/// parity bit per coordinate (Fourier basis only). Parity bits must be zero on
/// coordinates where the index is zero.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(std::span<const int> j);
    MultiIndex(std::span<const int> j, std::span<const int> parity);
    MultiIndex(std::initializer_list<int> j);

    static MultiIndex with_parity(std::initializer_list<int> j,
                                  std::initializer_list<int> parity);

    std::size_t dim() const { return dim_; }
    int operator[](std::size_t i) const { return j_[i]; }
    bool has_parity() const { return has_parity_; }
    int parity(std::size_t i) const { return (parity_mask_ >> i) & 1U; }
    std::uint8_t parity_mask() const { return parity_mask_; }

    /// |j| = j_1 + ... + j_d
    int total() const;
    /// Number of nonzero coordinates.
    int nonzero_count() const;

    std::string to_string() const;
    /// Inverse of to_string; throws DomainError on malformed text.
    static MultiIndex parse(const std::string& text);

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
    std::array<int, kMaxDim> j_{};
    std::uint8_t dim_ = 0;
    std::uint8_t parity_mask_ = 0;
    bool has_parity_ = false;
};

/// Sobolev ellipsoid {theta : sum a_j^2 theta_j^2 <= L^2} with
/// a_j = max(1, |j|)^s.
struct EllipsoidSpec {
    int d = 1;
    double s = 1.0;
    double L = 1.0;

    void validate() const;
};

/// Finitely supported coefficient vector. Absent indices are zero. Ordered
/// storage keeps every reduction over entries in a fixed order.
class CoefVec {
public:
    using Map = std::map<MultiIndex, double>;

    CoefVec() = default;
    CoefVec(std::initializer_list<Map::value_type> entries) : entries_(entries) {}

    double get(const MultiIndex& j) const;
    void set(const MultiIndex& j, double value) { entries_[j] = value; }
    double& operator[](const MultiIndex& j) { return entries_[j]; }
    bool contains(const MultiIndex& j) const { return entries_.contains(j); }
    void erase(const MultiIndex& j) { entries_.erase(j); }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const Map& entries() const { return entries_; }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    double norm_sq() const;
    double norm() const;
    /// Copy with explicit zeros removed.
    CoefVec pruned() const;

    CoefVec& operator+=(const CoefVec& other);
    CoefVec& operator-=(const CoefVec& other);
    CoefVec& operator*=(double scale);
    friend CoefVec operator+(CoefVec a, const CoefVec& b) { return a += b; }
    friend CoefVec operator-(CoefVec a, const CoefVec& b) { return a -= b; }
    friend CoefVec operator*(double scale, CoefVec a) { return a *= scale; }

    /// Equality of represented sequences (missing index == 0).
    bool same_sequence(const CoefVec& other) const;

private:
    Map entries_;
};

enum class BasisKind {
    sequence,             // abstract orthonormal system indexed by N^d, coordinates only
    fourier_periodic,     // real trigonometric basis on [0,1]^d with parity tags
    zernike_disk,         // real Zernike basis on the unit disk, index (j, k)
    chebyshev_halfplane,  // real Chebyshev-U x trig basis on Y = [0,1] x [0, 2pi)
    additive_component,   // sqrt(2) cos(2 pi j x_axis), j >= 1, embedded in d dims
};

struct BasisId {
    BasisKind kind = BasisKind::sequence;
    int d = 1;
    int axis = 0;  // additive_component only

    static BasisId sequence(int d) { return {BasisKind::sequence, d, 0}; }
    static BasisId fourier(int d) { return {BasisKind::fourier_periodic, d, 0}; }
    static BasisId zernike() { return {BasisKind::zernike_disk, 2, 0}; }
    static BasisId chebyshev_halfplane() { return {BasisKind::chebyshev_halfplane, 2, 0}; }
    static BasisId additive(int d, int axis) { return {BasisKind::additive_component, d, axis}; }

    /// Whether j is a valid index of this basis.
    bool admits(const MultiIndex& j) const;
    /// The key this basis stores j under: Fourier and additive indices always
    /// carry parity bits, so "(1)" becomes "(1|0)".
    MultiIndex canonical(const MultiIndex& j) const;
    CoefVec canonical(const CoefVec& c) const;
    std::string name() const;

    friend bool operator==(const BasisId&, const BasisId&) = default;
};

/// Every index of `basis` whose coordinates are all <= M (the box {0..M}^d,
/// with parity expansion for Fourier and j >= 1 for additive components).
/// Sorted ascending.
std::vector<MultiIndex> index_box(const BasisId& basis, int M);

/// a_j = max(1, |j|)^s
double ell_coeff(const EllipsoidSpec& spec, const MultiIndex& j);

/// sum_j a_j^2 theta_j^2
double ell_weighted_norm_sq(const EllipsoidSpec& spec, const CoefVec& theta);

inline bool in_ellipsoid(const EllipsoidSpec& spec, const CoefVec& theta, double rel_tol = 1e-12) {
    return ell_weighted_norm_sq(spec, theta) <= spec.L * spec.L * (1.0 + rel_tol);
}

/// L2 distance of the represented functions (Parseval), union of supports.
double l2_dist(const CoefVec& a, const CoefVec& b);

/// A point in the basis domain: Cartesian x in [0,1]^d for Fourier/additive,
/// polar (r, angle) for the disk, (u, phi) for the Radon output space.
using Point = std::vector<double>;

/// Value of basis element `index` at `x`. Throws DomainError if x is outside
/// the domain or the basis has no pointwise form.
double basis_eval(const BasisId& basis, const MultiIndex& index, std::span<const double> x);

/// sum_j c_j phi_j(x)
double coef_eval(const BasisId& basis, const CoefVec& c, std::span<const double> x);

}  // namespace ermip
