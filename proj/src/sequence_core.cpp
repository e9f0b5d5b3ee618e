#include "ermip/sequence_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ermip/special.hpp"

namespace ermip {

namespace {

constexpr double kDomainSlack = 1e-12;

void check_unit_interval(double x, const char* what) {
    if (!(x >= -kDomainSlack && x <= 1.0 + kDomainSlack)) {
        throw DomainError(std::string(what) + " outside [0, 1]: " + std::to_string(x));
    }
}

// Real form of a complex mode with angular factor e^{i m angle}, m = j - k.
double real_angular(int j, int k, double angle) {
    const int m = j - k;
    if (j > k) return std::numbers::sqrt2 * std::cos(m * angle);
    if (j == k) return 1.0;
    return std::numbers::sqrt2 * std::sin(m * angle);
}

}  // namespace

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex::MultiIndex(std::span<const int> j) {
    if (j.empty() || j.size() > kMaxDim) {
        throw DomainError("MultiIndex dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    }
    dim_ = static_cast<std::uint8_t>(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i] < 0) throw DomainError("MultiIndex entries must be nonnegative");
        j_[i] = j[i];
    }
}

MultiIndex::MultiIndex(std::span<const int> j, std::span<const int> parity) : MultiIndex(j) {
    if (parity.size() != j.size()) throw DomainError("parity tuple length differs from index length");
    has_parity_ = true;
    for (std::size_t i = 0; i < parity.size(); ++i) {
        if (parity[i] != 0 && parity[i] != 1) throw DomainError("parity entries must be 0 or 1");
        if (parity[i] == 1 && j[i] == 0) throw DomainError("parity bit set on a zero coordinate");
        if (parity[i] == 1) parity_mask_ |= static_cast<std::uint8_t>(1U << i);
    }
}

MultiIndex::MultiIndex(std::initializer_list<int> j)
    : MultiIndex(std::span<const int>(j.begin(), j.size())) {}

MultiIndex MultiIndex::with_parity(std::initializer_list<int> j, std::initializer_list<int> parity) {
    return MultiIndex(std::span<const int>(j.begin(), j.size()),
                      std::span<const int>(parity.begin(), parity.size()));
}

int MultiIndex::total() const {
    int t = 0;
    for (std::size_t i = 0; i < dim_; ++i) t += j_[i];
    return t;
}

int MultiIndex::nonzero_count() const {
    int c = 0;
    for (std::size_t i = 0; i < dim_; ++i) c += j_[i] != 0;
    return c;
}

std::string MultiIndex::to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < dim_; ++i) os << (i ? "," : "") << j_[i];
    if (has_parity_) {
        os << '|';
        for (std::size_t i = 0; i < dim_; ++i) os << (i ? "," : "") << parity(i);
    }
    os << ')';
    return os.str();
}

MultiIndex MultiIndex::parse(const std::string& text) {
    auto fail = [&] { return DomainError("malformed multi-index '" + text + "'"); };
    if (text.size() < 3 || text.front() != '(' || text.back() != ')') throw fail();
    const std::string body = text.substr(1, text.size() - 2);
    const auto bar = body.find('|');
    auto parse_list = [&](const std::string& s) {
        std::vector<int> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            std::size_t used = 0;
            int v = 0;
            try {
                v = std::stoi(tok, &used);
            } catch (const std::exception&) {
                throw fail();
            }
            if (used != tok.size()) throw fail();
            out.push_back(v);
        }
        return out;
    };
    const auto j = parse_list(body.substr(0, bar));
    if (bar == std::string::npos) return MultiIndex(std::span<const int>(j));
    const auto k = parse_list(body.substr(bar + 1));
    return MultiIndex(std::span<const int>(j), std::span<const int>(k));
}

// ---------------------------------------------------------------------------
// EllipsoidSpec

void EllipsoidSpec::validate() const {
    if (d < 1 || d > static_cast<int>(kMaxDim)) throw DomainError("ellipsoid dimension out of range");
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("ellipsoid smoothness must be positive");
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("ellipsoid radius must be positive");
}

double ell_coeff(const EllipsoidSpec& spec, const MultiIndex& j) {
    return std::pow(static_cast<double>(std::max(1, j.total())), spec.s);
}

double ell_weighted_norm_sq(const EllipsoidSpec& spec, const CoefVec& theta) {
    double acc = 0.0;
    for (const auto& [j, v] : theta) {
        const double a = ell_coeff(spec, j);
        acc += a * a * v * v;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// CoefVec

double CoefVec::get(const MultiIndex& j) const {
    const auto it = entries_.find(j);
    return it == entries_.end() ? 0.0 : it->second;
}

double CoefVec::norm_sq() const {
    double acc = 0.0;
    for (const auto& [j, v] : entries_) acc += v * v;
    return acc;
}

double CoefVec::norm() const { return std::sqrt(norm_sq()); }

CoefVec CoefVec::pruned() const {
    CoefVec out;
    for (const auto& [j, v] : entries_) {
        if (v != 0.0) out.entries_.emplace_hint(out.entries_.end(), j, v);
    }
    return out;
}

CoefVec& CoefVec::operator+=(const CoefVec& other) {
    for (const auto& [j, v] : other) entries_[j] += v;
    return *this;
}

CoefVec& CoefVec::operator-=(const CoefVec& other) {
    for (const auto& [j, v] : other) entries_[j] -= v;
    return *this;
}

CoefVec& CoefVec::operator*=(double scale) {
    for (auto& [j, v] : entries_) v *= scale;
    return *this;
}

bool CoefVec::same_sequence(const CoefVec& other) const {
    for (const auto& [j, v] : entries_) {
        if (other.get(j) != v) return false;
    }
    for (const auto& [j, v] : other) {
        if (get(j) != v) return false;
    }
    return true;
}

double l2_dist(const CoefVec& a, const CoefVec& b) {
    // Merge walk over the two ordered supports.
    double acc = 0.0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        double diff = 0.0;
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            diff = ia->second;
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            diff = -ib->second;
            ++ib;
        } else {
            diff = ia->second - ib->second;
            ++ia;
            ++ib;
        }
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

// ---------------------------------------------------------------------------
// BasisId

bool BasisId::admits(const MultiIndex& j) const {
    if (static_cast<int>(j.dim()) != d) return false;
    switch (kind) {
        case BasisKind::sequence:
            return !j.has_parity();
        case BasisKind::fourier_periodic:
            return true;  // missing parity reads as all-cosine
        case BasisKind::zernike_disk:
        case BasisKind::chebyshev_halfplane:
            return d == 2 && !j.has_parity();
        case BasisKind::additive_component:
            if (j.parity_mask() != 0 || j.nonzero_count() != 1) return false;
            return j[static_cast<std::size_t>(axis)] >= 1;
    }
    return false;
}

MultiIndex BasisId::canonical(const MultiIndex& j) const {
    if ((kind != BasisKind::fourier_periodic && kind != BasisKind::additive_component) || j.has_parity()) return j;
    std::vector<int> idx(j.dim());
    std::vector<int> parity(j.dim(), 0);
    for (std::size_t i = 0; i < j.dim(); ++i) idx[i] = j[i];
    return MultiIndex{std::span<const int>(idx), std::span<const int>(parity)};
}

CoefVec BasisId::canonical(const CoefVec& c) const {
    CoefVec out;
    for (const auto& [j, v] : c) {
        const auto key = canonical(j);
        if (out.contains(key)) throw DomainError("index " + key.to_string() + " given twice");
        out.set(key, v);
    }
    return out;
}

std::string BasisId::name() const {
    switch (kind) {
        case BasisKind::sequence: return "sequence(" + std::to_string(d) + ")";
        case BasisKind::fourier_periodic: return "fourier_periodic(" + std::to_string(d) + ")";
        case BasisKind::zernike_disk: return "zernike_disk";
        case BasisKind::chebyshev_halfplane: return "chebyshev_halfplane";
        case BasisKind::additive_component:
            return "additive_component(" + std::to_string(d) + "," + std::to_string(axis) + ")";
    }
    return "unknown";
}

std::vector<MultiIndex> index_box(const BasisId& basis, int M) {
    if (M < 0) throw DomainError("index box level must be nonnegative");
    std::vector<MultiIndex> out;
    const auto d = static_cast<std::size_t>(basis.d);

    if (basis.kind == BasisKind::additive_component) {
        std::vector<int> j(d, 0);
        std::vector<int> k(d, 0);
        for (int level = 1; level <= M; ++level) {
            j[static_cast<std::size_t>(basis.axis)] = level;
            out.emplace_back(std::span<const int>(j), std::span<const int>(k));
        }
        return out;
    }

    std::vector<int> j(d, 0);
    while (true) {
        if (basis.kind == BasisKind::fourier_periodic) {
            // Expand over parity tuples allowed by the zero pattern of j.
            const int nz = MultiIndex(std::span<const int>(j)).nonzero_count();
            for (int mask = 0; mask < (1 << nz); ++mask) {
                std::vector<int> k(d, 0);
                int bit = 0;
                for (std::size_t i = 0; i < d; ++i) {
                    if (j[i] != 0) k[i] = (mask >> bit++) & 1;
                }
                out.emplace_back(std::span<const int>(j), std::span<const int>(k));
            }
        } else {
            out.emplace_back(std::span<const int>(j));
        }
        std::size_t i = 0;
        while (i < d && j[i] == M) j[i++] = 0;
        if (i == d) break;
        ++j[i];
    }
    std::sort(out.begin(), out.end());
    return out;
}

double basis_eval(const BasisId& basis, const MultiIndex& index, std::span<const double> x) {
    if (!basis.admits(index)) {
        throw DomainError("index " + index.to_string() + " is not part of basis " + basis.name());
    }
    switch (basis.kind) {
        case BasisKind::sequence:
            throw DomainError("sequence basis has no pointwise form");

        case BasisKind::fourier_periodic: {
            if (x.size() != static_cast<std::size_t>(basis.d)) throw DomainError("point dimension mismatch");
            double value = 1.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                check_unit_interval(x[i], "Fourier coordinate");
                const int ji = index[i];
                if (ji == 0) continue;
                const double arg = 2.0 * std::numbers::pi * ji * x[i];
                value *= std::numbers::sqrt2 * (index.parity(i) ? std::sin(arg) : std::cos(arg));
            }
            return value;
        }

        case BasisKind::additive_component: {
            if (x.size() != static_cast<std::size_t>(basis.d)) throw DomainError("point dimension mismatch");
            const auto axis = static_cast<std::size_t>(basis.axis);
            check_unit_interval(x[axis], "additive coordinate");
            return std::numbers::sqrt2 * std::cos(2.0 * std::numbers::pi * index[axis] * x[axis]);
        }

        case BasisKind::zernike_disk: {
            if (x.size() != 2) throw DomainError("disk point must be (r, angle)");
            check_unit_interval(x[0], "disk radius");
            const int j = index[0];
            const int k = index[1];
            const double radial = zernike_radial(j + k, std::abs(j - k), std::min(x[0], 1.0));
            return std::sqrt((j + k + 1) / std::numbers::pi) * radial * real_angular(j, k, x[1]);
        }

        case BasisKind::chebyshev_halfplane: {
            if (x.size() != 2) throw DomainError("Radon point must be (u, phi)");
            check_unit_interval(x[0], "Radon offset u");
            const int j = index[0];
            const int k = index[1];
            return std::numbers::inv_sqrtpi * chebyshev_U(j + k, std::min(x[0], 1.0)) *
                   real_angular(j, k, x[1]);
        }
    }
    return 0.0;
}

double coef_eval(const BasisId& basis, const CoefVec& c, std::span<const double> x) {
    double acc = 0.0;
    for (const auto& [j, v] : c) {
        if (v != 0.0) acc += v * basis_eval(basis, j, x);
    }
    return acc;
}

}  // namespace ermip
