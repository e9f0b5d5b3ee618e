#include "ermip/special.hpp"

#include <cmath>

#include "ermip/error.hpp"

namespace ermip {

double chebyshev_U(int m, double u) {
    if (m < 0) throw DomainError("Chebyshev degree must be nonnegative");
    double prev = 1.0;  // U_0
    if (m == 0) return prev;
    double cur = 2.0 * u;  // U_1
    for (int k = 2; k <= m; ++k) {
        const double next = 2.0 * u * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double zernike_radial(int a, int b, double r) {
    if (b < 0 || b > a) throw DomainError("Zernike order must satisfy 0 <= b <= a");
    if ((a - b) % 2 != 0) throw DomainError("Zernike degree and order must have equal parity");
    // R_a^b(r) = sum_l (-1)^l (a-l)! / [l! ((a+b)/2-l)! ((a-b)/2-l)!] r^{a-2l}
    double acc = 0.0;
    for (int l = 0; l <= (a - b) / 2; ++l) {
        const double log_coef = std::lgamma(a - l + 1.0) - std::lgamma(l + 1.0) -
                                std::lgamma((a + b) / 2 - l + 1.0) - std::lgamma((a - b) / 2 - l + 1.0);
        const double coef = std::round(std::exp(log_coef));
        acc += (l % 2 ? -coef : coef) * std::pow(r, a - 2 * l);
    }
    return acc;
}

}  // namespace ermip
