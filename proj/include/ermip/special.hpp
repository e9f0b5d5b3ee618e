#pragma once

namespace ermip {

/// Chebyshev polynomial of the second kind U_m(u), three-term recurrence.
double chebyshev_U(int m, double u);

/// Zernike radial polynomial R_a^b(r) from the explicit factorial sum.
/// Requires 0 <= b <= a and a - b even.
double zernike_radial(int a, int b, double r);

}  // namespace ermip
