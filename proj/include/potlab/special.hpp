#pragma once

// Conformal map of the exterior of [-1,1], monic Chebyshev polynomials and the
// closed-form equilibrium quantities of the segment and the unit circle.

#include <complex>
#include <vector>

#include "potlab/real.hpp"

namespace potlab {

using cdouble = std::complex<double>;

/// z + (z^2-1)^{1/2} on the branch with (z^2-1)^{1/2}/z -> 1 at infinity.
/// On [-1,1] the boundary value from the upper half plane is returned (|phi| = 1).
Complex phi(const Complex& z);
cdouble phi(cdouble z);

/// Monic Chebyshev polynomial 2^{-n} (phi^n + phi^{-n}), n >= 1.
Complex chebyshev_monic(int n, const Complex& z);
cdouble chebyshev_monic(int n, cdouble z);

/// log 2 - log|phi(z)|; equals log 2 on the segment.
Real equilibrium_potential_segment(const Complex& z);
double equilibrium_potential_segment(cdouble z);

/// -log|z| for |z| >= 1, 0 inside the disk.
Real equilibrium_potential_circle(const Complex& z);
double equilibrium_potential_circle(cdouble z);

/// 1/2 + arcsin(x)/pi, clamped to [0,1] outside the segment.
Real arcsine_cdf(const Real& x);

/// Zeros cos((2k-1) pi / (2n)) of the degree-n Chebyshev polynomial, ascending.
std::vector<double> chebyshev_zeros(int n);

}  // namespace potlab
