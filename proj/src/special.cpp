#include "potlab/special.hpp"

#include <cmath>
#include <numbers>

namespace potlab {

Complex phi(const Complex& z) {
    const Complex w = sqrt(z - Complex(1)) * sqrt(z + Complex(1));
    Complex plus = z + w;
    Complex minus = z - w;
    // Exactly one of z +- w lies outside the closed unit disk off the segment.
    if (norm(minus) > norm(plus)) return minus;
    return plus;
}

cdouble phi(cdouble z) {
    const cdouble w = std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
    const cdouble plus = z + w;
    const cdouble minus = z - w;
    return std::norm(minus) > std::norm(plus) ? minus : plus;
}

Complex chebyshev_monic(int n, const Complex& z) {
    const Complex f = phi(z);
    const Complex fn = pow(f, static_cast<long>(n));
    const Complex sum = fn + Complex(Real(1)) / fn;
    return {ldexp(sum.re, -n), ldexp(sum.im, -n)};
}

cdouble chebyshev_monic(int n, cdouble z) {
    const cdouble fn = std::pow(phi(z), n);
    return std::ldexp(1.0, -n) * (fn + 1.0 / fn);
}

Real equilibrium_potential_segment(const Complex& z) {
    if (z.im.is_zero() && abs(z.re) <= Real(1)) return Real::ln2();
    return Real::ln2() - log_abs(phi(z));
}

double equilibrium_potential_segment(cdouble z) {
    if (z.imag() == 0.0 && std::abs(z.real()) <= 1.0) return std::numbers::ln2;
    return std::numbers::ln2 - std::log(std::abs(phi(z)));
}

Real equilibrium_potential_circle(const Complex& z) {
    const Real r = abs(z);
    if (r <= Real(1)) return Real(0);
    return -log(r);
}

double equilibrium_potential_circle(cdouble z) {
    const double r = std::abs(z);
    return r <= 1.0 ? 0.0 : -std::log(r);
}

Real arcsine_cdf(const Real& x) {
    if (x <= Real(-1)) return Real(0);
    if (x >= Real(1)) return Real(1);
    return Real(0.5) + asin(x) / Real::pi();
}

std::vector<double> chebyshev_zeros(int n) {
    std::vector<double> zeros(static_cast<size_t>(n));
    for (int k = 1; k <= n; ++k) {
        zeros[static_cast<size_t>(n - k)] = std::cos((2.0 * k - 1.0) * std::numbers::pi / (2.0 * n));
    }
    return zeros;
}

}  // namespace potlab
