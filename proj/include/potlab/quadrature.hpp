#pragma once

#include <functional>
#include <vector>

#include "potlab/real.hpp"

namespace potlab {

struct GaussRule {
    std::vector<Real> nodes;    // ascending on [-1, 1]
    std::vector<Real> weights;  // sum to 2
};

/// Gauss-Legendre rule of the given order at the current precision.
/// Rules are cached per (order, bits); the cache is thread-safe.
const GaussRule& gauss_legendre(int order);

/// Adaptive Gauss-Legendre integral of f over [a, b]: an interval is accepted
/// when the rule on it agrees with the rule on its two halves to `tol`
/// (absolute, scaled by max(1, |integral|)).
Real integrate_adaptive(const std::function<Real(const Real&)>& f, const Real& a, const Real& b, const Real& tol);

/// Rule order used by integrate_adaptive at the current precision.
int adaptive_rule_order();

}  // namespace potlab
