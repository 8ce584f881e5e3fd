#include "potlab/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include "potlab/errors.hpp"

namespace potlab {

namespace {

// Newton iteration on the Legendre three-term recurrence, started from the
// Tricomi approximation of each node.
std::unique_ptr<GaussRule> build_rule(int order) {
    auto rule = std::make_unique<GaussRule>();
    rule->nodes.resize(static_cast<size_t>(order));
    rule->weights.resize(static_cast<size_t>(order));
    const Real pi = Real::pi();
    const Real tol = ldexp(Real(1), -static_cast<long>(PrecisionContext::current()) + 4);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // i-th largest node.
        Real x = cos(pi * Real(4 * i + 3) / Real(4 * order + 2));
        Real dp;
        for (int iter = 0; iter < 200; ++iter) {
            Real p0(1);
            Real p1 = x;
            for (int k = 2; k <= order; ++k) {
                Real p2 = (Real(2 * k - 1) * x * p1 - Real(k - 1) * p0) / Real(k);
                p0 = std::move(p1);
                p1 = std::move(p2);
            }
            if (order == 1) p0 = Real(1);
            dp = Real(order) * (x * p1 - p0) / (x * x - Real(1));
            const Real step = p1 / dp;
            x -= step;
            if (abs(step) <= tol) {
                if (iter > 0) break;
            }
        }
        // Recompute the derivative at the converged node.
        {
            Real p0(1);
            Real p1 = x;
            for (int k = 2; k <= order; ++k) {
                Real p2 = (Real(2 * k - 1) * x * p1 - Real(k - 1) * p0) / Real(k);
                p0 = std::move(p1);
                p1 = std::move(p2);
            }
            if (order == 1) p0 = Real(1);
            dp = Real(order) * (x * p1 - p0) / (x * x - Real(1));
        }
        const Real w = Real(2) / ((Real(1) - x * x) * dp * dp);
        const auto hi = static_cast<size_t>(order - 1 - i);
        const auto lo = static_cast<size_t>(i);
        rule->nodes[hi] = x;
        rule->weights[hi] = w;
        rule->nodes[lo] = -x;
        rule->weights[lo] = w;
    }
    if (order % 2 == 1) rule->nodes[static_cast<size_t>(order / 2)] = Real(0);
    return rule;
}

Real apply_rule(const GaussRule& rule, const std::function<Real(const Real&)>& f, const Real& a, const Real& b) {
    const Real mid = (a + b) / Real(2);
    const Real half = (b - a) / Real(2);
    CompensatedSum sum;
    for (size_t i = 0; i < rule.nodes.size(); ++i) {
        sum.add(rule.weights[i] * f(mid + half * rule.nodes[i]));
    }
    return sum.value() * half;
}

Real adapt(const GaussRule& rule, const std::function<Real(const Real&)>& f, const Real& a, const Real& b,
           const Real& whole, const Real& tol, int depth) {
    const Real mid = (a + b) / Real(2);
    const Real left = apply_rule(rule, f, a, mid);
    const Real right = apply_rule(rule, f, mid, b);
    const Real halves = left + right;
    if (abs(halves - whole) <= tol) return halves;
    if (depth >= 64) throw Error("integrate_adaptive: no convergence");
    const Real sub_tol = tol / Real(2);
    return adapt(rule, f, a, mid, left, sub_tol, depth + 1) + adapt(rule, f, mid, b, right, sub_tol, depth + 1);
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, unsigned>, std::unique_ptr<GaussRule>> cache;
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    const auto key = std::make_pair(order, PrecisionContext::current());
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_rule(order)).first;
    return *it->second;
}

int adaptive_rule_order() {
    const int by_bits = static_cast<int>(PrecisionContext::current() / 8);
    return by_bits < 16 ? 16 : by_bits;
}

Real integrate_adaptive(const std::function<Real(const Real&)>& f, const Real& a, const Real& b, const Real& tol) {
    const GaussRule& rule = gauss_legendre(adaptive_rule_order());
    const Real whole = apply_rule(rule, f, a, b);
    const Real scaled = tol * max(Real(1), abs(whole));
    return adapt(rule, f, a, b, whole, scaled, 0);
}

}  // namespace potlab
