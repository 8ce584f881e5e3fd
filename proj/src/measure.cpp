#include "potlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "potlab/errors.hpp"
#include "potlab/quadrature.hpp"

namespace potlab {

DiscreteMeasure::DiscreteMeasure(Real support_lo, Real support_hi)
    : lo_(std::move(support_lo)), hi_(std::move(support_hi)) {}

void DiscreteMeasure::add(Real location, Real weight) {
    if (!(weight > Real(0))) throw std::invalid_argument("DiscreteMeasure: weights must be positive");
    if (location < lo_ || location > hi_) {
        throw std::invalid_argument("DiscreteMeasure: atom " + location.to_string(17) + " outside the support");
    }
    mass_sum_.add(weight);
    total_mass_ = mass_sum_.value();
    atoms_.push_back({std::move(location), std::move(weight)});
}

DiscreteMeasure DiscreteMeasure::plus(const DiscreteMeasure& other) const {
    DiscreteMeasure out(min(lo_, other.lo_), max(hi_, other.hi_));
    for (const Atom& a : atoms_) out.add(a.location, a.weight);
    for (const Atom& a : other.atoms_) out.add(a.location, a.weight);
    return out;
}

DiscreteMeasure DiscreteMeasure::scaled(const Real& c) const {
    if (!(c > Real(0))) throw std::invalid_argument("DiscreteMeasure::scaled: factor must be positive");
    DiscreteMeasure out(lo_, hi_);
    for (const Atom& a : atoms_) out.add(a.location, a.weight * c);
    return out;
}

DiscreteMeasure DiscreteMeasure::prefix(size_t n) const {
    DiscreteMeasure out(lo_, hi_);
    n = std::min(n, atoms_.size());
    for (size_t i = 0; i < n; ++i) out.add(atoms_[i].location, atoms_[i].weight);
    return out;
}

Real stored_sum(std::span<const Atom> atoms) {
    CompensatedSum s;
    for (const Atom& a : atoms) s.add(a.weight);
    return s.value();
}

Real potential_discrete(const DiscreteMeasure& m, const Complex& z) {
    CompensatedSum s;
    for (const Atom& a : m.atoms()) {
        const Complex d = z - Complex(a.location);
        if (d.re.is_zero() && d.im.is_zero()) {
            throw AtomCollision("potential_discrete: z coincides with atom " + a.location.to_string(17));
        }
        s.add(-a.weight * log_abs(d));
    }
    return s.value();
}

PlanarMeasure roots_of_unity_measure(int n) {
    PlanarMeasure m;
    m.locations.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        m.locations.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / n));
    }
    m.weights.assign(static_cast<size_t>(n), 1.0 / n);
    return m;
}

PlanarMeasure chebyshev_zero_measure(int n) {
    PlanarMeasure m;
    for (double x : chebyshev_zeros(n)) m.locations.emplace_back(x, 0.0);
    m.weights.assign(static_cast<size_t>(n), 1.0 / n);
    return m;
}

double potential_discrete(const PlanarMeasure& m, cdouble z) {
    double sum = 0.0;
    double carry = 0.0;
    for (size_t k = 0; k < m.locations.size(); ++k) {
        const double r = std::abs(z - m.locations[k]);
        if (r == 0.0) throw AtomCollision("potential_discrete: z coincides with an atom");
        const double term = -m.weights[k] * std::log(r);
        const double t = sum + term;
        carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return sum + carry;
}

namespace {

Real xlogx(const Real& x) {
    if (x.is_zero()) return Real(0);
    return x * log(x);
}

bool on_segment(const Complex& z) { return z.im.is_zero() && abs(z.re) <= Real(1); }

Real uniform_potential(const Complex& z) {
    if (on_segment(z)) return uniform_potential_on_segment(z.re);
    const Real tol = ldexp(Real(1), -static_cast<long>(PrecisionContext::current() / 2));
    auto integrand = [&z](const Real& t) { return -log_abs(z - Complex(t)); };
    return integrate_adaptive(integrand, Real(-1), Real(1), tol) / Real(2);
}

}  // namespace

Real uniform_potential_on_segment(const Real& x) {
    return Real(1) - (xlogx(Real(1) + x) + xlogx(Real(1) - x)) / Real(2);
}

TargetMeasure target_arcsine() {
    return {"arcsine", [](const Complex& z) { return equilibrium_potential_segment(z); },
            [](const Real& x) { return arcsine_cdf(x); }};
}

TargetMeasure target_uniform() {
    return {"uniform", uniform_potential, [](const Real& x) {
                if (x <= Real(-1)) return Real(0);
                if (x >= Real(1)) return Real(1);
                return (x + Real(1)) / Real(2);
            }};
}

TargetMeasure target_blend(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("target_blend: alpha must lie in [0,1]");
    const TargetMeasure arc = target_arcsine();
    const TargetMeasure uni = target_uniform();
    if (alpha == 1.0) return {"blend(1)", arc.potential, arc.cdf};
    if (alpha == 0.0) return {"blend(0)", uni.potential, uni.cdf};
    char name[64];
    std::snprintf(name, sizeof name, "blend(%g)", alpha);
    return {name,
            [alpha, arc, uni](const Complex& z) {
                const Real a(alpha);
                return a * arc.potential(z) + (Real(1) - a) * uni.potential(z);
            },
            [alpha, arc, uni](const Real& x) {
                const Real a(alpha);
                return a * arc.cdf(x) + (Real(1) - a) * uni.cdf(x);
            }};
}

TargetMeasure target_by_name(const std::string& name, double alpha) {
    if (name == "arcsine") return target_arcsine();
    if (name == "uniform") return target_uniform();
    if (name == "blend") return target_blend(alpha);
    throw std::invalid_argument("unknown target measure '" + name + "'");
}

Real ks_distance(const DiscreteMeasure& m, const std::function<Real(const Real&)>& cdf) {
    if (m.empty()) throw std::invalid_argument("ks_distance: empty measure");
    std::vector<const Atom*> sorted;
    sorted.reserve(m.size());
    for (const Atom& a : m.atoms()) sorted.push_back(&a);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Atom* a, const Atom* b) { return a->location < b->location; });
    const Real& mass = m.total_mass();
    CompensatedSum cumulative;
    Real worst(0);
    size_t i = 0;
    while (i < sorted.size()) {
        const Real& x = sorted[i]->location;
        const Real left = cumulative.value() / mass;
        while (i < sorted.size() && sorted[i]->location == x) cumulative.add(sorted[i++]->weight);
        const Real right = cumulative.value() / mass;
        const Real f = cdf(x);
        worst = max(worst, max(abs(left - f), abs(right - f)));
    }
    return worst;
}

double ks_distance(std::span<const double> sorted_atoms, const std::function<double(double)>& cdf) {
    if (sorted_atoms.empty()) throw std::invalid_argument("ks_distance: empty sample");
    const double n = static_cast<double>(sorted_atoms.size());
    double worst = 0.0;
    size_t i = 0;
    while (i < sorted_atoms.size()) {
        const double x = sorted_atoms[i];
        const double left = static_cast<double>(i) / n;
        while (i < sorted_atoms.size() && sorted_atoms[i] == x) ++i;
        const double right = static_cast<double>(i) / n;
        const double f = cdf(x);
        worst = std::max({worst, std::abs(left - f), std::abs(right - f)});
    }
    return worst;
}

}  // namespace potlab
