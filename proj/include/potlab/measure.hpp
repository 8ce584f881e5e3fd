#pragma once

// Atomic measures on the segment [-1,1] (big-float) and in the plane (double),
// their logarithmic potentials, and the prescribed target measures.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "potlab/real.hpp"
#include "potlab/special.hpp"

namespace potlab {

struct Atom {
    Real location;
    Real weight;
};

/// Finite sum of weighted point masses on a real interval [lo, hi]
/// (the segment [-1,1] unless stated). Atoms keep insertion order.
class DiscreteMeasure {
public:
    DiscreteMeasure() : DiscreteMeasure(Real(-1), Real(1)) {}
    DiscreteMeasure(Real support_lo, Real support_hi);

    /// Appends an atom; throws std::invalid_argument for a non-positive weight
    /// or a location outside the support.
    void add(Real location, Real weight);

    [[nodiscard]] std::span<const Atom> atoms() const { return atoms_; }
    [[nodiscard]] size_t size() const { return atoms_.size(); }
    [[nodiscard]] bool empty() const { return atoms_.empty(); }
    [[nodiscard]] const Real& total_mass() const { return total_mass_; }
    [[nodiscard]] const Real& support_lo() const { return lo_; }
    [[nodiscard]] const Real& support_hi() const { return hi_; }

    /// Sum of the two measures (atoms of `other` appended).
    [[nodiscard]] DiscreteMeasure plus(const DiscreteMeasure& other) const;
    /// Same atoms, weights multiplied by c > 0.
    [[nodiscard]] DiscreteMeasure scaled(const Real& c) const;
    /// First n atoms.
    [[nodiscard]] DiscreteMeasure prefix(size_t n) const;

private:
    Real lo_;
    Real hi_;
    std::vector<Atom> atoms_;
    CompensatedSum mass_sum_;
    Real total_mass_;
};

/// Total of a weight list accumulated the way DiscreteMeasure stores it.
Real stored_sum(std::span<const Atom> atoms);

/// Sum_k w_k log(1/|z - x_k|). Throws AtomCollision when z hits an atom.
Real potential_discrete(const DiscreteMeasure& m, const Complex& z);

/// Point masses in the plane, double precision.
struct PlanarMeasure {
    std::vector<cdouble> locations;
    std::vector<double> weights;
};

/// Counting measure (weights 1/n) of the n-th roots of unity.
PlanarMeasure roots_of_unity_measure(int n);
/// Counting measure of the zeros of the degree-n Chebyshev polynomial.
PlanarMeasure chebyshev_zero_measure(int n);

double potential_discrete(const PlanarMeasure& m, cdouble z);

/// A probability measure on [-1,1] described by its potential and CDF.
struct TargetMeasure {
    std::string name;
    std::function<Real(const Complex&)> potential;
    std::function<Real(const Real&)> cdf;

    [[nodiscard]] Real potential_at(const Real& x) const { return potential(Complex(x)); }
};

/// Equilibrium (arcsine) measure dx / (pi sqrt(1-x^2)).
TargetMeasure target_arcsine();
/// Normalized Lebesgue measure dx/2. Off the segment the potential is
/// evaluated by adaptive Gauss-Legendre quadrature to 2^{-bits/2}.
TargetMeasure target_uniform();
/// alpha * arcsine + (1 - alpha) * uniform, alpha in [0,1].
TargetMeasure target_blend(double alpha);
/// Lookup by name: "arcsine", "uniform", "blend" (uses alpha).
TargetMeasure target_by_name(const std::string& name, double alpha = 0.5);

/// Closed form of the uniform potential on the segment:
/// 1 - [(1+x) log(1+x) + (1-x) log(1-x)] / 2.
Real uniform_potential_on_segment(const Real& x);

/// Kolmogorov-Smirnov distance sup_x |F_m(x) - cdf(x)| between the normalized
/// distribution function of m and a continuous CDF; exact (both one-sided
/// limits at every atom).
Real ks_distance(const DiscreteMeasure& m, const std::function<Real(const Real&)>& cdf);
double ks_distance(std::span<const double> sorted_atoms, const std::function<double(double)>& cdf);

}  // namespace potlab
