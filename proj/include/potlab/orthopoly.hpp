#pragma once

// Orthogonal polynomials of discrete measures in arbitrary precision, and the
// construction of a discrete measure sigma(mu) whose orthogonal-polynomial
// zeros track the weighted Leja points of mu.

#include <span>
#include <string>
#include <vector>

#include "potlab/leja.hpp"
#include "potlab/measure.hpp"
#include "potlab/real.hpp"

namespace potlab {

/// Monic three-term recurrence P_{k+1} = (x - a_k) P_k - b_k P_{k-1}.
/// b[0] is the total mass; b[k] = ||P_k||^2 / ||P_{k-1}||^2 for k >= 1.
struct RecurrenceCoeffs {
    std::vector<Real> a;
    std::vector<Real> b;

    /// Number of recurrence steps available (the highest computable degree).
    [[nodiscard]] size_t size() const { return a.size(); }
};

struct ZeroSet {
    std::vector<Real> roots;  // ascending
    size_t degree = 0;
    /// Bracket width reached for each root.
    std::vector<Real> widths;
    /// Index of the paired Leja point, when a pairing was computed.
    std::vector<size_t> matched_to;
};

enum class WeightSchedule {
    /// eps_n = q^{n^2}.
    geometric_square,
    /// eps_{n+1} in (0, q^{n^2} eps_n), shrunk until the perturbation audit holds.
    adaptive,
};

struct SigmaBuildConfig {
    double q = 0.4;
    size_t n_max = 10;
    TargetMeasure target = target_arcsine();
    unsigned bits = 2048;
    WeightSchedule schedule = WeightSchedule::geometric_square;
    size_t grid_size = CandidateGrid::kDefaultSize;
};

/// ceil(3 n^2 log2(1/q)) + 128.
unsigned precision_floor(double q, size_t n);

/// q as the Real nearest its shortest decimal representation.
Real decimal_real(double value);

/// One step of the adaptive cascade.
struct CascadeStep {
    size_t n = 0;        // eps_{n+1} was chosen for sigma_n
    Real eps_next;       // chosen eps_{n+1}
    Real cap;            // q^{n^2} eps_n
    Real bound;          // 1/2 min{q^{n^2}, delta_n}
    Real worst_deviation;
    std::string worst_case;
    size_t trials = 0;
};

struct SigmaConstruction {
    DiscreteMeasure measure;
    LejaSequence leja;
    WeightSchedule schedule = WeightSchedule::geometric_square;
    std::vector<CascadeStep> steps;  // empty for the geometric schedule
};

/// sum_{n=1}^{n_max} eps_n delta_{x_n} over the given weighted Leja sequence.
/// Throws ConfigError for q outside (0, 1/2) and PrecisionTooLow when
/// cfg.bits < precision_floor(q, n_max) (for the adaptive schedule the
/// dynamic range log2(eps_1/eps_{n_max}) is added to the floor).
SigmaConstruction construct_sigma(const SigmaBuildConfig& cfg, const LejaSequence& leja);
DiscreteMeasure build_sigma(const SigmaBuildConfig& cfg, const LejaSequence& leja);
/// Generates the weighted Leja sequence of cfg.target first.
SigmaConstruction construct_sigma(const SigmaBuildConfig& cfg);
DiscreteMeasure build_sigma(const SigmaBuildConfig& cfg);

/// Discrete Stieltjes procedure: a_0..a_n and b_0..b_n. When m has exactly n
/// atoms, ||P_n|| vanishes and the result stops at a_{n-1}, b_{n-1} (still
/// enough for P_n). Throws BreakdownError when an earlier norm vanishes.
RecurrenceCoeffs stieltjes_recurrence(const DiscreteMeasure& m, size_t n);

/// max_{k<n} |<P_n, x^k>| / (||P_n|| ||x^k||) in the inner product of m.
Real orthogonality_residual(const DiscreteMeasure& m, const RecurrenceCoeffs& rc, size_t n);

/// Number of zeros of P_n below x (Sturm count of the Jacobi recurrence).
size_t sturm_count(const RecurrenceCoeffs& rc, size_t n, const Real& x);

/// Zeros of P_n, each certified by Sturm counts inside a bracket of width 2^{-bits/2}.
ZeroSet orthopoly_zeros(const RecurrenceCoeffs& rc, size_t n);

/// P_n(z) from the recurrence.
Complex evaluate_monic(const RecurrenceCoeffs& rc, size_t n, const Complex& z);

/// n-point Gauss rule of the measure behind rc (matches its first 2n moments).
DiscreteMeasure gauss_quadrature(const RecurrenceCoeffs& rc, size_t n);

/// Gauss-Legendre discretization of dx/2 with `atoms` nodes.
DiscreteMeasure gauss_legendre_measure(size_t atoms);
/// Atoms cos((2k-1) pi / (2N)) with weights 1/N.
DiscreteMeasure gauss_chebyshev_measure(size_t atoms);

struct ZeroStabilityReport {
    size_t n = 0;
    ZeroSet zeros;
    std::vector<Real> deviations;  // |x_k - x_{n,k}| in Leja order k = 1..n
    Real max_deviation;
    Real bound;                    // q^{n^2}
    Real margin;                   // bound / max_deviation
    bool passed = false;           // max_deviation < bound
};

/// Pairs each zero of P_n(.; m) with the nearest of x_1..x_n. Throws
/// PairingFailure when the pairing is not a bijection.
ZeroStabilityReport zero_stability_check(const DiscreteMeasure& m, const LejaSequence& leja, size_t n,
                                         const Real& q);

struct StressCase {
    std::string name;
    DiscreteMeasure nu;
};

/// {0, delta_{-1}, delta_{+1}, delta_{x_k} (k <= n), uniform 64-atom grid of mass 1}.
std::vector<StressCase> stress_family(const LejaSequence& leja, size_t n);

struct StressRow {
    std::string name;
    Real max_deviation;  // +inf when the pairing is not a bijection
    bool within = false;
};

struct StressReport {
    size_t n = 0;
    Real eps_next;
    Real bound;  // 1/2 min{q^{n^2}, delta_n}
    std::vector<StressRow> rows;
    Real worst_deviation;
    std::string worst_case;
    size_t violations = 0;
};

/// Zero deviations of P_n(.; sigma_n + 2 eps_next nu) from x_1..x_n for every
/// nu in the family, against 1/2 min{q^{n^2}, delta_n}.
StressReport stress_audit(const DiscreteMeasure& sigma_n, const LejaSequence& leja, size_t n,
                          const Real& eps_next, const Real& q, std::span<const StressCase> family);
/// As stress_audit, throwing StressFailure naming the worst nu on any violation.
StressReport epsilon_stress_test(const DiscreteMeasure& sigma_n, const LejaSequence& leja, size_t n,
                                 const Real& eps_next, const Real& q, std::span<const StressCase> family);

/// Atoms at the zeros with weights 1/n.
DiscreteMeasure counting_measure(const ZeroSet& zeros);
/// KS distance between m (normalized) and mu.
Real weak_star_distance(const DiscreteMeasure& m, const TargetMeasure& mu);

struct AsymptoticsRow {
    size_t n = 0;
    Complex z;
    Real residual;  // (1/n) log|P_n(z; m)| + V^mu(z), P_n from its zeros
};

std::vector<AsymptoticsRow> potential_asymptotics_check(const DiscreteMeasure& m, const TargetMeasure& mu,
                                                        std::span<const size_t> n_list,
                                                        std::span<const Complex> z_samples);

}  // namespace potlab
