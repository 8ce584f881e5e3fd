#pragma once

// Greedy extremal (Leja) sequences on [-1,1] and on the unit circle,
// unweighted and with the weight w = exp(V^mu) of a target measure mu.
//
// The continuum maximization is discretized on a CandidateGrid; the best
// grid node is then refined by golden-section search inside the bracketing
// grid interval to 2^{-bits/4}. Ties (objective values within 2^{-bits/2}
// relative) go to the smallest coordinate.

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "potlab/measure.hpp"
#include "potlab/real.hpp"

namespace potlab {

enum class LejaDomain { segment, circle };

class CandidateGrid {
public:
    static constexpr size_t kDefaultSize = 4096;

    /// Chebyshev-Lobatto nodes -cos(pi j/(count-1)) on [-1,1]; mirror-symmetric, endpoints included.
    static CandidateGrid chebyshev(size_t count = kDefaultSize);
    /// Equispaced angles 2 pi j / count on [0, 2 pi).
    static CandidateGrid circle(size_t count = kDefaultSize);
    /// Arbitrary nodes; sorted and deduplicated.
    static CandidateGrid from_nodes(std::vector<Real> nodes, LejaDomain domain = LejaDomain::segment);

    [[nodiscard]] LejaDomain domain() const { return domain_; }
    [[nodiscard]] std::span<const Real> nodes() const { return nodes_; }
    [[nodiscard]] size_t size() const { return nodes_.size(); }

    /// Maximum number of golden-section steps after the grid search (0 = run to tolerance).
    int refinement_depth = 0;

private:
    CandidateGrid(std::vector<Real> nodes, LejaDomain domain) : domain_(domain), nodes_(std::move(nodes)) {}

    LejaDomain domain_;
    std::vector<Real> nodes_;
};

struct LejaSequence {
    LejaDomain domain = LejaDomain::segment;
    /// x_k on the segment, angles theta_k in [0, 2 pi) on the circle.
    std::vector<Real> points;
    /// Entry k: sum_{j<k} log|x_k - x_j| (entry 0 is 0).
    std::vector<Real> log_products;
    /// Entry k: minimal pairwise distance among the first k+1 points (entry 0 is +inf).
    std::vector<Real> separations;
    /// Target measure whose potential defines the weight; empty for unweighted sequences.
    std::optional<TargetMeasure> target;

    [[nodiscard]] size_t size() const { return points.size(); }
    [[nodiscard]] bool empty() const { return points.empty(); }
    /// delta_n: minimal pairwise distance of the first n points (n >= 2).
    [[nodiscard]] const Real& delta(size_t n) const { return separations.at(n - 1); }

    /// Appends a point, updating log_products and separations.
    void append(Real point);
    /// Planar location of point k (e^{i theta} on the circle).
    [[nodiscard]] Complex location(size_t k) const;
};

/// Distance between two stored coordinates of the given domain.
Real leja_distance(LejaDomain domain, const Real& a, const Real& b);

/// Incremental generator: keeps sum_j log|g - x_j| for every grid node so each
/// extension costs one logarithm per node plus the refinement.
class LejaGenerator {
public:
    LejaGenerator(CandidateGrid grid, std::optional<TargetMeasure> target, LejaSequence seed = {});

    [[nodiscard]] const LejaSequence& sequence() const { return seq_; }
    [[nodiscard]] const CandidateGrid& grid() const { return grid_; }

    /// Appends the next point and returns it. Throws DegenerateGrid when every
    /// candidate collides with an existing point.
    const Real& extend();
    void extend_to(size_t n);

    /// Log-objective n V(x) + sum_j log|x - x_j| for the current n points.
    [[nodiscard]] Real objective(const Real& x) const;
    /// Objective at every grid node for the current n points.
    [[nodiscard]] std::vector<Real> grid_objective() const;

private:
    Real initial_point();
    Real refine(size_t best, bool potential_only) const;
    void absorb(const Real& point);

    CandidateGrid grid_;
    std::optional<TargetMeasure> target_;
    LejaSequence seq_;
    std::vector<Real> log_sums_;
    std::vector<Real> grid_potential_;
};

/// Appends the unweighted Leja point to a copy of seq (an empty seq starts at 1, or angle 0).
LejaSequence extend_unweighted(const LejaSequence& seq, const CandidateGrid& grid);
/// Appends the weighted Leja point for target mu (an empty seq starts at argmax V^mu).
LejaSequence extend_weighted(const LejaSequence& seq, const TargetMeasure& mu, const CandidateGrid& grid);

LejaSequence leja_unweighted(size_t n, const CandidateGrid& grid);
LejaSequence leja_weighted(const TargetMeasure& mu, size_t n, const CandidateGrid& grid);

/// (1/n) sum_j log|z - x_j| - (log|phi(z)| - log 2) over the first n points (n = 0: all).
std::vector<Real> verify_theorem_L(const LejaSequence& seq, std::span<const Complex> z_samples, size_t n = 0);
/// (1/n) sum_j log|z - x_j| + V^mu(z) over the first n points (n = 0: all).
std::vector<Real> verify_weighted_asymptotics(const LejaSequence& seq, const TargetMeasure& mu,
                                              std::span<const Complex> z_samples, size_t n = 0);
/// KS distance between the empirical CDF of the first n points and mu (n = 0: all).
Real equidistribution_distance(const LejaSequence& seq, const TargetMeasure& mu, size_t n = 0);

/// CSV with header index,x (segment) or index,theta (circle), 1-based index.
void write_leja_csv(const LejaSequence& seq, std::ostream& out, int digits);

}  // namespace potlab
