#pragma once

// Logarithmic capacity of planar compact sets estimated from greedy Fekete
// configurations on boundary samples (double precision).

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "potlab/special.hpp"

namespace potlab {

enum class RegionKind { disk, segment, circle, lune, ellipse_closure, lemniscate, point_cloud };

struct RegionDescriptor {
    RegionKind kind = RegionKind::disk;
    cdouble center{0.0, 0.0};  // disk, circle
    double radius = 1.0;       // disk, circle
    cdouble a{-1.0, 0.0};      // segment endpoints
    cdouble b{1.0, 0.0};
    int n = 1;                 // lune index
    double eps = 0.1;          // lune
    double rho = 1.5;          // ellipse closure {|phi(z)| <= rho}
    std::vector<cdouble> roots;   // lemniscate polynomial, monic
    double log_level = 0.0;       // lemniscate {sum log|z - r_k| <= log_level}
    std::vector<cdouble> points;  // point cloud

    static RegionDescriptor make_disk(double r, cdouble c = {0.0, 0.0});
    static RegionDescriptor make_circle(double r);
    static RegionDescriptor make_segment(cdouble a, cdouble b);
    /// {w: |w| >= 1, |w - 1| <= e^{-n eps}}.
    static RegionDescriptor make_lune(int n, double eps);
    static RegionDescriptor make_ellipse(double rho);
    /// {|P(z)| <= rho^deg} for P monic with coefficients listed from the leading one.
    static RegionDescriptor make_lemniscate(const std::vector<cdouble>& coeffs, double rho);
    static RegionDescriptor make_lemniscate_from_roots(std::vector<cdouble> roots, double rho);
    static RegionDescriptor make_point_cloud(std::vector<cdouble> pts);

    /// Points on the outer boundary. The lune is returned in the rescaled
    /// coordinate zeta = (w - 1) e^{n eps}; multiply capacities by scale().
    [[nodiscard]] std::vector<cdouble> boundary(size_t count) const;
    [[nodiscard]] double scale() const;
    /// Known capacity, when available.
    [[nodiscard]] std::optional<double> analytic_capacity() const;
    [[nodiscard]] std::string kind_name() const;
};

/// Parses {"kind": "disk", "r": 1, "center": [0, 0]}, {"kind": "segment", "a": -1, "b": 1},
/// {"kind": "circle", "r": 1}, {"kind": "lune", "n": 20, "eps": 0.1}, {"kind": "ellipse", "rho": 1.5},
/// {"kind": "lemniscate", "coeffs" | "roots" | "chebyshev": ..., "rho": 0.9},
/// {"kind": "point_cloud", "points": [[x, y], ...]}. Complex entries are numbers or [re, im].
RegionDescriptor parse_region(const nlohmann::json& j);

/// Monic polynomial roots (companion-matrix eigenvalues).
std::vector<cdouble> polynomial_roots(const std::vector<cdouble>& coeffs);

/// Traces {sum log|z - r_k| = log_level} along `rays` rays from each distinct
/// root (first exit point per ray). `origins`, when given, receives the root of each point.
std::vector<cdouble> trace_lemniscate(const std::vector<cdouble>& roots, double log_level, size_t rays = 512,
                                      std::vector<cdouble>* origins = nullptr);

enum class CapacityMethod { greedy_fekete, analytic };

struct CapacityEstimate {
    double value = 0.0;  // d_n n^{-1/(n-1)}, scaled
    size_t n_points = 0;
    CapacityMethod method = CapacityMethod::greedy_fekete;
    double uncertainty = 0.0;  // |value(n) - value(n/2)|
    double raw = 0.0;          // unnormalized d_n, scaled
    std::vector<cdouble> points;
};

constexpr size_t kDefaultBoundarySamples = 2048;

/// Greedy selection plus one exchange pass over a boundary sample. Throws
/// DegenerateRegion when fewer than n distinct boundary points exist.
CapacityEstimate greedy_fekete_capacity(const RegionDescriptor& r, size_t n,
                                        size_t samples = kDefaultBoundarySamples);

/// Same estimator on an explicit point set.
CapacityEstimate fekete_from_points(const std::vector<cdouble>& candidates, size_t n);

struct CapacityReport {
    double estimate = 0.0;
    std::optional<double> analytic;
    std::optional<double> lower;
    std::optional<double> upper;
    size_t n_points = 0;
    double uncertainty = 0.0;
    double raw = 0.0;

    [[nodiscard]] std::optional<double> relative_error() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

CapacityReport capacity_report(const RegionDescriptor& r, size_t n = 64);

/// Lemniscate {|P| <= rho^n} of a monic P against the analytic value rho.
CapacityReport preimage_capacity_check(const std::vector<cdouble>& coeffs, double rho, size_t n_points = 64);
CapacityReport preimage_capacity_check_roots(const std::vector<cdouble>& roots, double rho, size_t n_points = 64);

struct LuneReport {
    int n = 0;
    double eps = 0.0;
    CapacityReport capacity;  // lower = e^{-n eps}/4, upper = e^{-n eps}
    double rescaled = 0.0;    // estimate * e^{n eps}
    bool within = false;      // lower < estimate < upper
};

/// Requires n eps >= 1.
LuneReport lune_capacity_bounds(int n, double eps, size_t n_points = 64);

}  // namespace potlab
