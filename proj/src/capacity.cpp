#include "potlab/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include <Eigen/Core>
#include <unsupported/Eigen/Polynomials>

#include "potlab/errors.hpp"

namespace potlab {

namespace {

constexpr double kPi = std::numbers::pi;

cdouble complex_from_json(const nlohmann::json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError("region: expected a number or [re, im], got " + j.dump());
}

std::vector<cdouble> complex_list(const nlohmann::json& j) {
    if (!j.is_array()) throw ConfigError("region: expected a list, got " + j.dump());
    std::vector<cdouble> out;
    for (const auto& e : j) out.push_back(complex_from_json(e));
    return out;
}

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : j.items()) {
        if (key != "kind" && allowed.count(key) == 0) throw ConfigError("region: unknown key '" + key + "'");
    }
}

double number(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(std::string("region: '") + key + "' must be a number");
    return j.at(key).get<double>();
}

double log_modulus(const std::vector<cdouble>& roots, cdouble z) {
    double s = 0.0;
    for (const cdouble& r : roots) s += std::log(std::abs(z - r));
    return s;
}

std::vector<cdouble> dedupe(std::vector<cdouble> pts) {
    auto lex = [](const cdouble& x, const cdouble& y) {
        return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
    };
    std::sort(pts.begin(), pts.end(), lex);
    auto close = [](const cdouble& x, const cdouble& y) { return std::abs(x - y) <= 1e-13 * (1.0 + std::abs(x)); };
    pts.erase(std::unique(pts.begin(), pts.end(), close), pts.end());
    return pts;
}

struct Selection {
    std::vector<size_t> chosen;
    double log_dn = 0.0;
};

Selection select_fekete(const std::vector<cdouble>& cand, size_t n) {
    const size_t m = cand.size();
    std::vector<double> sums(m, 0.0);
    std::vector<char> taken(m, 0);
    cdouble centroid{0.0, 0.0};
    for (const cdouble& c : cand) centroid += c;
    centroid /= static_cast<double>(m);

    size_t first = 0;
    for (size_t s = 1; s < m; ++s) {
        if (std::abs(cand[s] - centroid) > std::abs(cand[first] - centroid)) first = s;
    }
    Selection sel;
    auto take = [&](size_t s) {
        sel.chosen.push_back(s);
        taken[s] = 1;
        for (size_t t = 0; t < m; ++t) {
            if (!taken[t]) sums[t] += std::log(std::abs(cand[t] - cand[s]));
        }
    };
    take(first);
    while (sel.chosen.size() < n) {
        size_t best = m;
        for (size_t t = 0; t < m; ++t) {
            if (!taken[t] && (best == m || sums[t] > sums[best])) best = t;
        }
        take(best);
    }

    // One exchange pass. sums[t] holds sum over chosen j of log|t - z_j| for free t.
    for (size_t i = 0; i < n; ++i) {
        const size_t old = sel.chosen[i];
        double current = 0.0;
        for (size_t j = 0; j < n; ++j) {
            if (j != i) current += std::log(std::abs(cand[old] - cand[sel.chosen[j]]));
        }
        size_t best = m;
        double best_value = current;
        for (size_t t = 0; t < m; ++t) {
            if (taken[t]) continue;
            const double v = sums[t] - std::log(std::abs(cand[t] - cand[old]));
            if (v > best_value + 1e-14 * (1.0 + std::abs(best_value))) {
                best = t;
                best_value = v;
            }
        }
        if (best == m) continue;
        taken[old] = 0;
        taken[best] = 1;
        sel.chosen[i] = best;
        sums[old] = 0.0;
        for (size_t j = 0; j < n; ++j) sums[old] += std::log(std::abs(cand[old] - cand[sel.chosen[j]]));
        for (size_t t = 0; t < m; ++t) {
            if (taken[t] || t == old) continue;
            sums[t] += std::log(std::abs(cand[t] - cand[best])) - std::log(std::abs(cand[t] - cand[old]));
        }
    }

    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) total += std::log(std::abs(cand[sel.chosen[i]] - cand[sel.chosen[j]]));
    }
    sel.log_dn = 2.0 * total / (static_cast<double>(n) * static_cast<double>(n - 1));
    return sel;
}

double normalized(double log_dn, size_t n) {
    return std::exp(log_dn - std::log(static_cast<double>(n)) / static_cast<double>(n - 1));
}

}  // namespace

RegionDescriptor RegionDescriptor::make_disk(double r, cdouble c) {
    if (!(r > 0.0)) throw ConfigError("disk: radius must be positive");
    RegionDescriptor d;
    d.kind = RegionKind::disk;
    d.radius = r;
    d.center = c;
    return d;
}

RegionDescriptor RegionDescriptor::make_circle(double r) {
    RegionDescriptor d = make_disk(r);
    d.kind = RegionKind::circle;
    return d;
}

RegionDescriptor RegionDescriptor::make_segment(cdouble a, cdouble b) {
    if (a == b) throw ConfigError("segment: endpoints coincide");
    RegionDescriptor d;
    d.kind = RegionKind::segment;
    d.a = a;
    d.b = b;
    return d;
}

RegionDescriptor RegionDescriptor::make_lune(int n, double eps) {
    if (n < 1 || !(eps > 0.0)) throw ConfigError("lune: need n >= 1 and eps > 0");
    RegionDescriptor d;
    d.kind = RegionKind::lune;
    d.n = n;
    d.eps = eps;
    return d;
}

RegionDescriptor RegionDescriptor::make_ellipse(double rho) {
    if (!(rho > 1.0)) throw ConfigError("ellipse: rho must exceed 1");
    RegionDescriptor d;
    d.kind = RegionKind::ellipse_closure;
    d.rho = rho;
    return d;
}

RegionDescriptor RegionDescriptor::make_lemniscate(const std::vector<cdouble>& coeffs, double rho) {
    if (coeffs.size() < 2) throw ConfigError("lemniscate: polynomial degree must be >= 1");
    if (coeffs.front() != cdouble(1.0, 0.0)) throw ConfigError("lemniscate: polynomial must be monic");
    return make_lemniscate_from_roots(polynomial_roots(coeffs), rho);
}

RegionDescriptor RegionDescriptor::make_lemniscate_from_roots(std::vector<cdouble> roots, double rho) {
    if (roots.empty()) throw ConfigError("lemniscate: no roots");
    if (!(rho > 0.0)) throw ConfigError("lemniscate: rho must be positive");
    RegionDescriptor d;
    d.kind = RegionKind::lemniscate;
    d.rho = rho;
    d.log_level = static_cast<double>(roots.size()) * std::log(rho);
    d.roots = std::move(roots);
    return d;
}

RegionDescriptor RegionDescriptor::make_point_cloud(std::vector<cdouble> pts) {
    RegionDescriptor d;
    d.kind = RegionKind::point_cloud;
    d.points = std::move(pts);
    return d;
}

std::vector<cdouble> RegionDescriptor::boundary(size_t count) const {
    std::vector<cdouble> out;
    switch (kind) {
        case RegionKind::disk:
        case RegionKind::circle:
            for (size_t j = 0; j < count; ++j) {
                out.push_back(center + std::polar(radius, 2.0 * kPi * static_cast<double>(j) / count));
            }
            break;
        case RegionKind::segment:
            for (size_t j = 0; j < count; ++j) {
                const double t = count == 1 ? 0.5 : (1.0 - std::cos(kPi * j / static_cast<double>(count - 1))) / 2.0;
                out.push_back(a + (b - a) * t);
            }
            break;
        case RegionKind::ellipse_closure:
            for (size_t j = 0; j < count; ++j) {
                const cdouble w = std::polar(rho, 2.0 * kPi * static_cast<double>(j) / count);
                out.push_back((w + 1.0 / w) / 2.0);
            }
            break;
        case RegionKind::lune: {
            // zeta = (w - 1) e^{n eps}: unit-circle arc {cos theta >= -s/2} and the
            // arc |1 + s zeta| = 1 inside the unit disk, s = e^{-n eps}.
            const double s = std::exp(-static_cast<double>(n) * eps);
            const double theta0 = std::acos(-s / 2.0);
            const double psi0 = 2.0 * std::asin(s / 2.0);
            const double l1 = 2.0 * theta0;
            const double l2 = 2.0 * psi0 / s;
            const size_t n1 = std::max<size_t>(2, static_cast<size_t>(std::llround(count * l1 / (l1 + l2))));
            const size_t n2 = count > n1 ? count - n1 : 1;
            for (size_t j = 0; j < n1; ++j) {
                out.push_back(std::polar(1.0, -theta0 + 2.0 * theta0 * static_cast<double>(j) / (n1 - 1)));
            }
            for (size_t j = 1; j <= n2; ++j) {
                const double psi = -psi0 + 2.0 * psi0 * static_cast<double>(j) / (n2 + 1);
                out.push_back(cdouble(0.0, 2.0 * std::sin(psi / 2.0)) * std::polar(1.0, psi / 2.0) / s);
            }
            break;
        }
        case RegionKind::lemniscate:
            out = trace_lemniscate(roots, log_level);
            break;
        case RegionKind::point_cloud:
            out = points;
            break;
    }
    return out;
}

double RegionDescriptor::scale() const {
    return kind == RegionKind::lune ? std::exp(-static_cast<double>(n) * eps) : 1.0;
}

std::optional<double> RegionDescriptor::analytic_capacity() const {
    switch (kind) {
        case RegionKind::disk:
        case RegionKind::circle:
            return radius;
        case RegionKind::segment:
            return std::abs(b - a) / 4.0;
        case RegionKind::ellipse_closure:
            return rho / 2.0;
        case RegionKind::lemniscate:
            return std::exp(log_level / static_cast<double>(roots.size()));
        case RegionKind::lune:
        case RegionKind::point_cloud:
            break;
    }
    return std::nullopt;
}

std::string RegionDescriptor::kind_name() const {
    switch (kind) {
        case RegionKind::disk: return "disk";
        case RegionKind::segment: return "segment";
        case RegionKind::circle: return "circle";
        case RegionKind::lune: return "lune";
        case RegionKind::ellipse_closure: return "ellipse";
        case RegionKind::lemniscate: return "lemniscate";
        case RegionKind::point_cloud: return "point_cloud";
    }
    return "unknown";
}

RegionDescriptor parse_region(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
        throw ConfigError("region: expected an object with a string 'kind'");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "disk" || kind == "circle") {
        check_keys(j, {"r", "center"});
        const cdouble c = j.contains("center") ? complex_from_json(j.at("center")) : cdouble{};
        RegionDescriptor d = RegionDescriptor::make_disk(number(j, "r", 1.0), c);
        if (kind == "circle") d.kind = RegionKind::circle;
        return d;
    }
    if (kind == "segment") {
        check_keys(j, {"a", "b"});
        const cdouble a = j.contains("a") ? complex_from_json(j.at("a")) : cdouble(-1.0);
        const cdouble b = j.contains("b") ? complex_from_json(j.at("b")) : cdouble(1.0);
        return RegionDescriptor::make_segment(a, b);
    }
    if (kind == "lune") {
        check_keys(j, {"n", "eps"});
        if (!j.contains("n") || !j.at("n").is_number_integer()) throw ConfigError("lune: integer 'n' required");
        return RegionDescriptor::make_lune(j.at("n").get<int>(), number(j, "eps", 0.1));
    }
    if (kind == "ellipse") {
        check_keys(j, {"rho"});
        return RegionDescriptor::make_ellipse(number(j, "rho", 1.5));
    }
    if (kind == "lemniscate") {
        check_keys(j, {"coeffs", "roots", "chebyshev", "rho"});
        const int given = static_cast<int>(j.contains("coeffs")) + static_cast<int>(j.contains("roots")) +
                          static_cast<int>(j.contains("chebyshev"));
        if (given != 1) throw ConfigError("lemniscate: give exactly one of 'coeffs', 'roots', 'chebyshev'");
        if (!j.contains("rho")) throw ConfigError("lemniscate: 'rho' required");
        const double rho = number(j, "rho", 1.0);
        if (j.contains("coeffs")) return RegionDescriptor::make_lemniscate(complex_list(j.at("coeffs")), rho);
        if (j.contains("roots")) return RegionDescriptor::make_lemniscate_from_roots(complex_list(j.at("roots")), rho);
        if (!j.at("chebyshev").is_number_integer() || j.at("chebyshev").get<int>() < 1) {
            throw ConfigError("lemniscate: 'chebyshev' must be a positive integer");
        }
        std::vector<cdouble> roots;
        for (double x : chebyshev_zeros(j.at("chebyshev").get<int>())) roots.emplace_back(x, 0.0);
        return RegionDescriptor::make_lemniscate_from_roots(std::move(roots), rho);
    }
    if (kind == "point_cloud") {
        check_keys(j, {"points"});
        if (!j.contains("points")) throw ConfigError("point_cloud: 'points' required");
        return RegionDescriptor::make_point_cloud(complex_list(j.at("points")));
    }
    throw ConfigError("region: unknown kind '" + kind + "'");
}

std::vector<cdouble> polynomial_roots(const std::vector<cdouble>& coeffs) {
    if (coeffs.size() < 2) throw std::invalid_argument("polynomial_roots: degree must be >= 1");
    const size_t deg = coeffs.size() - 1;
    if (deg == 1) return {-coeffs[1] / coeffs[0]};
    Eigen::Matrix<cdouble, Eigen::Dynamic, 1> ascending(static_cast<Eigen::Index>(coeffs.size()));
    for (size_t i = 0; i <= deg; ++i) ascending(static_cast<Eigen::Index>(i)) = coeffs[deg - i] / coeffs[0];
    Eigen::PolynomialSolver<cdouble, Eigen::Dynamic> solver(ascending);
    std::vector<cdouble> roots;
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) roots.push_back(solver.roots()(i));
    std::sort(roots.begin(), roots.end(), [](const cdouble& x, const cdouble& y) {
        return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
    });
    return roots;
}

std::vector<cdouble> trace_lemniscate(const std::vector<cdouble>& roots, double log_level, size_t rays,
                                      std::vector<cdouble>* origins) {
    if (roots.empty() || rays == 0) throw TracingFailure("trace_lemniscate: nothing to trace");
    const double deg = static_cast<double>(roots.size());
    const std::vector<cdouble> starts = dedupe(roots);
    std::vector<cdouble> out;
    out.reserve(starts.size() * rays);
    for (const cdouble& r : starts) {
        double reach = 0.0;
        for (const cdouble& other : roots) reach = std::max(reach, std::abs(r - other));
        const double t_max = reach + std::exp(log_level / deg) + 1.0;
        for (size_t k = 0; k < rays; ++k) {
            const cdouble dir = std::polar(1.0, 2.0 * kPi * static_cast<double>(k) / static_cast<double>(rays));
            auto f = [&](double t) { return log_modulus(roots, r + t * dir) - log_level; };
            double lo = t_max * 1e-15;
            if (f(lo) >= 0.0) throw TracingFailure("trace_lemniscate: level below resolution at a root");
            double hi = lo;
            bool found = false;
            while (hi < t_max) {
                hi = std::min(hi * 1.25, t_max);
                if (f(hi) > 0.0) {
                    found = true;
                    break;
                }
                lo = hi;
            }
            if (!found) throw TracingFailure("trace_lemniscate: ray did not leave the lemniscate");
            for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (f(mid) > 0.0 ? hi : lo) = mid;
            }
            out.push_back(r + 0.5 * (lo + hi) * dir);
            if (origins != nullptr) origins->push_back(r);
        }
    }
    return out;
}

CapacityEstimate fekete_from_points(const std::vector<cdouble>& candidates, size_t n) {
    if (n < 8) throw std::invalid_argument("greedy_fekete_capacity: n must be >= 8");
    std::vector<cdouble> cand = dedupe(candidates);
    if (cand.size() < n) {
        throw DegenerateRegion("greedy_fekete_capacity: " + std::to_string(cand.size()) +
                               " distinct boundary points, " + std::to_string(n) + " requested");
    }
    // Work at unit scale; dividing by a power of two keeps c S -> c cap(S) exact for c = 2^k.
    double extent = 0.0;
    for (const cdouble& p : cand) extent = std::max({extent, std::abs(p.real()), std::abs(p.imag())});
    int exponent = 0;
    std::frexp(extent, &exponent);
    const double unit = std::ldexp(1.0, exponent);
    for (cdouble& p : cand) p /= unit;

    const Selection full = select_fekete(cand, n);
    const Selection half = select_fekete(cand, n / 2);
    CapacityEstimate est;
    est.n_points = n;
    est.value = normalized(full.log_dn, n) * unit;
    est.raw = std::exp(full.log_dn) * unit;
    est.uncertainty = std::abs(normalized(full.log_dn, n) - normalized(half.log_dn, n / 2)) * unit;
    for (size_t i : full.chosen) est.points.push_back(cand[i] * unit);
    return est;
}

CapacityEstimate greedy_fekete_capacity(const RegionDescriptor& r, size_t n, size_t samples) {
    CapacityEstimate est = fekete_from_points(r.boundary(samples), n);
    const double s = r.scale();
    est.value *= s;
    est.raw *= s;
    est.uncertainty *= s;
    return est;
}

std::optional<double> CapacityReport::relative_error() const {
    if (!analytic) return std::nullopt;
    return std::abs(estimate - *analytic) / *analytic;
}

nlohmann::json CapacityReport::to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"estimate", estimate}, {"analytic", opt(analytic)}, {"lower", opt(lower)},
            {"upper", opt(upper)},  {"n_points", n_points},     {"uncertainty", uncertainty},
            {"raw_dn", raw}};
}

CapacityReport capacity_report(const RegionDescriptor& r, size_t n) {
    const CapacityEstimate est = greedy_fekete_capacity(r, n);
    CapacityReport rep;
    rep.estimate = est.value;
    rep.n_points = est.n_points;
    rep.uncertainty = est.uncertainty;
    rep.raw = est.raw;
    rep.analytic = r.analytic_capacity();
    if (r.kind == RegionKind::lune) {
        rep.lower = r.scale() / 4.0;
        rep.upper = r.scale();
    }
    return rep;
}

CapacityReport preimage_capacity_check(const std::vector<cdouble>& coeffs, double rho, size_t n_points) {
    return capacity_report(RegionDescriptor::make_lemniscate(coeffs, rho), n_points);
}

CapacityReport preimage_capacity_check_roots(const std::vector<cdouble>& roots, double rho, size_t n_points) {
    return capacity_report(RegionDescriptor::make_lemniscate_from_roots(roots, rho), n_points);
}

LuneReport lune_capacity_bounds(int n, double eps, size_t n_points) {
    if (static_cast<double>(n) * eps < 1.0) throw ConfigError("lune_capacity_bounds: need n * eps >= 1");
    LuneReport rep;
    rep.n = n;
    rep.eps = eps;
    rep.capacity = capacity_report(RegionDescriptor::make_lune(n, eps), n_points);
    rep.rescaled = rep.capacity.estimate * std::exp(static_cast<double>(n) * eps);
    rep.within = *rep.capacity.lower < rep.capacity.estimate && rep.capacity.estimate < *rep.capacity.upper;
    return rep;
}

}  // namespace potlab
