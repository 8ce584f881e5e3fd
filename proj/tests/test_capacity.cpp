#include <cmath>
#include <numbers>

#include "doctest.h"
#include "json.hpp"

#include "potlab/capacity.hpp"
#include "potlab/errors.hpp"
#include "potlab/leja.hpp"

using namespace potlab;
using nlohmann::json;

namespace {

double rel(double v, double ref) { return std::abs(v - ref) / ref; }

const std::vector<cdouble> kChebyshev8{1.0, 0.0, -2.0, 0.0, 1.25, 0.0, -0.25, 0.0, 1.0 / 128.0};

}  // namespace

TEST_CASE("calibration on the disk and the segment") {
    CHECK(std::abs(greedy_fekete_capacity(RegionDescriptor::make_disk(1.0), 64).value - 1.0) < 0.05);
    CHECK(std::abs(greedy_fekete_capacity(RegionDescriptor::make_segment(-1.0, 1.0), 64).value - 0.5) < 0.03);
    CHECK(std::abs(greedy_fekete_capacity(RegionDescriptor::make_disk(2.0), 64).value - 2.0) < 0.1);
    CHECK(std::abs(greedy_fekete_capacity(RegionDescriptor::make_circle(0.7), 64).value - 0.7) < 0.035);
    // A segment of length l has capacity l/4.
    const double l = std::abs(cdouble(1.5, 2.0) - cdouble(-0.5, 0.25));
    CHECK(rel(greedy_fekete_capacity(RegionDescriptor::make_segment({-0.5, 0.25}, {1.5, 2.0}), 64).value, l / 4) <
          0.05);
}

TEST_CASE("segment estimate agrees with the Leja product estimate") {
    PrecisionContext ctx(128);
    const LejaSequence s = leja_unweighted(64, CandidateGrid::chebyshev());
    // (prod_{j<n} |x_n - x_j|)^{1/n} tends to the capacity.
    double acc = 0.0;
    for (size_t k = 48; k < 64; ++k) acc += std::exp(s.log_products[k].to_double() / static_cast<double>(k));
    const double leja = acc / 16.0;
    const double fekete = greedy_fekete_capacity(RegionDescriptor::make_segment(-1.0, 1.0), 64).value;
    CHECK(std::abs(leja - 0.5) < 0.05);
    CHECK(std::abs(leja - fekete) < 0.05);
}

TEST_CASE("scale equivariance") {
    const std::vector<cdouble> pts = RegionDescriptor::make_ellipse(1.3).boundary(512);
    std::vector<cdouble> doubled;
    std::vector<cdouble> tripled;
    for (const cdouble& p : pts) {
        doubled.push_back(2.0 * p);
        tripled.push_back(3.0 * p);
    }
    const CapacityEstimate base = fekete_from_points(pts, 32);
    CHECK(fekete_from_points(doubled, 32).value == 2.0 * base.value);
    CHECK(rel(fekete_from_points(tripled, 32).value, 3.0 * base.value) < 1e-12);
}

TEST_CASE("monotonicity under inclusion") {
    auto est = [](const RegionDescriptor& r) { return greedy_fekete_capacity(r, 64).value; };
    const double tol = 1.05;
    CHECK(est(RegionDescriptor::make_segment(-1.0, 1.0)) <= est(RegionDescriptor::make_disk(1.0)) * tol);
    CHECK(est(RegionDescriptor::make_disk(1.0)) <= est(RegionDescriptor::make_disk(1.5)) * tol);
    CHECK(est(RegionDescriptor::make_ellipse(1.2)) <= est(RegionDescriptor::make_ellipse(1.5)) * tol);
    CHECK(est(RegionDescriptor::make_segment(-1.0, 1.0)) <= est(RegionDescriptor::make_ellipse(1.2)) * tol);
}

TEST_CASE("raw d_n decreases in n") {
    for (const RegionDescriptor& r :
         {RegionDescriptor::make_disk(1.0), RegionDescriptor::make_segment(-1.0, 1.0), RegionDescriptor::make_ellipse(1.5)}) {
        CAPTURE(r.kind_name());
        double prev = INFINITY;
        for (size_t n : {16, 32, 64}) {
            const double raw = greedy_fekete_capacity(r, n).raw;
            CHECK(raw <= prev * 1.02);
            prev = raw;
        }
    }
}

TEST_CASE("estimate record") {
    const CapacityEstimate e = greedy_fekete_capacity(RegionDescriptor::make_disk(1.0), 64);
    CHECK(e.n_points == 64);
    CHECK(e.points.size() == 64);
    CHECK(e.value > 0.0);
    CHECK(e.uncertainty >= 0.0);
    CHECK(e.method == CapacityMethod::greedy_fekete);
    // The normalized value is d_n n^{-1/(n-1)}.
    CHECK(rel(e.value, e.raw * std::pow(64.0, -1.0 / 63.0)) < 1e-14);
    CHECK(greedy_fekete_capacity(RegionDescriptor::make_ellipse(1.5), 64).uncertainty >= 0.0);
}

TEST_CASE("known capacities of closed ellipses") {
    for (double rho : {1.2, 1.5, 2.0}) {
        const RegionDescriptor r = RegionDescriptor::make_ellipse(rho);
        REQUIRE(r.analytic_capacity().has_value());
        CHECK(*r.analytic_capacity() == doctest::Approx(rho / 2));
        CHECK(rel(greedy_fekete_capacity(r, 64).value, rho / 2) < 0.05);
    }
}

TEST_CASE("lemniscates: preimage capacity identity") {
    const CapacityReport z2 = preimage_capacity_check({1.0, 0.0, 0.0}, 0.8);
    CHECK(*z2.analytic == 0.8);
    CHECK(*z2.relative_error() < 0.05);

    const CapacityReport z2m1 = preimage_capacity_check({1.0, 0.0, -1.0}, 0.9);
    CHECK(*z2m1.relative_error() < 0.05);

    const double lvl = 0.5 * std::exp(-0.1);
    const CapacityReport t8 = preimage_capacity_check(kChebyshev8, lvl);
    CHECK(*t8.analytic == doctest::Approx(0.45242).epsilon(1e-5));
    CHECK(*t8.relative_error() < 0.05);

    std::vector<cdouble> roots;
    for (double x : chebyshev_zeros(8)) roots.emplace_back(x, 0.0);
    CHECK(rel(preimage_capacity_check_roots(roots, lvl).estimate, t8.estimate) < 1e-6);
}

TEST_CASE("lemniscate tracing") {
    // |z^2 - 1| = 0.25 is two ovals around +-1; every traced point lies on the level set.
    const std::vector<cdouble> roots{{-1.0, 0.0}, {1.0, 0.0}};
    std::vector<cdouble> origins;
    const std::vector<cdouble> pts = trace_lemniscate(roots, std::log(0.25), 128, &origins);
    REQUIRE(pts.size() == 256);
    REQUIRE(origins.size() == pts.size());
    for (size_t k = 0; k < pts.size(); ++k) {
        CHECK(std::abs(std::abs(pts[k] * pts[k] - 1.0) - 0.25) < 1e-9);
        CHECK(std::abs(pts[k] - origins[k]) < 0.2);
    }
    CHECK_THROWS_AS(trace_lemniscate(roots, -1000.0), TracingFailure);
    CHECK_THROWS_AS(trace_lemniscate({}, 0.0), TracingFailure);

    const std::vector<cdouble> r = polynomial_roots({1.0, 0.0, -1.0});
    REQUIRE(r.size() == 2);
    CHECK(std::abs(std::abs(r[0]) - 1.0) < 1e-14);
    CHECK(std::abs(r[0] + r[1]) < 1e-14);
}

TEST_CASE("lune capacity bounds") {
    const LuneReport l20 = lune_capacity_bounds(20, 0.1);
    CHECK(l20.within);
    CHECK(*l20.capacity.lower == doctest::Approx(0.25 * std::exp(-2.0)));
    CHECK(*l20.capacity.upper == doctest::Approx(std::exp(-2.0)));
    CHECK(l20.capacity.estimate > 0.0338);
    CHECK(l20.capacity.estimate < 0.1353);

    const LuneReport l40 = lune_capacity_bounds(40, 0.1);
    CHECK(l40.within);
    CHECK(l40.capacity.estimate < l20.capacity.estimate);
    CHECK(rel(l40.rescaled, l20.rescaled) < 0.10);

    CHECK_THROWS_AS(lune_capacity_bounds(5, 0.1), ConfigError);
}

TEST_CASE("lune boundary covers both arcs") {
    const RegionDescriptor lune = RegionDescriptor::make_lune(20, 0.1);
    const double s = lune.scale();
    CHECK(s == doctest::Approx(std::exp(-2.0)));
    size_t on_circle = 0;
    size_t on_arc = 0;
    for (const cdouble& zeta : lune.boundary(400)) {
        const cdouble w = 1.0 + s * zeta;
        CHECK(std::abs(w) >= 1.0 - 1e-12);
        CHECK(std::abs(w - 1.0) <= s * (1.0 + 1e-12));
        if (std::abs(std::abs(w) - 1.0) < 1e-12) ++on_circle;
        if (std::abs(std::abs(w - 1.0) - s) < 1e-12 * s) ++on_arc;
    }
    CHECK(on_circle > 50);
    CHECK(on_arc > 50);
}

TEST_CASE("degenerate input") {
    CHECK_THROWS_AS(greedy_fekete_capacity(RegionDescriptor::make_disk(1.0), 4), std::invalid_argument);
    const RegionDescriptor few = RegionDescriptor::make_point_cloud({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {1, 0}});
    CHECK_THROWS_AS(greedy_fekete_capacity(few, 8), DegenerateRegion);
}

TEST_CASE("region parsing") {
    CHECK(parse_region(json::parse(R"({"kind":"disk","r":2})")).radius == 2.0);
    CHECK(parse_region(json::parse(R"({"kind":"disk","r":1,"center":[0.5,-1]})")).center == cdouble(0.5, -1.0));
    CHECK(parse_region(json::parse(R"({"kind":"segment","a":-1,"b":[1,0]})")).kind == RegionKind::segment);
    CHECK(parse_region(json::parse(R"({"kind":"lune","n":20,"eps":0.1})")).n == 20);
    CHECK(parse_region(json::parse(R"({"kind":"ellipse","rho":1.5})")).rho == 1.5);
    const RegionDescriptor lem = parse_region(json::parse(R"({"kind":"lemniscate","coeffs":[1,0,-1],"rho":0.9})"));
    CHECK(lem.roots.size() == 2);
    CHECK(lem.log_level == doctest::Approx(2 * std::log(0.9)));
    CHECK(parse_region(json::parse(R"({"kind":"lemniscate","chebyshev":8,"rho":0.45})")).roots.size() == 8);
    CHECK(parse_region(json::parse(R"({"kind":"point_cloud","points":[[0,0],[1,1],2]})")).points.size() == 3);

    for (const char* bad : {R"({"kind":"disk","r":1,"radius":2})", R"({"kind":"blob"})", R"({"r":1})",
                            R"({"kind":"disk","r":-1})", R"({"kind":"ellipse","rho":0.5})",
                            R"({"kind":"lemniscate","coeffs":[2,0,-1],"rho":0.9})",
                            R"({"kind":"lemniscate","coeffs":[1,0,-1],"roots":[1,-1],"rho":0.9})",
                            R"({"kind":"lune","n":2.5,"eps":0.1})", R"({"kind":"disk","r":"one"})"}) {
        CAPTURE(bad);
        CHECK_THROWS_AS(parse_region(json::parse(bad)), ConfigError);
    }
}

TEST_CASE("report JSON") {
    const CapacityReport rep = capacity_report(RegionDescriptor::make_disk(1.0));
    const json j = rep.to_json();
    for (const char* key : {"estimate", "analytic", "lower", "upper", "n_points"}) CHECK(j.contains(key));
    CHECK(j.at("n_points") == 64);
    CHECK(j.at("analytic") == 1.0);
    CHECK(j.at("lower").is_null());
    CHECK(*rep.relative_error() < 0.05);
}
