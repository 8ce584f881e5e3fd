#include <cmath>
#include <numbers>

#include "doctest.h"

#include "potlab/errors.hpp"
#include "potlab/orthopoly.hpp"

using namespace potlab;

namespace {

double dabs(const Real& x) { return std::abs(x.to_double()); }

const LejaSequence& arcsine_leja() {
    static const LejaSequence s = [] {
        PrecisionContext ctx(2048);
        return leja_weighted(target_arcsine(), 12, CandidateGrid::chebyshev());
    }();
    return s;
}

SigmaBuildConfig sigma_config(size_t n_max, unsigned bits, WeightSchedule schedule) {
    SigmaBuildConfig cfg;
    cfg.q = 0.4;
    cfg.n_max = n_max;
    cfg.bits = bits;
    cfg.schedule = schedule;
    return cfg;
}

const SigmaConstruction& adaptive_sigma_8() {
    static const SigmaConstruction s = construct_sigma(sigma_config(8, 1024, WeightSchedule::adaptive), arcsine_leja());
    return s;
}

// Monic P_n from the moment (Hankel) system, solved by Gaussian elimination at
// whatever precision is active; coefficients c_0..c_{n-1} of x^0..x^{n-1}.
std::vector<Real> monic_from_moments(const DiscreteMeasure& m, size_t n) {
    std::vector<Real> mom(2 * n + 1, Real(0));
    for (const Atom& a : m.atoms()) {
        Real p = a.weight;
        for (size_t k = 0; k <= 2 * n; ++k) {
            mom[k] += p;
            p *= a.location;
        }
    }
    std::vector<std::vector<Real>> A(n, std::vector<Real>(n + 1));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) A[i][j] = mom[i + j];
        A[i][n] = -mom[i + n];
    }
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        for (size_t r = c + 1; r < n; ++r) {
            if (abs(A[r][c]) > abs(A[piv][c])) piv = r;
        }
        std::swap(A[c], A[piv]);
        for (size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const Real f = A[r][c] / A[c][c];
            for (size_t k = c; k <= n; ++k) A[r][k] -= f * A[c][k];
        }
    }
    std::vector<Real> coef(n);
    for (size_t i = 0; i < n; ++i) coef[i] = A[i][n] / A[i][i];
    return coef;
}

Real horner(const std::vector<Real>& coef, const Real& x) {
    Real v(1);
    for (size_t k = coef.size(); k-- > 0;) v = v * x + coef[k];
    return v;
}

// Sign-change scan on [-1, 1] followed by bisection.
std::vector<Real> isolate_roots(const std::vector<Real>& coef, int scan) {
    std::vector<Real> roots;
    Real prev_x(-1);
    Real prev_v = horner(coef, prev_x);
    for (int k = 1; k <= scan; ++k) {
        const Real x = Real(-1) + Real(2 * k) / Real(scan);
        const Real v = horner(coef, x);
        if (prev_v.sign() * v.sign() < 0) {
            Real lo = prev_x;
            Real hi = x;
            const int lo_sign = prev_v.sign();
            for (int it = 0; it < 400; ++it) {
                const Real mid = (lo + hi) / Real(2);
                if (horner(coef, mid).sign() == lo_sign) lo = mid; else hi = mid;
            }
            roots.push_back((lo + hi) / Real(2));
        }
        prev_x = x;
        prev_v = v;
    }
    return roots;
}

DiscreteMeasure two_atoms() {
    DiscreteMeasure m;
    m.add(Real(-1), Real(0.5));
    m.add(Real(1), Real(0.5));
    return m;
}

}  // namespace

TEST_CASE("precision floor") {
    CHECK(precision_floor(0.4, 10) == 525);
    CHECK(precision_floor(0.4, 1) == 132);
}

TEST_CASE("build_sigma with the geometric schedule") {
    const DiscreteMeasure s = build_sigma(sigma_config(3, 512, WeightSchedule::geometric_square), arcsine_leja());
    PrecisionContext ctx(512);
    REQUIRE(s.size() == 3);
    const Real tol = ldexp(Real(1), -500);
    CHECK(abs(s.atoms()[0].weight - Real("0.4")) < tol);
    CHECK(abs(s.atoms()[1].weight - Real("0.0256")) < tol);
    CHECK(abs(s.atoms()[2].weight - Real("0.000262144")) < tol);
    CHECK(s.atoms()[2].weight < s.atoms()[1].weight);
    for (size_t k = 0; k < 3; ++k) CHECK(s.atoms()[k].location == arcsine_leja().points[k]);

    const DiscreteMeasure s8 = build_sigma(sigma_config(8, 512, WeightSchedule::geometric_square), arcsine_leja());
    for (size_t n = 0; n + 1 < s8.size(); ++n) {
        Real tail(0);
        for (size_t k = n + 1; k < s8.size(); ++k) tail += s8.atoms()[k].weight;
        CHECK(tail < s8.atoms()[n].weight);
    }

    SigmaBuildConfig bad = sigma_config(3, 512, WeightSchedule::geometric_square);
    bad.q = 0.6;
    CHECK_THROWS_AS(build_sigma(bad, arcsine_leja()), ConfigError);
    CHECK_THROWS_AS(build_sigma(sigma_config(10, 400, WeightSchedule::geometric_square), arcsine_leja()),
                    PrecisionTooLow);
}

TEST_CASE("Stieltjes recurrence examples") {
    PrecisionContext ctx(256);
    const DiscreteMeasure m = two_atoms();
    const RecurrenceCoeffs rc = stieltjes_recurrence(m, 1);
    CHECK(rc.a[0].is_zero());
    CHECK(rc.b[0] == Real(1));
    CHECK(dabs(rc.b[1] - Real(1)) < 1e-70);
    CHECK(stieltjes_recurrence(m, 0).b[0] == m.total_mass());
    CHECK(stieltjes_recurrence(m, 2).size() == 2);
    CHECK_THROWS_AS(stieltjes_recurrence(m, 3), BreakdownError);

    const DiscreteMeasure gc = gauss_chebyshev_measure(64);
    const RecurrenceCoeffs c = stieltjes_recurrence(gc, 10);
    for (size_t k = 0; k <= 10; ++k) CHECK(dabs(c.a[k]) < 1e-3);
    CHECK(dabs(c.b[1] - Real(0.5)) < 1e-3);
    for (size_t k = 2; k <= 10; ++k) CHECK(dabs(c.b[k] - Real(0.25)) < 1e-3);
    CHECK(c.b[0] == gc.total_mass());
}

TEST_CASE("zeros of orthogonal polynomials") {
    PrecisionContext ctx(256);
    const ZeroSet z1 = orthopoly_zeros(stieltjes_recurrence(two_atoms(), 1), 1);
    REQUIRE(z1.roots.size() == 1);
    CHECK(dabs(z1.roots[0]) < 1e-37);

    const ZeroSet z5 = orthopoly_zeros(stieltjes_recurrence(gauss_chebyshev_measure(64), 5), 5);
    REQUIRE(z5.roots.size() == 5);
    for (int k = 1; k <= 5; ++k) {
        const double expected = std::cos((2 * k - 1) * std::numbers::pi / 10);
        CHECK(std::abs(z5.roots[5 - k].to_double() - expected) < 1e-3);
    }
    for (const Real& w : z5.widths) CHECK(w <= ldexp(Real(1), -128));

    // P_n(z) from the recurrence equals the product over its zeros.
    const RecurrenceCoeffs rc = stieltjes_recurrence(gauss_legendre_measure(50), 7);
    const ZeroSet z7 = orthopoly_zeros(rc, 7);
    const Complex z(Real(0.3), Real(0.9));
    Complex prod(1);
    for (const Real& r : z7.roots) prod = prod * (z - Complex(r));
    CHECK(dabs(abs(evaluate_monic(rc, 7, z) - prod)) < 1e-36);
    CHECK(sturm_count(rc, 7, Real(0)) == 3);
}

TEST_CASE("orthogonality, interlacing and confinement") {
    PrecisionContext ctx(256);
    const DiscreteMeasure gl = gauss_legendre_measure(200);
    const RecurrenceCoeffs rc = stieltjes_recurrence(gl, 21);
    const Real tol = ldexp(Real(1), -64);
    ZeroSet prev = orthopoly_zeros(rc, 1);
    for (size_t n = 1; n <= 20; ++n) {
        CAPTURE(n);
        CHECK(orthogonality_residual(gl, rc, n) < tol);
        const ZeroSet next = orthopoly_zeros(rc, n + 1);
        for (size_t k = 0; k < n; ++k) {
            CHECK(next.roots[k] < prev.roots[k]);
            CHECK(prev.roots[k] < next.roots[k + 1]);
        }
        CHECK(next.roots.front() >= gl.atoms().front().location);
        CHECK(next.roots.back() <= gl.atoms().back().location);
        prev = next;
    }
}

TEST_CASE("recurrence depends on the first 2n moments only") {
    PrecisionContext ctx(256);
    const DiscreteMeasure m = gauss_legendre_measure(40);
    const size_t n = 10;
    const RecurrenceCoeffs rc = stieltjes_recurrence(m, n);
    const DiscreteMeasure companion = gauss_quadrature(rc, n);
    REQUIRE(companion.size() == n);
    // Moments 0..2n-1 agree.
    for (long k = 0; k < static_cast<long>(2 * n); ++k) {
        Real a(0);
        Real b(0);
        for (const Atom& x : m.atoms()) a += x.weight * pow(x.location, k);
        for (const Atom& x : companion.atoms()) b += x.weight * pow(x.location, k);
        CHECK(dabs(a - b) < 1e-36);
    }
    const RecurrenceCoeffs rc2 = stieltjes_recurrence(companion, n);
    const Real tol = ldexp(Real(1), -64);
    for (size_t k = 0; k < n; ++k) {
        CHECK(abs(rc.a[k] - rc2.a[k]) < tol);
        CHECK(abs(rc.b[k] - rc2.b[k]) < tol);
    }
}

TEST_CASE("zeros of P_3(sigma) against an independent moment-based root isolation") {
    const DiscreteMeasure s = build_sigma(sigma_config(8, 512, WeightSchedule::geometric_square), arcsine_leja());
    PrecisionContext ctx(4096);
    const std::vector<Real> oracle = isolate_roots(monic_from_moments(s, 3), 20000);
    REQUIRE(oracle.size() == 3);
    const ZeroSet zs = orthopoly_zeros(stieltjes_recurrence(s, 3), 3);
    for (size_t k = 0; k < 3; ++k) CHECK(dabs(zs.roots[k] - oracle[k]) < 1e-70);
}

TEST_CASE("geometric weights: zeros of P_3 within q^9 of the Leja points") {
    const DiscreteMeasure s = build_sigma(sigma_config(8, 512, WeightSchedule::geometric_square), arcsine_leja());
    PrecisionContext ctx(512);
    const ZeroStabilityReport r = zero_stability_check(s, arcsine_leja(), 3, Real("0.4"));
    CHECK(r.max_deviation < pow(Real("0.4"), 9));
}

TEST_CASE("geometric weights: zeros of P_6 within q^36 of the Leja points") {
    const DiscreteMeasure s = build_sigma(sigma_config(8, 512, WeightSchedule::geometric_square), arcsine_leja());
    PrecisionContext ctx(512);
    const ZeroStabilityReport r = zero_stability_check(s, arcsine_leja(), 6, Real("0.4"));
    CHECK(r.bound.to_double() == doctest::Approx(4.7e-15).epsilon(0.01));
    CHECK(r.passed);
}

TEST_CASE("zero stability") {
    PrecisionContext ctx(1024);
    const Real q("0.4");
    const SigmaConstruction& sc = adaptive_sigma_8();
    const DiscreteMeasure& s = sc.measure;

    // n = 1: the single zero is the mean of sigma.
    Real num(0);
    for (const Atom& a : s.atoms()) num += a.weight * a.location;
    const Real mean = num / s.total_mass();
    const ZeroStabilityReport r1 = zero_stability_check(s, arcsine_leja(), 1, q);
    CHECK(dabs(r1.zeros.roots[0] - mean) < 1e-150);
    CHECK(r1.max_deviation < q);

    for (size_t n = 1; n <= 8; ++n) {
        CAPTURE(n);
        const ZeroStabilityReport r = zero_stability_check(s, arcsine_leja(), n, q);
        CHECK(r.passed);
        CHECK(r.margin >= Real(2));
        CHECK(orthogonality_residual(s, stieltjes_recurrence(s, n), n) < ldexp(Real(1), -256));
    }
    CHECK(stieltjes_recurrence(s, 0).b[0] == s.total_mass());
}

TEST_CASE("pairing fails when the precision cannot carry the weights") {
    // 12 geometric weights at 64 bits: q^100 is far below the working precision.
    PrecisionContext ctx(64);
    const Real q("0.4");
    DiscreteMeasure low;
    for (long k = 1; k <= 12; ++k) low.add(arcsine_leja().points[k - 1], pow(q, k * k));
    CHECK_NOTHROW(zero_stability_check(low, arcsine_leja(), 4, q));
    CHECK_THROWS_AS(zero_stability_check(low, arcsine_leja(), 10, q), PairingFailure);
}

TEST_CASE("stress audit: zero perturbation reproduces the baseline") {
    PrecisionContext ctx(1024);
    const Real q("0.4");
    const DiscreteMeasure sigma4 = adaptive_sigma_8().measure.prefix(4);
    const std::vector<StressCase> family = stress_family(arcsine_leja(), 4);
    REQUIRE(family.size() == 8);
    CHECK(family.front().name == "zero");
    const StressReport r = stress_audit(sigma4, arcsine_leja(), 4, pow(q, 25), q, std::span(family).first(1));
    const ZeroStabilityReport base = zero_stability_check(sigma4, arcsine_leja(), 4, q);
    CHECK(r.rows[0].max_deviation == base.max_deviation);
}

TEST_CASE("stress audit with eps_5 = q^25 on the geometric sigma_4") {
    const DiscreteMeasure s = build_sigma(sigma_config(8, 512, WeightSchedule::geometric_square), arcsine_leja());
    PrecisionContext ctx(512);
    const Real q("0.4");
    const std::vector<StressCase> family = stress_family(arcsine_leja(), 4);
    const StressReport r = stress_audit(s.prefix(4), arcsine_leja(), 4, pow(q, 25), q, family);
    for (const StressRow& row : r.rows) {
        CAPTURE(row.name);
        CHECK(row.within);
    }
    CHECK(r.violations == 0);
}

TEST_CASE("stress audit with the adaptive eps_5") {
    PrecisionContext ctx(1024);
    const Real q("0.4");
    const SigmaConstruction& sc = adaptive_sigma_8();
    const std::vector<StressCase> family = stress_family(arcsine_leja(), 4);
    const Real eps5 = sc.measure.atoms()[4].weight;
    const StressReport r = epsilon_stress_test(sc.measure.prefix(4), arcsine_leja(), 4, eps5, q, family);
    CHECK(r.violations == 0);
    CHECK(r.worst_deviation < r.bound);
    // A much larger perturbation is caught.
    CHECK_THROWS_AS(epsilon_stress_test(sc.measure.prefix(4), arcsine_leja(), 4, pow(q, 9), q, family),
                    StressFailure);
}

TEST_CASE("weak-* distance of zero counting measures") {
    PrecisionContext ctx(256);
    ZeroSet cheb;
    for (double x : chebyshev_zeros(50)) cheb.roots.emplace_back(x);
    cheb.degree = 50;
    const Real ks50 = weak_star_distance(counting_measure(cheb), target_arcsine());
    CHECK(ks50 < Real(0.03));
    CHECK(dabs(ks50 - Real(0.01)) < 1e-12);

    ZeroSet single;
    single.roots.emplace_back(0);
    single.degree = 1;
    CHECK(weak_star_distance(counting_measure(single), target_arcsine()) == Real(0.5));

    const DiscreteMeasure gl = gauss_legendre_measure(200);
    const ZeroSet z20 = orthopoly_zeros(stieltjes_recurrence(gl, 20), 20);
    CHECK(weak_star_distance(counting_measure(z20), target_arcsine()) < Real(0.08));
}

TEST_CASE("potential asymptotics") {
    PrecisionContext ctx(1024);
    const SigmaConstruction& sc = adaptive_sigma_8();
    const TargetMeasure mu = target_arcsine();
    const std::vector<Complex> z{Complex(2)};

    const std::vector<size_t> one{1};
    const AsymptoticsRow r1 = potential_asymptotics_check(sc.measure, mu, one, z)[0];
    const Real x11 = zero_stability_check(sc.measure, arcsine_leja(), 1, Real("0.4")).zeros.roots[0];
    CHECK(dabs(r1.residual - (log(abs(Real(2) - x11)) + mu.potential(Complex(2)))) < 1e-150);

    const std::vector<size_t> eight{8};
    const AsymptoticsRow r8 = potential_asymptotics_check(sc.measure, mu, eight, z)[0];
    const Real leja8 = verify_weighted_asymptotics(arcsine_leja(), mu, z, 8)[0];
    CHECK(abs(r8.residual - leja8) < pow(Real("0.4"), 64));
    CHECK(dabs(r8.residual) < 0.2);
}

TEST_CASE("potential asymptotics: residual at n = 12 below n = 6") {
    const DiscreteMeasure s = build_sigma(sigma_config(12, 1024, WeightSchedule::geometric_square), arcsine_leja());
    PrecisionContext ctx(1024);
    const std::vector<Complex> z{Complex(2)};
    const std::vector<size_t> ns{6, 12};
    const std::vector<AsymptoticsRow> rows = potential_asymptotics_check(s, target_arcsine(), ns, z);
    CAPTURE(rows[0].residual.to_double());
    CAPTURE(rows[1].residual.to_double());
    CHECK(abs(rows[1].residual) < abs(rows[0].residual));
}
