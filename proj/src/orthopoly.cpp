#include "potlab/orthopoly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "potlab/errors.hpp"
#include "potlab/quadrature.hpp"

namespace potlab {

unsigned precision_floor(double q, size_t n) {
    const double nn = static_cast<double>(n) * static_cast<double>(n);
    return static_cast<unsigned>(std::ceil(3.0 * nn * std::log2(1.0 / q))) + 128U;
}

Real decimal_real(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return Real(std::string_view(buf, static_cast<size_t>(res.ptr - buf)));
}

RecurrenceCoeffs stieltjes_recurrence(const DiscreteMeasure& m, size_t n) {
    if (m.empty()) throw BreakdownError("stieltjes_recurrence: empty measure");
    const auto atoms = m.atoms();
    const size_t count = atoms.size();
    const long bits = static_cast<long>(PrecisionContext::current());

    RecurrenceCoeffs rc;
    rc.b.push_back(m.total_mass());
    std::vector<Real> p_prev(count, Real(0));
    std::vector<Real> p_cur(count, Real(1));
    Real norm_prev;
    Real norm = m.total_mass();
    Real reference = norm;

    for (size_t k = 0; k <= n; ++k) {
        if (k > 0) {
            if (norm.sign() <= 0 || norm <= ldexp(reference, -(3 * bits) / 2)) {
                // P_n is the node polynomial of an n-atom measure.
                if (k == n) break;
                throw BreakdownError("stieltjes_recurrence: norm of P_" + std::to_string(k) +
                                     " vanished (degenerate measure or insufficient precision)");
            }
            rc.b.push_back(norm / norm_prev);
        }
        CompensatedSum moment;
        for (size_t i = 0; i < count; ++i) moment.add(atoms[i].weight * atoms[i].location * p_cur[i] * p_cur[i]);
        rc.a.push_back(moment.value() / norm);
        if (k == n) break;

        const Real& a = rc.a.back();
        const Real& b = rc.b.back();
        CompensatedSum next_norm;
        CompensatedSum next_reference;
        for (size_t i = 0; i < count; ++i) {
            const Real lead = (atoms[i].location - a) * p_cur[i];
            Real next = lead;
            Real magnitude = abs(lead);
            if (k > 0) {
                const Real tail = b * p_prev[i];
                next -= tail;
                magnitude += abs(tail);
            }
            next_norm.add(atoms[i].weight * next * next);
            next_reference.add(atoms[i].weight * magnitude * magnitude);
            p_prev[i] = std::move(p_cur[i]);
            p_cur[i] = std::move(next);
        }
        norm_prev = norm;
        norm = next_norm.value();
        reference = next_reference.value();
    }
    return rc;
}

namespace {

// P_n at every atom of m.
std::vector<Real> monic_values_at_atoms(const DiscreteMeasure& m, const RecurrenceCoeffs& rc, size_t n) {
    std::vector<Real> values;
    values.reserve(m.size());
    for (const Atom& atom : m.atoms()) {
        Real prev(0);
        Real cur(1);
        for (size_t k = 0; k < n; ++k) {
            Real next = (atom.location - rc.a[k]) * cur;
            if (k > 0) next -= rc.b[k] * prev;
            prev = std::move(cur);
            cur = std::move(next);
        }
        values.push_back(std::move(cur));
    }
    return values;
}

void require_steps(const RecurrenceCoeffs& rc, size_t n) {
    if (n == 0 || n > rc.size()) {
        throw std::invalid_argument("recurrence has " + std::to_string(rc.size()) + " steps, degree " +
                                    std::to_string(n) + " requested");
    }
}

struct MonicValue {
    Real p;
    Real dp;
};

MonicValue monic_with_derivative(const RecurrenceCoeffs& rc, size_t n, const Real& x) {
    Real p_prev(0);
    Real p(1);
    Real d_prev(0);
    Real d(0);
    for (size_t k = 0; k < n; ++k) {
        const Real shift = x - rc.a[k];
        Real p_next = shift * p;
        Real d_next = p + shift * d;
        if (k > 0) {
            p_next -= rc.b[k] * p_prev;
            d_next -= rc.b[k] * d_prev;
        }
        p_prev = std::move(p);
        p = std::move(p_next);
        d_prev = std::move(d);
        d = std::move(d_next);
    }
    return {std::move(p), std::move(d)};
}

}  // namespace

Real orthogonality_residual(const DiscreteMeasure& m, const RecurrenceCoeffs& rc, size_t n) {
    require_steps(rc, n);
    // P_n vanishes on an n-atom support.
    if (m.size() <= n) return Real(0);
    const std::vector<Real> pn = monic_values_at_atoms(m, rc, n);
    const auto atoms = m.atoms();
    CompensatedSum pn_norm;
    for (size_t i = 0; i < atoms.size(); ++i) pn_norm.add(atoms[i].weight * pn[i] * pn[i]);
    const Real pn_len = sqrt(pn_norm.value());
    if (pn_len.is_zero()) return Real(0);

    Real worst(0);
    std::vector<Real> power(atoms.size(), Real(1));
    for (size_t k = 0; k < n; ++k) {
        CompensatedSum inner;
        CompensatedSum power_norm;
        for (size_t i = 0; i < atoms.size(); ++i) {
            inner.add(atoms[i].weight * pn[i] * power[i]);
            power_norm.add(atoms[i].weight * power[i] * power[i]);
        }
        const Real denom = pn_len * sqrt(power_norm.value());
        if (!denom.is_zero()) worst = max(worst, abs(inner.value()) / denom);
        for (size_t i = 0; i < atoms.size(); ++i) power[i] *= atoms[i].location;
    }
    return worst;
}

size_t sturm_count(const RecurrenceCoeffs& rc, size_t n, const Real& x) {
    require_steps(rc, n);
    const Real tiny = ldexp(Real(1) + abs(x), -2 * static_cast<long>(PrecisionContext::current()));
    size_t count = 0;
    Real d = rc.a[0] - x;
    if (d.sign() < 0) ++count;
    for (size_t i = 1; i < n; ++i) {
        if (d.is_zero()) d = tiny;
        d = (rc.a[i] - x) - rc.b[i] / d;
        if (d.sign() < 0) ++count;
    }
    return count;
}

ZeroSet orthopoly_zeros(const RecurrenceCoeffs& rc, size_t n) {
    require_steps(rc, n);
    for (size_t k = 1; k < n; ++k) {
        if (!(rc.b[k] > Real(0))) throw BreakdownError("orthopoly_zeros: non-positive recurrence coefficient");
    }
    const long bits = static_cast<long>(PrecisionContext::current());
    const Real width = ldexp(Real(1), -bits / 2);

    // Gershgorin interval of the Jacobi matrix.
    Real lo;
    Real hi;
    for (size_t i = 0; i < n; ++i) {
        Real radius(0);
        if (i > 0) radius += sqrt(rc.b[i]);
        if (i + 1 < n) radius += sqrt(rc.b[i + 1]);
        const Real l = rc.a[i] - radius;
        const Real h = rc.a[i] + radius;
        if (i == 0 || l < lo) lo = l;
        if (i == 0 || h > hi) hi = h;
    }
    const Real pad = (hi - lo) * Real(1e-3) + Real(1e-30);
    lo -= pad;
    hi += pad;

    ZeroSet zs;
    zs.degree = n;
    for (size_t k = 0; k < n; ++k) {
        Real left = lo;
        Real right = hi;
        // Isolate: exactly k zeros below left, k+1 below right.
        while (true) {
            const size_t cl = sturm_count(rc, n, left);
            const size_t cr = sturm_count(rc, n, right);
            if (cl == k && cr == k + 1) break;
            if (right - left <= width) break;
            const Real mid = (left + right) / Real(2);
            if (sturm_count(rc, n, mid) <= k) {
                left = mid;
            } else {
                right = mid;
            }
        }
        // Safeguarded Newton inside the certified bracket.
        Real x = (left + right) / Real(2);
        int stalled = 0;
        for (int iter = 0; iter < 4 * bits + 64 && right - left > width; ++iter) {
            const Real before = right - left;
            if (sturm_count(rc, n, x) <= k) {
                left = max(left, x);
            } else {
                right = min(right, x);
            }
            if (right - left <= width) break;
            const MonicValue v = monic_with_derivative(rc, n, x);
            Real next = (left + right) / Real(2);
            bool newton = false;
            if (!v.dp.is_zero()) {
                const Real step = v.p / v.dp;
                if (abs(step) < width / Real(4)) {
                    // Close the bracket around the converged iterate.
                    const Real l2 = max(left, x - width / Real(2));
                    const Real r2 = min(right, x + width / Real(2));
                    if (sturm_count(rc, n, l2) <= k) left = l2;
                    if (sturm_count(rc, n, r2) > k) right = r2;
                    x = (left + right) / Real(2);
                    continue;
                }
                const Real candidate = x - step;
                if (candidate > left && candidate < right && stalled < 3) {
                    next = candidate;
                    newton = true;
                }
            }
            stalled = (newton && right - left > before / Real(2)) ? stalled + 1 : 0;
            x = std::move(next);
        }
        zs.roots.push_back((left + right) / Real(2));
        zs.widths.push_back(right - left);
    }
    return zs;
}

Complex evaluate_monic(const RecurrenceCoeffs& rc, size_t n, const Complex& z) {
    if (n > rc.size()) throw std::invalid_argument("evaluate_monic: degree exceeds recurrence length");
    Complex prev(Real(0));
    Complex cur(Real(1));
    for (size_t k = 0; k < n; ++k) {
        Complex next = (z - Complex(rc.a[k])) * cur;
        if (k > 0) next -= Complex(rc.b[k]) * prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

DiscreteMeasure gauss_quadrature(const RecurrenceCoeffs& rc, size_t n) {
    const ZeroSet zs = orthopoly_zeros(rc, n);
    DiscreteMeasure out(Real(-1) - Real(1e6), Real(1) + Real(1e6));
    for (const Real& x : zs.roots) {
        CompensatedSum christoffel;
        Real prev(0);
        Real cur(1);
        Real norm = rc.b[0];
        for (size_t j = 0; j < n; ++j) {
            christoffel.add(cur * cur / norm);
            Real next = (x - rc.a[j]) * cur;
            if (j > 0) next -= rc.b[j] * prev;
            prev = std::move(cur);
            cur = std::move(next);
            if (j + 1 < n) norm *= rc.b[j + 1];
        }
        out.add(x, Real(1) / christoffel.value());
    }
    return out;
}

DiscreteMeasure gauss_legendre_measure(size_t atoms) {
    const GaussRule& rule = gauss_legendre(static_cast<int>(atoms));
    DiscreteMeasure m;
    for (size_t i = 0; i < atoms; ++i) m.add(rule.nodes[i], rule.weights[i] / Real(2));
    return m;
}

DiscreteMeasure gauss_chebyshev_measure(size_t atoms) {
    DiscreteMeasure m;
    const Real n(static_cast<long>(atoms));
    const Real pi = Real::pi();
    for (size_t k = atoms; k >= 1; --k) {
        m.add(cos(Real(static_cast<long>(2 * k - 1)) * pi / (Real(2) * n)), Real(1) / n);
    }
    return m;
}

namespace {

// Deviations |x_k - paired zero| in Leja order; empty when the nearest-point
// pairing is not a bijection.
std::optional<std::vector<Real>> pair_zeros(const ZeroSet& zs, const LejaSequence& leja, size_t n,
                                            std::vector<size_t>* matched) {
    std::vector<size_t> match(zs.roots.size());
    std::vector<bool> used(n, false);
    for (size_t r = 0; r < zs.roots.size(); ++r) {
        size_t best = 0;
        Real best_d;
        for (size_t k = 0; k < n; ++k) {
            Real d = abs(zs.roots[r] - leja.points[k]);
            if (k == 0 || d < best_d) {
                best = k;
                best_d = std::move(d);
            }
        }
        match[r] = best;
    }
    std::vector<Real> dev(n);
    for (size_t r = 0; r < match.size(); ++r) {
        if (used[match[r]]) return std::nullopt;
        used[match[r]] = true;
        dev[match[r]] = abs(zs.roots[r] - leja.points[match[r]]);
    }
    if (matched != nullptr) *matched = std::move(match);
    return dev;
}

Real max_of(const std::vector<Real>& values) {
    Real worst(0);
    for (const Real& v : values) worst = max(worst, v);
    return worst;
}

// Worst zero deviation of P_n(measure) from x_1..x_n, +inf on pairing or
// recurrence failure.
Real perturbed_deviation(const DiscreteMeasure& measure, const LejaSequence& leja, size_t n) {
    try {
        const RecurrenceCoeffs rc = stieltjes_recurrence(measure, n);
        const ZeroSet zs = orthopoly_zeros(rc, n);
        const auto dev = pair_zeros(zs, leja, n, nullptr);
        if (!dev) return Real::infinity();
        return max_of(*dev);
    } catch (const BreakdownError&) {
        return Real::infinity();
    }
}

Real stress_bound(const LejaSequence& leja, size_t n, const Real& q) {
    const Real qn = pow(q, static_cast<long>(n * n));
    if (n < 2) return qn / Real(2);
    return min(qn, leja.delta(n)) / Real(2);
}

DiscreteMeasure point_mass(const Real& at) {
    DiscreteMeasure nu;
    nu.add(at, Real(1));
    return nu;
}

std::vector<StressCase> cascade_family(const LejaSequence& leja, size_t n) {
    std::vector<StressCase> family = stress_family(leja, n);
    for (int j = 0; j < 64; ++j) {
        const Real y = Real(-1) + Real(2 * j + 1) / Real(64);
        family.push_back({"delta(grid " + std::to_string(j) + ")", point_mass(y)});
    }
    for (size_t j = n; j < leja.size(); ++j) {
        family.push_back({"delta(x_" + std::to_string(j + 1) + ")", point_mass(leja.points[j])});
    }
    return family;
}

void validate(const SigmaBuildConfig& cfg, const LejaSequence& leja) {
    if (!(cfg.q > 0.0 && cfg.q < 0.5)) throw ConfigError("build_sigma: q must lie in (0, 1/2)");
    if (cfg.n_max < 1) throw ConfigError("build_sigma: n_max must be >= 1");
    if (leja.size() < cfg.n_max) throw ConfigError("build_sigma: Leja sequence shorter than n_max");
    const unsigned floor = precision_floor(cfg.q, cfg.n_max);
    if (cfg.bits < floor) {
        throw PrecisionTooLow("build_sigma: " + std::to_string(cfg.bits) + " bits below the floor of " +
                              std::to_string(floor));
    }
}

}  // namespace

SigmaConstruction construct_sigma(const SigmaBuildConfig& cfg, const LejaSequence& leja) {
    validate(cfg, leja);
    PrecisionContext ctx(cfg.bits);
    const Real q = decimal_real(cfg.q);

    SigmaConstruction out;
    out.leja = leja;
    out.schedule = cfg.schedule;

    if (cfg.schedule == WeightSchedule::geometric_square) {
        for (size_t k = 1; k <= cfg.n_max; ++k) {
            out.measure.add(leja.points[k - 1], pow(q, static_cast<long>(k * k)));
        }
        return out;
    }

    out.measure.add(leja.points[0], q);
    Real eps_n = q;
    for (size_t n = 1; n < cfg.n_max; ++n) {
        CascadeStep step;
        step.n = n;
        step.cap = pow(q, static_cast<long>(n * n)) * eps_n;
        step.bound = stress_bound(leja, n, q);
        const Real target = step.bound / Real(2);
        const std::vector<StressCase> family = cascade_family(leja, n);

        Real candidate = step.cap / Real(2);
        for (step.trials = 1; step.trials <= 200; ++step.trials) {
            Real worst(0);
            std::string worst_name;
            for (const StressCase& c : family) {
                const DiscreteMeasure beta =
                    c.nu.empty() ? out.measure : out.measure.plus(c.nu.scaled(candidate * Real(2)));
                Real dev = perturbed_deviation(beta, leja, n);
                if (dev > worst || worst_name.empty()) {
                    worst = std::move(dev);
                    worst_name = c.name;
                }
            }
            step.worst_deviation = worst;
            step.worst_case = worst_name;
            if (worst < target) break;
            // Zero shifts are first-order in the perturbation mass.
            Real factor(0.5);
            if (worst.is_finite()) factor = min(factor, target / worst / Real(2));
            candidate *= factor;
        }
        if (!(step.worst_deviation < target)) {
            throw StressFailure("construct_sigma: no admissible eps_" + std::to_string(n + 1) +
                                " found (insufficient precision?)");
        }
        step.eps_next = candidate;
        out.measure.add(leja.points[n], candidate);
        eps_n = candidate;
        out.steps.push_back(std::move(step));
    }

    const double range = (log2(out.measure.atoms().front().weight) - log2(eps_n)).to_double();
    const unsigned floor = precision_floor(cfg.q, cfg.n_max) + static_cast<unsigned>(std::ceil(range));
    if (cfg.bits < floor) {
        throw PrecisionTooLow("build_sigma: adaptive weights span 2^" + std::to_string(range) + "; need " +
                              std::to_string(floor) + " bits");
    }
    return out;
}

DiscreteMeasure build_sigma(const SigmaBuildConfig& cfg, const LejaSequence& leja) {
    return construct_sigma(cfg, leja).measure;
}

SigmaConstruction construct_sigma(const SigmaBuildConfig& cfg) {
    if (!(cfg.q > 0.0 && cfg.q < 0.5)) throw ConfigError("build_sigma: q must lie in (0, 1/2)");
    LejaSequence leja;
    {
        PrecisionContext ctx(std::max(cfg.bits, PrecisionContext::kMinBits));
        leja = leja_weighted(cfg.target, cfg.n_max, CandidateGrid::chebyshev(cfg.grid_size));
    }
    return construct_sigma(cfg, leja);
}

DiscreteMeasure build_sigma(const SigmaBuildConfig& cfg) { return construct_sigma(cfg).measure; }

ZeroStabilityReport zero_stability_check(const DiscreteMeasure& m, const LejaSequence& leja, size_t n,
                                         const Real& q) {
    if (n == 0 || n > leja.size()) throw std::invalid_argument("zero_stability_check: n out of range");
    ZeroStabilityReport report;
    report.n = n;
    const RecurrenceCoeffs rc = stieltjes_recurrence(m, n);
    report.zeros = orthopoly_zeros(rc, n);
    auto dev = pair_zeros(report.zeros, leja, n, &report.zeros.matched_to);
    if (!dev) {
        throw PairingFailure("zero_stability_check: nearest-point pairing of the zeros of P_" + std::to_string(n) +
                             " is not a bijection");
    }
    report.deviations = std::move(*dev);
    report.max_deviation = max_of(report.deviations);
    report.bound = pow(q, static_cast<long>(n * n));
    report.margin = report.max_deviation.is_zero() ? Real::infinity() : report.bound / report.max_deviation;
    report.passed = report.max_deviation < report.bound;
    return report;
}

std::vector<StressCase> stress_family(const LejaSequence& leja, size_t n) {
    std::vector<StressCase> family;
    family.push_back({"zero", DiscreteMeasure()});
    family.push_back({"delta(-1)", point_mass(Real(-1))});
    family.push_back({"delta(+1)", point_mass(Real(1))});
    for (size_t k = 0; k < n && k < leja.size(); ++k) {
        family.push_back({"delta(x_" + std::to_string(k + 1) + ")", point_mass(leja.points[k])});
    }
    DiscreteMeasure grid;
    for (int j = 0; j < 64; ++j) grid.add(Real(-1) + Real(2 * j + 1) / Real(64), Real(1) / Real(64));
    family.push_back({"uniform64", std::move(grid)});
    return family;
}

StressReport stress_audit(const DiscreteMeasure& sigma_n, const LejaSequence& leja, size_t n,
                          const Real& eps_next, const Real& q, std::span<const StressCase> family) {
    StressReport report;
    report.n = n;
    report.eps_next = eps_next;
    report.bound = stress_bound(leja, n, q);
    report.worst_deviation = Real(0);
    for (const StressCase& c : family) {
        const DiscreteMeasure beta = c.nu.empty() ? sigma_n : sigma_n.plus(c.nu.scaled(eps_next * Real(2)));
        StressRow row{c.name, perturbed_deviation(beta, leja, n), false};
        row.within = row.max_deviation < report.bound;
        if (!row.within) ++report.violations;
        if (report.worst_case.empty() || row.max_deviation > report.worst_deviation) {
            report.worst_deviation = row.max_deviation;
            report.worst_case = c.name;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

StressReport epsilon_stress_test(const DiscreteMeasure& sigma_n, const LejaSequence& leja, size_t n,
                                 const Real& eps_next, const Real& q, std::span<const StressCase> family) {
    StressReport report = stress_audit(sigma_n, leja, n, eps_next, q, family);
    if (report.violations > 0) {
        throw StressFailure("epsilon_stress_test: nu = " + report.worst_case + " moves a zero by " +
                            report.worst_deviation.to_string(6) + " >= " + report.bound.to_string(6));
    }
    return report;
}

DiscreteMeasure counting_measure(const ZeroSet& zeros) {
    if (zeros.roots.empty()) throw std::invalid_argument("counting_measure: no zeros");
    Real lo = zeros.roots.front();
    Real hi = zeros.roots.back();
    DiscreteMeasure m(min(lo, Real(-1)), max(hi, Real(1)));
    const Real w = Real(1) / Real(static_cast<long>(zeros.roots.size()));
    for (const Real& r : zeros.roots) m.add(r, w);
    return m;
}

Real weak_star_distance(const DiscreteMeasure& m, const TargetMeasure& mu) { return ks_distance(m, mu.cdf); }

std::vector<AsymptoticsRow> potential_asymptotics_check(const DiscreteMeasure& m, const TargetMeasure& mu,
                                                        std::span<const size_t> n_list,
                                                        std::span<const Complex> z_samples) {
    if (n_list.empty()) return {};
    const size_t top = *std::max_element(n_list.begin(), n_list.end());
    const RecurrenceCoeffs rc = stieltjes_recurrence(m, top);
    std::vector<AsymptoticsRow> rows;
    for (size_t n : n_list) {
        const ZeroSet zs = orthopoly_zeros(rc, n);
        for (const Complex& z : z_samples) {
            CompensatedSum s;
            for (const Real& r : zs.roots) s.add(log_abs(z - Complex(r)));
            rows.push_back({n, z, s.value() / Real(static_cast<long>(n)) + mu.potential(z)});
        }
    }
    return rows;
}

}  // namespace potlab
