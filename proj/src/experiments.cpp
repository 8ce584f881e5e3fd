#include "potlab/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "potlab/capacity.hpp"
#include "potlab/errors.hpp"
#include "potlab/leja.hpp"
#include "potlab/measure.hpp"
#include "potlab/orthopoly.hpp"
#include "potlab/svg.hpp"

namespace potlab {

namespace {

constexpr double kPi = std::numbers::pi;

using json = nlohmann::json;

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string z_string(cdouble z) {
    std::string s = shortest(z.real());
    if (z.imag() >= 0.0 || std::isnan(z.imag())) s += '+';
    return s + shortest(z.imag()) + 'i';
}

json z_json(cdouble z) { return json::array({z.real(), z.imag()}); }

cdouble z_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw ConfigError("config: z sample must be a number or [re, im], got " + j.dump());
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Complex to_complex(cdouble z) { return {Real(z.real()), Real(z.imag())}; }

// Wraps a pipeline stage so that module errors carry the stage name.
template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(std::string("[") + name + "] " + e.what());
    }
}

std::vector<int> sorted_n_list(const ExperimentConfig& cfg) {
    std::vector<int> ns = cfg.n_list;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    return ns;
}

void check_decreasing(const std::vector<std::pair<int, double>>& series, const std::string& what,
                      std::vector<std::string>& failures) {
    for (size_t i = 1; i < series.size(); ++i) {
        if (!(series[i].second < series[i - 1].second)) {
            failures.push_back(what + " not decreasing from n=" + std::to_string(series[i - 1].first) +
                               " to n=" + std::to_string(series[i].first));
        }
    }
}

double potential_of_counting(const std::vector<cdouble>& atoms, cdouble z) {
    PlanarMeasure m;
    m.locations = atoms;
    m.weights.assign(atoms.size(), 1.0 / static_cast<double>(atoms.size()));
    return potential_discrete(m, z);
}

std::vector<cdouble> roots_of_unity(int n) {
    std::vector<cdouble> out;
    for (int k = 0; k < n; ++k) out.push_back(std::polar(1.0, 2.0 * kPi * k / n));
    return out;
}

std::vector<cdouble> chebyshev_roots(int n) {
    std::vector<cdouble> out;
    for (double x : chebyshev_zeros(n)) out.emplace_back(x, 0.0);
    return out;
}

std::string points_csv_header() { return "n,source,re,im\n"; }

void append_points(std::ostringstream& os, int n, const std::string& source, const std::vector<cdouble>& pts) {
    for (const cdouble& z : pts) os << n << ',' << source << ',' << shortest(z.real()) << ',' << shortest(z.imag()) << '\n';
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string color(size_t i) { return kPalette[i % (sizeof kPalette / sizeof kPalette[0])]; }

}  // namespace

std::string experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::prop1: return "prop1";
        case ExperimentKind::stahl_circle: return "stahl_circle";
        case ExperimentKind::stahl_segment: return "stahl_segment";
        case ExperimentKind::leja_only: return "leja";
        case ExperimentKind::capacity_only: return "capacity";
    }
    return "unknown";
}

ExperimentKind experiment_from_name(const std::string& name) {
    if (name == "prop1") return ExperimentKind::prop1;
    if (name == "stahl_circle" || name == "stahl-circle") return ExperimentKind::stahl_circle;
    if (name == "stahl_segment" || name == "stahl-segment") return ExperimentKind::stahl_segment;
    if (name == "leja" || name == "leja_only") return ExperimentKind::leja_only;
    if (name == "capacity" || name == "capacity_only") return ExperimentKind::capacity_only;
    throw ConfigError("config: unknown experiment '" + name + "'");
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.experiment = kind;
    switch (kind) {
        case ExperimentKind::prop1:
            cfg.n_list = {2, 3, 4, 5, 6, 7, 8, 9, 10};
            break;
        case ExperimentKind::stahl_circle:
            cfg.n_list = {8, 16, 32, 64};
            cfg.bits = 128;
            break;
        case ExperimentKind::stahl_segment:
            cfg.n_list = {8, 16, 32};
            cfg.bits = 128;
            break;
        case ExperimentKind::leja_only:
            cfg.n_list = {100, 200};
            cfg.bits = 128;
            break;
        case ExperimentKind::capacity_only:
            cfg.n_list = {64};
            cfg.bits = 128;
            cfg.region = {{"kind", "disk"}, {"r", 1.0}};
            break;
    }
    return cfg;
}

void ExperimentConfig::validate() const {
    if (!(eps > 0.0)) throw ConfigError("config: eps must be positive");
    if (!(rho > 1.0)) throw ConfigError("config: rho must exceed 1");
    if (bits < PrecisionContext::kMinBits) throw ConfigError("config: bits must be >= 64");
    if (n_list.empty()) throw ConfigError("config: n_list is empty");
    for (int n : n_list) {
        if (n < 1) throw ConfigError("config: n_list entries must be positive");
    }
    if (schedule != "adaptive" && schedule != "geometric") {
        throw ConfigError("config: schedule must be 'adaptive' or 'geometric'");
    }
    if (target != "arcsine" && target != "uniform" && target != "blend") {
        throw ConfigError("config: target must be arcsine, uniform or blend");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("config: alpha must lie in [0, 1]");
    if (domain != "segment" && domain != "circle") throw ConfigError("config: domain must be segment or circle");
    if (weighted && domain == "circle") throw ConfigError("config: weighted Leja points are defined on the segment");
    if (leja_grid < 3) throw ConfigError("config: leja_grid too small");
    if (polar_angular < 1 || polar_radial < 1) throw ConfigError("config: polar grid must be non-empty");
    if (fekete_points < 8) throw ConfigError("config: fekete_points must be >= 8");
    if (experiment == ExperimentKind::prop1) {
        if (!(q > 0.0 && q < 0.5)) throw ConfigError("config: q must lie in (0, 1/2)");
        if (n_max < 1) throw ConfigError("config: n_max must be >= 1");
        for (int n : n_list) {
            if (static_cast<size_t>(n) > n_max) {
                throw ConfigError("config: n = " + std::to_string(n) + " exceeds n_max = " + std::to_string(n_max));
            }
        }
    }
    if (experiment == ExperimentKind::capacity_only) parse_region(region);
}

json ExperimentConfig::to_json() const {
    json zs = json::array();
    for (const cdouble& z : z_samples) zs.push_back(z_json(z));
    return {{"experiment", experiment_name(experiment)},
            {"q", q},
            {"n_list", n_list},
            {"eps", eps},
            {"rho", rho},
            {"bits", bits},
            {"leja_grid", leja_grid},
            {"polar_angular", polar_angular},
            {"polar_radial", polar_radial},
            {"fekete_points", fekete_points},
            {"n_max", n_max},
            {"target", target},
            {"alpha", alpha},
            {"schedule", schedule},
            {"domain", domain},
            {"weighted", weighted},
            {"z_samples", zs},
            {"random_samples", random_samples},
            {"seed", seed},
            {"region", region}};
}

void apply_config(ExperimentConfig& cfg, const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "experiment") {
                if (experiment_from_name(value.get<std::string>()) != cfg.experiment) {
                    throw ConfigError("config: file is for experiment '" + value.get<std::string>() + "'");
                }
            } else if (key == "q") {
                cfg.q = value.get<double>();
            } else if (key == "n_list") {
                cfg.n_list = value.get<std::vector<int>>();
            } else if (key == "eps") {
                cfg.eps = value.get<double>();
            } else if (key == "rho") {
                cfg.rho = value.get<double>();
            } else if (key == "bits") {
                cfg.bits = value.get<unsigned>();
            } else if (key == "leja_grid") {
                cfg.leja_grid = value.get<size_t>();
            } else if (key == "polar_angular") {
                cfg.polar_angular = value.get<size_t>();
            } else if (key == "polar_radial") {
                cfg.polar_radial = value.get<size_t>();
            } else if (key == "fekete_points") {
                cfg.fekete_points = value.get<size_t>();
            } else if (key == "n_max") {
                cfg.n_max = value.get<size_t>();
            } else if (key == "target") {
                cfg.target = value.get<std::string>();
            } else if (key == "alpha") {
                cfg.alpha = value.get<double>();
            } else if (key == "schedule") {
                cfg.schedule = value.get<std::string>();
            } else if (key == "domain") {
                cfg.domain = value.get<std::string>();
            } else if (key == "weighted") {
                cfg.weighted = value.get<bool>();
            } else if (key == "z_samples") {
                cfg.z_samples.clear();
                for (const auto& z : value) cfg.z_samples.push_back(z_from_json(z));
            } else if (key == "random_samples") {
                cfg.random_samples = value.get<size_t>();
            } else if (key == "seed") {
                cfg.seed = value.get<uint64_t>();
            } else if (key == "region") {
                cfg.region = value;
            } else if (key == "out") {
                cfg.out_dir = value.get<std::string>();
            } else if (key == "plot") {
                cfg.plot = value.get<bool>();
            } else {
                throw ConfigError("config: unknown key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::vector<cdouble> sample_points(const ExperimentConfig& cfg) {
    std::vector<cdouble> out = cfg.z_samples;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> radius(1.5, 3.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    for (size_t i = 0; i < cfg.random_samples; ++i) {
        const double r = radius(rng);
        out.push_back(std::polar(r, angle(rng)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Potential gaps and bad sets.

double circle_potential_gap(int n, cdouble z) {
    return potential_of_counting(roots_of_unity(n), z) - equilibrium_potential_circle(z);
}

double circle_potential_gap_closed(int n, cdouble z) {
    // -(1/n) log|1 - z^{-n}|, z^{-n} formed in log-polar form.
    const double nn = static_cast<double>(n);
    const cdouble zn_inv = std::polar(std::exp(-nn * std::log(std::abs(z))), -nn * std::arg(z));
    const double inside = std::abs(z) < 1.0 ? std::log(std::abs(z)) : 0.0;
    return -std::log(std::abs(1.0 - zn_inv)) / nn - inside;
}

double segment_potential_gap(int n, cdouble z) {
    return potential_of_counting(chebyshev_roots(n), z) - equilibrium_potential_segment(z);
}

std::vector<cdouble> circle_tilde_samples(int n, double eps, size_t per_branch) {
    const double s = std::exp(-static_cast<double>(n) * eps);
    const size_t rings = 4;
    const size_t angles = std::max<size_t>(4, per_branch / 2);
    std::vector<cdouble> zetas;
    for (size_t i = 0; i < rings; ++i) {
        const double r = (1.0 - 1e-6) * static_cast<double>(i + 1) / static_cast<double>(rings);
        for (size_t j = 0; j < angles; ++j) {
            const cdouble zeta = std::polar(r, 2.0 * kPi * static_cast<double>(j) / static_cast<double>(angles));
            const cdouble u = s * zeta;
            // log|1 + u| without cancellation.
            const double log_mod = 0.5 * std::log1p(2.0 * u.real() + std::norm(u));
            if (log_mod >= std::log1p(1e-9)) zetas.push_back(zeta);
        }
    }
    std::vector<cdouble> out;
    for (int k = 0; k < n; ++k) {
        for (const cdouble& zeta : zetas) {
            const cdouble u = s * zeta;
            const cdouble log_w(0.5 * std::log1p(2.0 * u.real() + std::norm(u)), std::atan2(u.imag(), 1.0 + u.real()));
            out.push_back(std::exp((log_w + cdouble(0.0, 2.0 * kPi * k)) / static_cast<double>(n)));
        }
    }
    return out;
}

std::vector<cdouble> segment_tilde_samples(int n, double eps, size_t rays) {
    const std::vector<cdouble> roots = chebyshev_roots(n);
    const double log_level = static_cast<double>(n) * (std::log(0.5) - eps) + std::log1p(-1e-9);
    std::vector<cdouble> origins;
    const std::vector<cdouble> edge = trace_lemniscate(roots, log_level, rays, &origins);
    std::vector<cdouble> out = edge;
    for (size_t i = 0; i < edge.size(); ++i) {
        for (double f : {0.25, 0.5, 0.75}) out.push_back(origins[i] + f * (edge[i] - origins[i]));
    }
    return out;
}

BadSetSample sample_circle_bad_set(const ExperimentConfig& cfg, int n) {
    BadSetSample s;
    s.n = n;
    for (size_t i = 0; i < cfg.polar_radial; ++i) {
        const double r = 1.0 + (cfg.rho - 1.0) * (static_cast<double>(i) + 0.5) / static_cast<double>(cfg.polar_radial);
        for (size_t j = 0; j < cfg.polar_angular; ++j) {
            const double t = 2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(cfg.polar_angular);
            const cdouble z = std::polar(r, t);
            ++s.grid_size;
            if (std::abs(circle_potential_gap(n, z)) >= cfg.eps) s.points.push_back(z);
        }
    }
    const std::vector<cdouble> tilde = circle_tilde_samples(n, cfg.eps);
    s.tilde_samples = tilde.size();
    for (const cdouble& z : tilde) {
        const double m = std::abs(z);
        if (m >= 1.0 && m <= cfg.rho && std::abs(circle_potential_gap(n, z)) >= cfg.eps) ++s.inclusion_certificate;
    }
    return s;
}

BadSetSample sample_segment_bad_set(const ExperimentConfig& cfg, int n) {
    BadSetSample s;
    s.n = n;
    for (size_t i = 0; i < cfg.polar_radial; ++i) {
        const double r = 1.0 + (cfg.rho - 1.0) * (static_cast<double>(i) + 0.5) / static_cast<double>(cfg.polar_radial);
        for (size_t j = 0; j < cfg.polar_angular; ++j) {
            const double t = 2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(cfg.polar_angular);
            const cdouble w = std::polar(r, t);
            const cdouble z = (w + 1.0 / w) / 2.0;
            ++s.grid_size;
            if (std::abs(segment_potential_gap(n, z)) >= cfg.eps) s.points.push_back(z);
        }
    }
    const std::vector<cdouble> tilde = segment_tilde_samples(n, cfg.eps);
    s.tilde_samples = tilde.size();
    for (const cdouble& z : tilde) {
        if (std::abs(phi(z)) <= cfg.rho && std::abs(segment_potential_gap(n, z)) >= cfg.eps) ++s.inclusion_certificate;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Zeros of orthogonal polynomials of sigma against weighted Leja points.

ExperimentReport run_prop1(const ExperimentConfig& cfg) {
    cfg.validate();
    PrecisionContext ctx(cfg.bits);
    const int digits = static_cast<int>(cfg.bits / 3);
    const std::vector<int> ns = sorted_n_list(cfg);
    const std::vector<cdouble> zs = sample_points(cfg);
    const TargetMeasure mu = target_by_name(cfg.target, cfg.alpha);
    const Real q = decimal_real(cfg.q);

    ExperimentReport rep;
    const LejaSequence leja = stage("leja", [&] {
        return leja_weighted(mu, cfg.n_max, CandidateGrid::chebyshev(cfg.leja_grid));
    });

    SigmaBuildConfig sc;
    sc.q = cfg.q;
    sc.n_max = cfg.n_max;
    sc.target = mu;
    sc.bits = cfg.bits;
    sc.grid_size = cfg.leja_grid;
    sc.schedule = cfg.schedule == "adaptive" ? WeightSchedule::adaptive : WeightSchedule::geometric_square;
    const SigmaConstruction sigma = stage("build_sigma", [&] { return construct_sigma(sc, leja); });
    const RecurrenceCoeffs rc = stage("stieltjes", [&] { return stieltjes_recurrence(sigma.measure, cfg.n_max); });

    // Zeros of every degree up to n_max, for interlacing.
    std::vector<ZeroSet> all_zeros;
    stage("zeros", [&] {
        for (size_t n = 1; n <= cfg.n_max; ++n) all_zeros.push_back(orthopoly_zeros(rc, n));
        return 0;
    });
    for (size_t n = 2; n <= cfg.n_max; ++n) {
        const auto& hi = all_zeros[n - 1].roots;
        const auto& lo = all_zeros[n - 2].roots;
        for (size_t k = 0; k + 1 < n; ++k) {
            if (!(hi[k] < lo[k] && lo[k] < hi[k + 1])) {
                rep.failures.push_back("interlacing violated between degrees " + std::to_string(n - 1) + " and " +
                                       std::to_string(n));
                break;
            }
        }
    }
    Real atom_lo = sigma.measure.atoms().front().location;
    Real atom_hi = atom_lo;
    for (const Atom& a : sigma.measure.atoms()) {
        atom_lo = min(atom_lo, a.location);
        atom_hi = max(atom_hi, a.location);
    }

    std::ostringstream zeros_csv;
    zeros_csv << "n,k,root,paired_leja,deviation,bound\n";
    std::ostringstream residuals_csv;
    residuals_csv << "n,z,residual\n";
    std::ostringstream leja_residuals_csv;
    leja_residuals_csv << "n,z,residual\n";

    const Real ortho_tol = ldexp(Real(1), -static_cast<long>(cfg.bits / 4));
    json per_n = json::array();
    std::vector<double> dev_series;
    std::vector<double> bound_series;
    std::vector<double> res_sigma_series;
    std::vector<double> res_leja_series;
    std::vector<double> n_series;

    for (int n_int : ns) {
        const size_t n = static_cast<size_t>(n_int);
        const ZeroStabilityReport zr = stage("zero_stability", [&] { return zero_stability_check(sigma.measure, leja, n, q); });
        const Real ortho = orthogonality_residual(sigma.measure, rc, n);
        const Real ks = weak_star_distance(counting_measure(zr.zeros), mu);
        const Real ks_leja = equidistribution_distance(leja, mu, n);

        if (!zr.passed) {
            rep.failures.push_back("n=" + std::to_string(n) + ": max zero deviation " + zr.max_deviation.to_string(6) +
                                   " >= " + zr.bound.to_string(6));
        } else if (zr.margin < Real(2)) {
            rep.failures.push_back("n=" + std::to_string(n) + ": zero deviation margin " + zr.margin.to_string(4) +
                                   " below 2");
        }
        if (!(ortho < ortho_tol)) {
            rep.failures.push_back("n=" + std::to_string(n) + ": orthogonality residual " + ortho.to_string(6));
        }
        for (const Real& r : zr.zeros.roots) {
            if (r < atom_lo || r > atom_hi) {
                rep.failures.push_back("n=" + std::to_string(n) + ": zero outside the support hull");
                break;
            }
        }

        for (size_t k = 0; k < n; ++k) {
            const size_t leja_index = zr.zeros.matched_to[k];
            zeros_csv << n << ',' << (k + 1) << ',' << zr.zeros.roots[k].to_string(digits) << ','
                      << leja.points[leja_index].to_string(digits) << ','
                      << zr.deviations[leja_index].to_string(digits) << ',' << zr.bound.to_string(digits) << '\n';
        }

        json residuals = json::array();
        const Real tol_agree = Real(10) * zr.bound;
        for (size_t zi = 0; zi < zs.size(); ++zi) {
            const Complex z = to_complex(zs[zi]);
            CompensatedSum s;
            for (const Real& r : zr.zeros.roots) s.add(log_abs(z - Complex(r)));
            const Real res_sigma = s.value() / Real(static_cast<long>(n)) + mu.potential(z);
            const std::vector<Complex> one{z};
            const Real res_leja = verify_weighted_asymptotics(leja, mu, one, n).front();
            residuals_csv << n << ',' << z_string(zs[zi]) << ',' << res_sigma.to_string(digits) << '\n';
            leja_residuals_csv << n << ',' << z_string(zs[zi]) << ',' << res_leja.to_string(digits) << '\n';
            const Real gap = abs(res_sigma - res_leja);
            if (!(gap <= tol_agree)) {
                rep.failures.push_back("n=" + std::to_string(n) + ", z=" + z_string(zs[zi]) +
                                       ": zero and Leja residuals differ by " + gap.to_string(6));
            }
            residuals.push_back({{"z", z_json(zs[zi])},
                                 {"sigma", res_sigma.to_double()},
                                 {"leja", res_leja.to_double()},
                                 {"difference", gap.to_double()}});
            if (zi == 0) {
                res_sigma_series.push_back(res_sigma.to_double());
                res_leja_series.push_back(res_leja.to_double());
            }
        }
        n_series.push_back(static_cast<double>(n));
        dev_series.push_back(zr.max_deviation.to_double());
        bound_series.push_back(zr.bound.to_double());

        per_n.push_back({{"n", n},
                         {"ks", ks.to_double()},
                         {"ks_leja", ks_leja.to_double()},
                         {"bound_analytic", zr.bound.to_double()},
                         {"cap_estimate", nullptr},
                         {"max_zero_deviation", zr.max_deviation.to_double()},
                         {"max_zero_deviation_decimal", zr.max_deviation.to_string(12)},
                         {"margin", finite_or_null(zr.margin.to_double())},
                         {"orthogonality_residual", ortho.to_string(6)},
                         {"residuals", residuals}});
    }

    // The plain q^{n^2} schedule, reported for comparison.
    json geometric = json::array();
    if (sc.schedule == WeightSchedule::adaptive) {
        SigmaBuildConfig gc = sc;
        gc.schedule = WeightSchedule::geometric_square;
        const DiscreteMeasure gs = build_sigma(gc, leja);
        for (int n_int : ns) {
            const size_t n = static_cast<size_t>(n_int);
            try {
                const ZeroStabilityReport g = zero_stability_check(gs, leja, n, q);
                geometric.push_back({{"n", n},
                                     {"max_zero_deviation", g.max_deviation.to_double()},
                                     {"bound", g.bound.to_double()},
                                     {"passed", g.passed}});
            } catch (const Error& e) {
                geometric.push_back({{"n", n}, {"error", e.what()}});
            }
        }
    }

    std::ostringstream leja_csv;
    write_leja_csv(leja, leja_csv, digits);
    std::ostringstream sigma_csv;
    sigma_csv << "index,location,weight\n";
    for (size_t k = 0; k < sigma.measure.size(); ++k) {
        const Atom& a = sigma.measure.atoms()[k];
        sigma_csv << (k + 1) << ',' << a.location.to_string(digits) << ',' << a.weight.to_string(digits) << '\n';
    }
    std::ostringstream rec_csv;
    rec_csv << "n,a,b\n";
    for (size_t k = 0; k < rc.size(); ++k) {
        rec_csv << k << ',' << rc.a[k].to_string(digits) << ',' << rc.b[k].to_string(digits) << '\n';
    }
    rep.files["leja.csv"] = leja_csv.str();
    rep.files["sigma.csv"] = sigma_csv.str();
    rep.files["recurrence.csv"] = rec_csv.str();
    rep.files["zeros.csv"] = zeros_csv.str();
    rep.files["residuals.csv"] = residuals_csv.str();
    rep.files["leja_residuals.csv"] = leja_residuals_csv.str();

    json cascade = json::array();
    if (!sigma.steps.empty()) {
        std::ostringstream cascade_csv;
        cascade_csv << "n,eps_next,cap,bound,worst_deviation,worst_case,trials\n";
        for (const CascadeStep& st : sigma.steps) {
            cascade_csv << st.n << ',' << st.eps_next.to_string(digits) << ',' << st.cap.to_string(digits) << ','
                        << st.bound.to_string(digits) << ',' << st.worst_deviation.to_string(digits) << ','
                        << st.worst_case << ',' << st.trials << '\n';
            cascade.push_back({{"n", st.n},
                               {"eps_next", st.eps_next.to_string(12)},
                               {"worst_deviation", st.worst_deviation.to_string(12)},
                               {"worst_case", st.worst_case},
                               {"trials", st.trials}});
        }
        rep.files["cascade.csv"] = cascade_csv.str();
    }

    // Smallest n from which the bound holds for every listed n.
    json n0 = nullptr;
    for (size_t i = per_n.size(); i-- > 0;) {
        const json& row = per_n[i];
        if (row["max_zero_deviation"].get<double>() < row["bound_analytic"].get<double>()) {
            n0 = row["n"];
        } else {
            break;
        }
    }

    if (cfg.plot) {
        std::vector<svg::PointSeries> series;
        svg::PointSeries lp{"Leja points", color(0), {}};
        for (const Real& x : leja.points) lp.points.emplace_back(x.to_double(), 0.0);
        series.push_back(std::move(lp));
        svg::PointSeries zp{"zeros of P_n (height n/n_max)", color(1), {}};
        for (size_t n = 1; n <= cfg.n_max; ++n) {
            for (const Real& r : all_zeros[n - 1].roots) {
                zp.points.emplace_back(r.to_double(), static_cast<double>(n) / static_cast<double>(cfg.n_max));
            }
        }
        series.push_back(std::move(zp));
        rep.files["points.svg"] = svg::scatter("Leja points and orthogonal polynomial zeros", series, {-1.05, 1.05, -0.1, 1.1});
        rep.files["deviations.svg"] = svg::line_chart(
            "max |x_k - x_{n,k}| and bound q^{n^2}",
            {{"deviation", color(0), n_series, dev_series}, {"bound", color(1), n_series, bound_series}}, true);
        rep.files["residuals.svg"] = svg::line_chart(
            "|potential residual| at first z sample",
            {{"zeros", color(0), n_series, res_sigma_series}, {"Leja", color(2), n_series, res_leja_series}}, true);
    }

    json cfg_json = cfg.to_json();
    rep.summary = {{"experiment", "prop1"},
                   {"config", cfg_json},
                   {"per_n", per_n},
                   {"schedule", cfg.schedule},
                   {"n0", n0},
                   {"cascade", cascade},
                   {"geometric_schedule", geometric},
                   {"failures", rep.failures},
                   {"pass", rep.pass()}};
    return rep;
}

// ---------------------------------------------------------------------------
// Non-convergence in capacity.

namespace {

json bad_set_json(const BadSetSample& s, double closed_form_gap) {
    return {{"grid_points", s.grid_size},
            {"grid_hits", s.points.size()},
            {"tilde_samples", s.tilde_samples},
            {"inclusion_certificate", s.inclusion_certificate},
            {"closed_form_max_gap", closed_form_gap}};
}

void certify(const BadSetSample& s, std::vector<std::string>& failures) {
    if (s.inclusion_certificate != s.tilde_samples) {
        failures.push_back("n=" + std::to_string(s.n) + ": " +
                           std::to_string(s.tilde_samples - s.inclusion_certificate) + " of " +
                           std::to_string(s.tilde_samples) + " preimage samples outside E_n");
    }
    if (s.tilde_samples == 0) failures.push_back("n=" + std::to_string(s.n) + ": no preimage samples");
}

}  // namespace

ExperimentReport run_stahl_circle(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<int> ns = sorted_n_list(cfg);
    ExperimentReport rep;
    json per_n = json::array();
    std::ostringstream bad_csv;
    bad_csv << points_csv_header();
    std::vector<std::pair<int, double>> ks_series;
    std::vector<svg::PointSeries> plot_series;
    const double floor_bound = 0.5 * std::exp(-cfg.eps) * std::min(1.0, std::pow(0.25, 1.0 / ns.front()));

    for (int n : ns) {
        std::vector<double> angles;
        for (int k = 0; k < n; ++k) angles.push_back(2.0 * kPi * k / n);
        const double ks = ks_distance(angles, [](double t) { return std::clamp(t / (2.0 * kPi), 0.0, 1.0); });
        ks_series.emplace_back(n, ks);
        if (std::abs(ks - 1.0 / n) > 1e-12) {
            rep.failures.push_back("n=" + std::to_string(n) + ": KS of root angles " + shortest(ks) + " != 1/n");
        }

        const BadSetSample bad = sample_circle_bad_set(cfg, n);
        certify(bad, rep.failures);
        double closed_gap = 0.0;
        for (const cdouble& z : bad.points) {
            closed_gap = std::max(closed_gap, std::abs(circle_potential_gap(n, z) - circle_potential_gap_closed(n, z)));
        }
        const std::vector<cdouble> tilde = circle_tilde_samples(n, cfg.eps);
        for (const cdouble& z : tilde) {
            closed_gap = std::max(closed_gap, std::abs(circle_potential_gap(n, z) - circle_potential_gap_closed(n, z)));
        }

        const double bound = std::pow(0.25, 1.0 / n) * std::exp(-cfg.eps);
        if (bound < std::exp(-cfg.eps) / std::pow(4.0, 1.0 / n) * (1.0 - 1e-15) || bound < floor_bound) {
            rep.failures.push_back("n=" + std::to_string(n) + ": capacity lower bound decays");
        }

        // Preimage of the lune boundary under z -> z^n, all branches.
        const RegionDescriptor lune = RegionDescriptor::make_lune(n, cfg.eps);
        const double s = lune.scale();
        const size_t per_branch = std::max<size_t>(32, 4096 / static_cast<size_t>(n));
        std::vector<cdouble> edge;
        for (const cdouble& zeta : lune.boundary(per_branch)) {
            const cdouble u = s * zeta;
            const cdouble log_w(0.5 * std::log1p(2.0 * u.real() + std::norm(u)), std::atan2(u.imag(), 1.0 + u.real()));
            for (int k = 0; k < n; ++k) {
                edge.push_back(std::exp((log_w + cdouble(0.0, 2.0 * kPi * k)) / static_cast<double>(n)));
            }
        }
        const size_t m = std::max(cfg.fekete_points, static_cast<size_t>(2 * n));
        const CapacityEstimate est = fekete_from_points(edge, m);

        append_points(bad_csv, n, "grid", bad.points);
        append_points(bad_csv, n, "preimage", tilde);
        svg::PointSeries ps{"n=" + std::to_string(n), color(plot_series.size()), {}};
        for (const cdouble& z : bad.points) ps.points.emplace_back(z.real(), z.imag());
        for (const cdouble& z : tilde) ps.points.emplace_back(z.real(), z.imag());
        plot_series.push_back(std::move(ps));

        per_n.push_back({{"n", n},
                         {"ks", ks},
                         {"bound_analytic", bound},
                         {"cap_estimate", est.value},
                         {"cap_uncertainty", est.uncertainty},
                         {"cap_points", m},
                         {"max_zero_deviation", nullptr},
                         {"residuals", nullptr},
                         {"bad_set", bad_set_json(bad, closed_gap)}});
    }
    check_decreasing(ks_series, "KS distance", rep.failures);

    rep.files["bad_set.csv"] = bad_csv.str();
    if (cfg.plot) {
        rep.files["bad_set.svg"] =
            svg::scatter("Sampled bad sets, circle", plot_series, {-cfg.rho, cfg.rho, -cfg.rho, cfg.rho});
    }
    rep.summary = {{"experiment", "stahl_circle"},
                   {"config", cfg.to_json()},
                   {"per_n", per_n},
                   {"failures", rep.failures},
                   {"pass", rep.pass()}};
    return rep;
}

ExperimentReport run_stahl_segment(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::vector<int> ns = sorted_n_list(cfg);
    ExperimentReport rep;
    json per_n = json::array();
    std::ostringstream bad_csv;
    bad_csv << points_csv_header();
    std::vector<std::pair<int, double>> ks_series;
    std::vector<svg::PointSeries> plot_series;
    const double rho_lem = 0.5 * std::exp(-cfg.eps);
    const auto arcsine = [](double x) {
        if (x <= -1.0) return 0.0;
        if (x >= 1.0) return 1.0;
        return 0.5 + std::asin(x) / kPi;
    };

    for (int n : ns) {
        const std::vector<double> zeros = chebyshev_zeros(n);
        const double ks = ks_distance(zeros, arcsine);
        ks_series.emplace_back(n, ks);

        const BadSetSample bad = sample_segment_bad_set(cfg, n);
        certify(bad, rep.failures);
        const std::vector<cdouble> tilde = segment_tilde_samples(n, cfg.eps);
        double closed_gap = 0.0;
        for (const cdouble& z : tilde) {
            const double closed =
                -std::log(std::abs(chebyshev_monic(n, z))) / n - (std::log(2.0) - std::log(std::abs(phi(z))));
            closed_gap = std::max(closed_gap, std::abs(segment_potential_gap(n, z) - closed));
        }

        const double bound = rho_lem;
        if (bound < rho_lem * (1.0 - 1e-15)) rep.failures.push_back("n=" + std::to_string(n) + ": bound decays");
        const size_t m = std::max(cfg.fekete_points, static_cast<size_t>(2 * n));
        const CapacityReport cap = preimage_capacity_check_roots(chebyshev_roots(n), rho_lem, m);

        append_points(bad_csv, n, "grid", bad.points);
        append_points(bad_csv, n, "preimage", tilde);
        svg::PointSeries ps{"n=" + std::to_string(n), color(plot_series.size()), {}};
        for (const cdouble& z : bad.points) ps.points.emplace_back(z.real(), z.imag());
        for (const cdouble& z : tilde) ps.points.emplace_back(z.real(), z.imag());
        plot_series.push_back(std::move(ps));

        per_n.push_back({{"n", n},
                         {"ks", ks},
                         {"bound_analytic", bound},
                         {"cap_estimate", cap.estimate},
                         {"cap_relative_error", *cap.relative_error()},
                         {"cap_uncertainty", cap.uncertainty},
                         {"cap_points", m},
                         {"max_zero_deviation", nullptr},
                         {"residuals", nullptr},
                         {"bad_set", bad_set_json(bad, closed_gap)}});
    }
    check_decreasing(ks_series, "KS distance", rep.failures);

    rep.files["bad_set.csv"] = bad_csv.str();
    if (cfg.plot) {
        const double a = (cfg.rho + 1.0 / cfg.rho) / 2.0;
        rep.files["bad_set.svg"] = svg::scatter("Sampled bad sets, segment", plot_series, {-a, a, -a, a});
    }
    rep.summary = {{"experiment", "stahl_segment"},
                   {"config", cfg.to_json()},
                   {"per_n", per_n},
                   {"failures", rep.failures},
                   {"pass", rep.pass()}};
    return rep;
}

// ---------------------------------------------------------------------------
// Leja sequences and capacities on their own.

ExperimentReport run_leja(const ExperimentConfig& cfg) {
    cfg.validate();
    PrecisionContext ctx(cfg.bits);
    const int digits = static_cast<int>(cfg.bits / 3);
    const std::vector<int> ns = sorted_n_list(cfg);
    const size_t top = static_cast<size_t>(ns.back());
    const bool circle = cfg.domain == "circle";
    const std::vector<cdouble> zs = sample_points(cfg);

    std::optional<TargetMeasure> mu;
    if (cfg.weighted) mu = target_by_name(cfg.target, cfg.alpha);
    const CandidateGrid grid = circle ? CandidateGrid::circle(cfg.leja_grid) : CandidateGrid::chebyshev(cfg.leja_grid);

    ExperimentReport rep;
    LejaGenerator gen(grid, mu);
    // Greedy optimality: each point's objective dominates every grid node.
    while (gen.sequence().size() < top) {
        const std::vector<Real> grid_values = gen.grid_objective();
        const size_t k = gen.sequence().size();
        gen.extend();
        if (k == 0) continue;
        Real best = grid_values.front();
        for (const Real& v : grid_values) {
            if (v.is_finite() && (!best.is_finite() || v > best)) best = v;
        }
        const LejaSequence& seq = gen.sequence();
        Real value = seq.log_products[k];
        if (mu) value += Real(static_cast<long>(k)) * mu->potential_at(seq.points[k]);
        const Real slack = ldexp(max(Real(1), abs(best)), -static_cast<long>(cfg.bits / 2));
        if (value < best - slack) {
            rep.failures.push_back("point " + std::to_string(k + 1) + " is not a grid maximizer");
        }
    }
    const LejaSequence& seq = gen.sequence();
    if (!(seq.delta(seq.size()) > Real(0))) rep.failures.push_back("Leja points are not distinct");

    std::vector<Complex> zc;
    for (const cdouble& z : zs) zc.push_back(to_complex(z));
    json per_n = json::array();
    std::ostringstream res_csv;
    res_csv << "n,z,residual\n";
    std::vector<std::pair<int, double>> ks_series;
    std::vector<double> n_series;
    std::vector<double> res_series;
    for (int n_int : ns) {
        const size_t n = static_cast<size_t>(n_int);
        const std::vector<Real> res = mu ? verify_weighted_asymptotics(seq, *mu, zc, n) : verify_theorem_L(seq, zc, n);
        double ks = 0.0;
        if (circle) {
            std::vector<double> angles;
            for (size_t k = 0; k < n; ++k) angles.push_back(seq.points[k].to_double());
            std::sort(angles.begin(), angles.end());
            ks = ks_distance(angles, [](double t) { return std::clamp(t / (2.0 * kPi), 0.0, 1.0); });
        } else {
            ks = equidistribution_distance(seq, mu ? *mu : target_arcsine(), n).to_double();
        }
        ks_series.emplace_back(n_int, ks);
        json rj = json::array();
        for (size_t i = 0; i < zs.size(); ++i) {
            res_csv << n << ',' << z_string(zs[i]) << ',' << res[i].to_string(digits) << '\n';
            rj.push_back({{"z", z_json(zs[i])}, {"residual", res[i].to_double()}});
        }
        n_series.push_back(static_cast<double>(n));
        res_series.push_back(res.front().to_double());
        per_n.push_back({{"n", n},
                         {"ks", ks},
                         {"bound_analytic", nullptr},
                         {"cap_estimate", nullptr},
                         {"max_zero_deviation", nullptr},
                         {"separation", seq.delta(n >= 2 ? n : 2).to_double()},
                         {"residuals", rj}});
    }

    std::ostringstream leja_csv;
    write_leja_csv(seq, leja_csv, digits);
    rep.files["leja.csv"] = leja_csv.str();
    rep.files["leja_residuals.csv"] = res_csv.str();
    if (cfg.plot) {
        svg::PointSeries ps{"Leja points", color(0), {}};
        for (size_t k = 0; k < seq.size(); ++k) {
            const Complex z = seq.location(k);
            ps.points.emplace_back(z.re.to_double(), z.im.to_double());
        }
        rep.files["leja.svg"] = svg::scatter("Leja points", {ps}, {-1.05, 1.05, -1.05, 1.05});
        rep.files["leja_residuals.svg"] =
            svg::line_chart("|residual| at first z sample", {{"residual", color(0), n_series, res_series}}, true);
    }
    rep.summary = {{"experiment", "leja"},
                   {"config", cfg.to_json()},
                   {"per_n", per_n},
                   {"failures", rep.failures},
                   {"pass", rep.pass()}};
    return rep;
}

ExperimentReport run_capacity(const ExperimentConfig& cfg) {
    cfg.validate();
    const RegionDescriptor region = parse_region(cfg.region);
    ExperimentReport rep;
    json per_n = json::array();
    json reports = json::array();
    for (int n : sorted_n_list(cfg)) {
        json report;
        if (region.kind == RegionKind::lune) {
            const LuneReport lr = lune_capacity_bounds(region.n, region.eps, static_cast<size_t>(n));
            report = lr.capacity.to_json();
            report["rescaled"] = lr.rescaled;
            if (!lr.within) rep.failures.push_back("lune capacity outside (e^{-n eps}/4, e^{-n eps})");
        } else {
            const CapacityReport cr = capacity_report(region, static_cast<size_t>(n));
            report = cr.to_json();
            if (const auto err = cr.relative_error(); err && *err >= 0.05) {
                rep.failures.push_back("n_points=" + std::to_string(n) + ": relative error " + shortest(*err));
            }
        }
        if (!(report["estimate"].get<double>() > 0.0)) rep.failures.push_back("non-positive capacity estimate");
        per_n.push_back({{"n", n},
                         {"ks", nullptr},
                         {"bound_analytic", report["analytic"]},
                         {"cap_estimate", report["estimate"]},
                         {"max_zero_deviation", nullptr},
                         {"residuals", nullptr}});
        reports.push_back(report);
    }
    rep.summary = {{"experiment", "capacity"},
                   {"config", cfg.to_json()},
                   {"region", region.kind_name()},
                   {"per_n", per_n},
                   {"reports", reports},
                   {"failures", rep.failures},
                   {"pass", rep.pass()}};
    return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.experiment) {
        case ExperimentKind::prop1: return run_prop1(cfg);
        case ExperimentKind::stahl_circle: return run_stahl_circle(cfg);
        case ExperimentKind::stahl_segment: return run_stahl_segment(cfg);
        case ExperimentKind::leja_only: return run_leja(cfg);
        case ExperimentKind::capacity_only: return run_capacity(cfg);
    }
    throw ConfigError("unknown experiment");
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& content) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("cannot write " + (dir / name).string());
        out << content;
    };
    write("summary.json", dump_json(report.summary));
    for (const auto& [name, content] : report.files) write(name, content);
}

}  // namespace potlab
