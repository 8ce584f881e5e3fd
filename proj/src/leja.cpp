#include "potlab/leja.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "potlab/errors.hpp"

namespace potlab {

namespace {

Real two_pi() { return Real::pi() * Real(2); }

Real tie_tolerance(const Real& reference) {
    return ldexp(max(Real(1), abs(reference)), -static_cast<long>(PrecisionContext::current() / 2));
}

Real refine_tolerance() { return ldexp(Real(1), -static_cast<long>(PrecisionContext::current() / 4)); }

// Leftmost index whose value is within the tie tolerance of the maximum.
std::optional<size_t> leftmost_argmax(std::span<const Real> values) {
    const Real* best = nullptr;
    for (const Real& v : values) {
        if (v.is_finite() && (best == nullptr || v > *best)) best = &v;
    }
    if (best == nullptr) return std::nullopt;
    const Real floor = *best - tie_tolerance(*best);
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i].is_finite() && values[i] >= floor) return i;
    }
    return std::nullopt;
}

}  // namespace

CandidateGrid CandidateGrid::chebyshev(size_t count) {
    if (count < 2) throw std::invalid_argument("CandidateGrid::chebyshev: need at least 2 nodes");
    std::vector<Real> nodes(count);
    const Real pi = Real::pi();
    const Real denom(static_cast<long>(count - 1));
    for (size_t j = 0; j < count / 2; ++j) {
        Real x = -cos(pi * Real(static_cast<long>(j)) / denom);
        nodes[count - 1 - j] = -x;
        nodes[j] = std::move(x);
    }
    if (count % 2 == 1) nodes[count / 2] = Real(0);
    nodes.front() = Real(-1);
    nodes.back() = Real(1);
    return {std::move(nodes), LejaDomain::segment};
}

CandidateGrid CandidateGrid::circle(size_t count) {
    if (count < 3) throw std::invalid_argument("CandidateGrid::circle: need at least 3 nodes");
    std::vector<Real> nodes;
    nodes.reserve(count);
    const Real step = two_pi() / Real(static_cast<long>(count));
    for (size_t j = 0; j < count; ++j) nodes.push_back(step * Real(static_cast<long>(j)));
    return {std::move(nodes), LejaDomain::circle};
}

CandidateGrid CandidateGrid::from_nodes(std::vector<Real> nodes, LejaDomain domain) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (nodes.empty()) throw std::invalid_argument("CandidateGrid::from_nodes: no nodes");
    return {std::move(nodes), domain};
}

Real leja_distance(LejaDomain domain, const Real& a, const Real& b) {
    if (domain == LejaDomain::segment) return abs(a - b);
    return abs(sin((a - b) / Real(2))) * Real(2);
}

void LejaSequence::append(Real point) {
    CompensatedSum logs;
    Real sep = separations.empty() ? Real::infinity() : separations.back();
    for (const Real& x : points) {
        const Real d = leja_distance(domain, point, x);
        logs.add(log(d));
        if (d < sep) sep = d;
    }
    points.push_back(std::move(point));
    log_products.push_back(logs.value());
    separations.push_back(std::move(sep));
}

Complex LejaSequence::location(size_t k) const {
    if (domain == LejaDomain::segment) return Complex(points.at(k));
    return polar(Real(1), points.at(k));
}

LejaGenerator::LejaGenerator(CandidateGrid grid, std::optional<TargetMeasure> target, LejaSequence seed)
    : grid_(std::move(grid)), target_(std::move(target)), seq_(std::move(seed)) {
    if (target_ && grid_.domain() != LejaDomain::segment) {
        throw std::invalid_argument("LejaGenerator: weighted sequences are defined on the segment only");
    }
    seq_.domain = grid_.domain();
    seq_.target = target_;
    log_sums_.assign(grid_.size(), Real(0));
    for (size_t i = 0; i < grid_.size(); ++i) {
        CompensatedSum s;
        for (const Real& x : seq_.points) s.add(log(leja_distance(seq_.domain, grid_.nodes()[i], x)));
        log_sums_[i] = s.value();
    }
    if (target_) {
        // Potentials are stored relative to the first node so that a constant
        // weight leaves the objective bit-identical to the unweighted one.
        grid_potential_.reserve(grid_.size());
        for (const Real& x : grid_.nodes()) grid_potential_.push_back(target_->potential_at(x));
        const Real anchor = grid_potential_.front();
        for (Real& v : grid_potential_) v -= anchor;
    }
}

Real LejaGenerator::objective(const Real& x) const {
    CompensatedSum s;
    for (const Real& p : seq_.points) s.add(log(leja_distance(seq_.domain, x, p)));
    Real value = s.value();
    if (target_) value += Real(static_cast<long>(seq_.size())) * target_->potential_at(x);
    return value;
}

std::vector<Real> LejaGenerator::grid_objective() const {
    std::vector<Real> values = log_sums_;
    if (target_) {
        const Real n(static_cast<long>(seq_.size()));
        const Real anchor = target_->potential_at(grid_.nodes().front());
        for (size_t i = 0; i < values.size(); ++i) values[i] += n * (grid_potential_[i] + anchor);
    }
    return values;
}

Real LejaGenerator::refine(size_t best, bool potential_only) const {
    const auto nodes = grid_.nodes();
    const bool circle = grid_.domain() == LejaDomain::circle;
    const Real& center = nodes[best];
    Real lo = best > 0 ? nodes[best - 1] : (circle ? nodes.back() - two_pi() : nodes[best]);
    Real hi = best + 1 < nodes.size() ? nodes[best + 1] : (circle ? nodes.front() + two_pi() : nodes[best]);

    // Keep the bracket inside the gap between existing points containing the center.
    for (const Real& p : seq_.points) {
        const std::vector<Real> images =
            circle ? std::vector<Real>{p - two_pi(), p, p + two_pi()} : std::vector<Real>{p};
        for (const Real& q : images) {
            if (q > lo && q < center) lo = q;
            if (q < hi && q > center) hi = q;
        }
    }

    const Real anchor = target_ && !grid_potential_.empty() ? target_->potential_at(nodes.front()) : Real(0);
    const Real n(static_cast<long>(seq_.size()));
    auto f = [&](const Real& x) {
        if (potential_only) return target_->potential_at(x);
        CompensatedSum s;
        for (const Real& p : seq_.points) s.add(log(leja_distance(seq_.domain, x, p)));
        Real value = s.value();
        if (target_) value += n * (target_->potential_at(x) - anchor);
        return value;
    };

    Real best_x = center;
    Real best_f = f(center);
    const Real tol = refine_tolerance();
    const Real ratio = (sqrt(Real(5)) - Real(1)) / Real(2);
    Real c = hi - ratio * (hi - lo);
    Real d = lo + ratio * (hi - lo);
    Real fc = f(c);
    Real fd = f(d);
    auto consider = [&](const Real& x, const Real& fx) {
        if (fx > best_f || (fx == best_f && x < best_x)) {
            best_x = x;
            best_f = fx;
        }
    };
    consider(c, fc);
    consider(d, fd);
    int steps = 0;
    while (hi - lo > tol) {
        if (grid_.refinement_depth > 0 && steps++ >= grid_.refinement_depth) break;
        if (fc >= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c);
            consider(c, fc);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d);
            consider(d, fd);
        }
    }
    if (circle) {
        best_x = fmod(best_x, two_pi());
        if (best_x.sign() < 0) best_x += two_pi();
    }
    return best_x;
}

Real LejaGenerator::initial_point() {
    if (!target_) return grid_.domain() == LejaDomain::segment ? Real(1) : Real(0);
    const auto best = leftmost_argmax(grid_potential_);
    if (!best) throw DegenerateGrid("LejaGenerator: target potential is not finite on the grid");
    return refine(*best, true);
}

void LejaGenerator::absorb(const Real& point) {
    for (size_t i = 0; i < grid_.size(); ++i) {
        log_sums_[i] += log(leja_distance(seq_.domain, grid_.nodes()[i], point));
    }
    seq_.append(point);
}

const Real& LejaGenerator::extend() {
    if (seq_.empty()) {
        absorb(initial_point());
        return seq_.points.back();
    }
    std::vector<Real> values = log_sums_;
    if (target_) {
        const Real n(static_cast<long>(seq_.size()));
        for (size_t i = 0; i < values.size(); ++i) values[i] += n * grid_potential_[i];
    }
    const auto best = leftmost_argmax(values);
    if (!best) throw DegenerateGrid("LejaGenerator: every candidate collides with an existing point");
    absorb(refine(*best, false));
    return seq_.points.back();
}

void LejaGenerator::extend_to(size_t n) {
    while (seq_.size() < n) extend();
}

LejaSequence extend_unweighted(const LejaSequence& seq, const CandidateGrid& grid) {
    LejaSequence seed = seq;
    seed.target.reset();
    LejaGenerator gen(grid, std::nullopt, std::move(seed));
    gen.extend();
    return gen.sequence();
}

LejaSequence extend_weighted(const LejaSequence& seq, const TargetMeasure& mu, const CandidateGrid& grid) {
    LejaGenerator gen(grid, mu, seq);
    gen.extend();
    return gen.sequence();
}

LejaSequence leja_unweighted(size_t n, const CandidateGrid& grid) {
    LejaGenerator gen(grid, std::nullopt);
    gen.extend_to(n);
    return gen.sequence();
}

LejaSequence leja_weighted(const TargetMeasure& mu, size_t n, const CandidateGrid& grid) {
    LejaGenerator gen(grid, mu);
    gen.extend_to(n);
    return gen.sequence();
}

namespace {

Real mean_log_distance(const LejaSequence& seq, const Complex& z, size_t n) {
    CompensatedSum s;
    for (size_t k = 0; k < n; ++k) s.add(log_abs(z - seq.location(k)));
    return s.value() / Real(static_cast<long>(n));
}

size_t resolve_count(const LejaSequence& seq, size_t n) {
    if (n == 0) n = seq.size();
    if (n == 0 || n > seq.size()) throw std::invalid_argument("Leja residual: invalid prefix length");
    return n;
}

}  // namespace

std::vector<Real> verify_theorem_L(const LejaSequence& seq, std::span<const Complex> z_samples, size_t n) {
    n = resolve_count(seq, n);
    std::vector<Real> out;
    out.reserve(z_samples.size());
    for (const Complex& z : z_samples) {
        const Real green_minus_robin =
            seq.domain == LejaDomain::segment ? log_abs(phi(z)) - Real::ln2() : log_abs(z);
        out.push_back(mean_log_distance(seq, z, n) - green_minus_robin);
    }
    return out;
}

std::vector<Real> verify_weighted_asymptotics(const LejaSequence& seq, const TargetMeasure& mu,
                                              std::span<const Complex> z_samples, size_t n) {
    n = resolve_count(seq, n);
    std::vector<Real> out;
    out.reserve(z_samples.size());
    for (const Complex& z : z_samples) out.push_back(mean_log_distance(seq, z, n) + mu.potential(z));
    return out;
}

Real equidistribution_distance(const LejaSequence& seq, const TargetMeasure& mu, size_t n) {
    n = resolve_count(seq, n);
    if (seq.domain != LejaDomain::segment) throw std::invalid_argument("equidistribution_distance: segment only");
    DiscreteMeasure counting;
    for (size_t k = 0; k < n; ++k) counting.add(seq.points[k], Real(1));
    return ks_distance(counting, mu.cdf);
}

void write_leja_csv(const LejaSequence& seq, std::ostream& out, int digits) {
    out << (seq.domain == LejaDomain::segment ? "index,x\n" : "index,theta\n");
    for (size_t k = 0; k < seq.size(); ++k) out << (k + 1) << ',' << seq.points[k].to_string(digits) << '\n';
}

}  // namespace potlab
