#include "eqstab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eqstab {

double metric_distance(Metric m, double a, double b) {
    double d = std::fabs(a - b);
    if (m == Metric::circle) {
        d = std::fmod(d, 1.0);
        d = std::min(d, 1.0 - d);
    }
    return d;
}

IntervalMap::IntervalMap(std::string name, Metric metric, int degree,
                         std::vector<Branch> branches)
    : name_(std::move(name)), metric_(metric), degree_(degree), branches_(std::move(branches)) {
    if (branches_.empty()) throw ConfigError("IntervalMap: no branches");
    for (std::size_t i = 0; i < branches_.size(); ++i) {
        const Branch& b = branches_[i];
        if (!(b.lo < b.hi)) throw ConfigError("IntervalMap: empty branch domain");
        if (!b.forward || !b.derivative) throw ConfigError("IntervalMap: branch lacks forward/derivative");
        if (i > 0 && std::fabs(branches_[i - 1].hi - b.lo) > 1e-12)
            throw ConfigError("IntervalMap: branch domains do not partition [0,1]");
    }
    if (std::fabs(branches_.front().lo) > 1e-12 || std::fabs(branches_.back().hi - 1.0) > 1e-12)
        throw ConfigError("IntervalMap: branches must cover [0,1]");
}

int IntervalMap::branch_index(double x) const {
    if (x < 0.0 || x > 1.0) throw Error("IntervalMap: point outside [0,1]");
    // Shared endpoints resolve to the branch on the left.
    for (std::size_t i = 0; i < branches_.size(); ++i)
        if (x <= branches_[i].hi) return static_cast<int>(i);
    return static_cast<int>(branches_.size()) - 1;
}

double IntervalMap::evaluate(double x) const {
    double y = branches_[static_cast<std::size_t>(branch_index(x))].forward(x);
    if (metric_ == Metric::circle && (y < 0.0 || y > 1.0)) y -= std::floor(y);
    return y;
}

std::vector<std::pair<int, double>> IntervalMap::inverse_branches(double x) const {
    if (x < 0.0 || x > 1.0) throw Error("inverse_branches: point outside [0,1]");
    std::vector<std::pair<int, double>> pre;
    pre.reserve(static_cast<std::size_t>(degree_));
    for (std::size_t b = 0; b < branches_.size(); ++b) {
        const Branch& br = branches_[b];
        double a = br.image_lo(), c = br.image_hi();
        double ilo = std::min(a, c), ihi = std::max(a, c);
        if (x < ilo - root_tolerance || x > ihi + root_tolerance) continue;
        double v = std::clamp(x, ilo, ihi);
        pre.emplace_back(static_cast<int>(b), branch_inverse(static_cast<int>(b), v));
    }
    return pre;
}

double IntervalMap::branch_inverse(int b, double v) const {
    const Branch& br = branches_[static_cast<std::size_t>(b)];
    if (br.has_closed_inverse()) return br.inverse(v);
    return newton_inverse(br, v);
}

double IntervalMap::newton_inverse(const Branch& br, double v) const {
    double lo = br.lo, hi = br.hi;
    double flo = br.forward(lo), fhi = br.forward(hi);
    bool inc = fhi >= flo;
    // Endpoint fast path keeps exact preimages at branch corners.
    if (std::fabs(flo - v) <= root_tolerance) return lo;
    if (std::fabs(fhi - v) <= root_tolerance) return hi;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < newton_max_iter; ++it) {
        double fx = br.forward(x);
        double err = fx - v;
        if (std::fabs(err) <= root_tolerance) return x;
        if ((err > 0.0) == inc)
            hi = x;
        else
            lo = x;
        double d = br.derivative(x);
        double step = (d != 0.0) ? x - err / d : lo - 1.0;  // force bisection if flat
        x = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
    }
    std::ostringstream msg;
    msg << "newton_inverse: no convergence for value " << v << " on [" << br.lo << ", " << br.hi << "]";
    throw RootNotConverged(msg.str());
}

double IntervalMap::log_inv_derivative(double x) const {
    int b = branch_index(x);
    const Branch& br = branches_[static_cast<std::size_t>(b)];
    double d = std::fabs(br.derivative(x));
    // Interior partition endpoint: compare with the right branch.
    bool at_right_end = std::fabs(x - br.hi) < 1e-15 && b + 1 < static_cast<int>(branches_.size());
    bool at_left_end = std::fabs(x - br.lo) < 1e-15 && b > 0;
    if (at_right_end || at_left_end) {
        const Branch& other = branches_[static_cast<std::size_t>(at_right_end ? b + 1 : b - 1)];
        double d2 = std::fabs(other.derivative(x));
        if (std::fabs(d - d2) > 1e-9 * std::max(1.0, std::fabs(d)))
            throw BranchBoundary("log_inv_derivative: ambiguous derivative at partition endpoint");
    }
    if (d <= 0.0) throw Error("log_inv_derivative: vanishing derivative");
    return -std::log(d);
}

std::vector<double> IntervalMap::orbit(double x, int n) const {
    if (n < 1) throw Error("orbit: n must be >= 1");
    std::vector<double> pts(static_cast<std::size_t>(n));
    pts[0] = x;
    for (int i = 1; i < n; ++i) pts[static_cast<std::size_t>(i)] = evaluate(pts[static_cast<std::size_t>(i - 1)]);
    return pts;
}

// --- presets -------------------------------------------------------------

IntervalMap doubling_map() {
    std::vector<Branch> br(2);
    br[0] = Branch{0.0, 0.5, [](double x) { return 2.0 * x; }, [](double) { return 2.0; },
                   [](double v) { return 0.5 * v; }};
    br[1] = Branch{0.5, 1.0, [](double x) { return 2.0 * x - 1.0; }, [](double) { return 2.0; },
                   [](double v) { return 0.5 * (v + 1.0); }};
    return IntervalMap("doubling", Metric::circle, 2, std::move(br));
}

IntervalMap linear_full_map(int degree) {
    if (degree < 2) throw ConfigError("linear_full_map: degree must be >= 2");
    std::vector<Branch> br(static_cast<std::size_t>(degree));
    double d = static_cast<double>(degree);
    for (int i = 0; i < degree; ++i) {
        double lo = static_cast<double>(i) / d;
        br[static_cast<std::size_t>(i)] =
            Branch{lo, static_cast<double>(i + 1) / d,
                   [d, lo](double x) { return d * (x - lo); },
                   [d](double) { return d; },
                   [d, lo](double v) { return lo + v / d; }};
    }
    return IntervalMap("linear" + std::to_string(degree), Metric::circle, degree, std::move(br));
}

IntervalMap intermittent_map(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("intermittent_map: alpha must be in (0,1)");
    double c = std::pow(2.0, alpha);
    std::vector<Branch> br(2);
    br[0] = Branch{0.0, 0.5,
                   [c, alpha](double x) { return x * (1.0 + c * std::pow(x, alpha)); },
                   [c, alpha](double x) { return 1.0 + c * (1.0 + alpha) * std::pow(x, alpha); },
                   nullptr};
    br[1] = Branch{0.5, 1.0,
                   [c, alpha](double x) { return x - c * std::pow(1.0 - x, 1.0 + alpha); },
                   [c, alpha](double x) { return 1.0 + c * (1.0 + alpha) * std::pow(1.0 - x, alpha); },
                   nullptr};
    std::ostringstream name;
    name << "intermittent(alpha=" << alpha << ")";
    return IntervalMap(name.str(), Metric::circle, 2, std::move(br));
}

IntervalMap abv_linear_map(double slow_width) {
    if (!(slow_width > 0.5 && slow_width < 1.0))
        throw ConfigError("abv_linear_map: slow_width must be in (0.5, 1)");
    double w = slow_width;
    std::vector<Branch> br(2);
    br[0] = Branch{0.0, w, [w](double x) { return x / w; }, [w](double) { return 1.0 / w; },
                   [w](double v) { return v * w; }};
    br[1] = Branch{w, 1.0, [w](double x) { return (x - w) / (1.0 - w); },
                   [w](double) { return 1.0 / (1.0 - w); },
                   [w](double v) { return w + v * (1.0 - w); }};
    std::ostringstream name;
    name << "abv_linear(w=" << w << ")";
    return IntervalMap(name.str(), Metric::circle, 2, std::move(br));
}

AbvClassification classify_abv(const IntervalMap& map, double delta, double sigma) {
    AbvClassification cls;
    cls.admissible = true;
    double log_slow = std::log(1.0 + delta);
    double log_fast = std::log(sigma);
    for (std::size_t b = 0; b < map.branches().size(); ++b) {
        const Branch& br = map.branches()[b];
        double mid = 0.5 * (br.lo + br.hi);
        double a = map.log_inv_derivative(mid);  // = log ||Df^-1|| on the branch interior
        if (a <= log_fast)
            cls.fast_branches.push_back(static_cast<int>(b));
        else if (a <= log_slow)
            cls.slow_branches.push_back(static_cast<int>(b));
        else
            cls.admissible = false;
    }
    return cls;
}

// --- horseshoe -----------------------------------------------------------

Horseshoe::Horseshoe(const HorseshoeParams& p) : p_(p) {
    if (!(p.rho > 0.0 && p.rho < 1.0 / 3.0)) throw ConfigError("horseshoe: need 0 < rho < 1/3");
    if (!(p.beta > 6.0)) throw ConfigError("horseshoe: need beta > 6");
    if (!(p.beta1 > 3.0 && p.beta1 < 4.0)) throw ConfigError("horseshoe: need 3 < beta1 < 4");
    if (!(p.sigma > 0.0 && p.sigma < 1.0 / 3.0)) throw ConfigError("horseshoe: need 0 < sigma < 1/3");
}

double Horseshoe::fiber_f(double y) {
    return 1.0 / (1.0 - (1.0 - 1.0 / y) * std::exp(-1.0));
}

bool Horseshoe::in_r0(const Vec3& q) const {
    return q[0] >= 0.0 && q[0] <= 1.0 && q[1] >= 0.0 && q[1] <= 1.0 && q[2] >= 0.0 &&
           q[2] <= 1.0 / 6.0;
}

bool Horseshoe::in_r1(const Vec3& q) const {
    return q[0] >= 0.0 && q[0] <= 1.0 && q[1] >= 0.0 && q[1] <= 1.0 && q[2] >= 5.0 / 6.0 &&
           q[2] <= 1.0;
}

Vec3 Horseshoe::f0(const Vec3& q) const { return {p_.rho * q[0], fiber_f(q[1]), p_.beta * q[2]}; }

Vec3 Horseshoe::f1(const Vec3& q) const {
    return {0.75 - p_.rho * q[0], p_.sigma * (1.0 - q[1]), p_.beta1 * (q[2] - 5.0 / 6.0)};
}

Vec3 Horseshoe::evaluate(const Vec3& q) const {
    if (in_r0(q)) return f0(q);
    if (in_r1(q)) return f1(q);
    throw Error("horseshoe: point outside R0 u R1");
}

std::vector<Vec3> Horseshoe::orbit(const Vec3& q, int n) const {
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(n));
    Vec3 cur = q;
    for (int i = 0; i < n; ++i) {
        if (!in_r0(cur) && !in_r1(cur)) break;
        pts.push_back(cur);
        cur = evaluate(cur);
    }
    return pts;
}

}  // namespace eqstab
