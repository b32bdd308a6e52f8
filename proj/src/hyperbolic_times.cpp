#include "eqstab/hyperbolic_times.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "eqstab/sampling.hpp"

namespace eqstab {

OrbitExpansionData OrbitExpansionData::from_sequence(std::vector<double> a, double c) {
    OrbitExpansionData d;
    d.a = std::move(a);
    d.c = c;
    d.prefix.resize(d.a.size() + 1);
    d.prefix[0] = 0.0;
    for (std::size_t i = 0; i < d.a.size(); ++i) d.prefix[i + 1] = d.prefix[i] + d.a[i];
    return d;
}

OrbitExpansionData OrbitExpansionData::from_orbit(const IntervalMap& map, double x, int n,
                                                  double c) {
    std::vector<double> a(static_cast<std::size_t>(n));
    double z = x;
    for (int j = 0; j < n; ++j) {
        a[static_cast<std::size_t>(j)] = map.log_inv_derivative(z);
        z = map.evaluate(z);
    }
    return from_sequence(std::move(a), c);
}

double OrbitExpansionData::statistic(int n) const { return nue_statistic(*this, n); }

std::vector<int> detect_hyperbolic_times(const OrbitExpansionData& data, HtConvention convention) {
    if (data.c <= 0.0) throw Error("detect_hyperbolic_times: c must be > 0");
    const int len = static_cast<int>(data.a.size());
    std::vector<int> out;
    // S_n - S_{n-k} <= -ck/2 for all k  <=>  T_n <= min over prior T_m,
    // T_m = S_m + c m / 2; inclusive starts the minimum at m = 0.
    double half_c = 0.5 * data.c;
    double run_min = std::numeric_limits<double>::infinity();
    if (convention == HtConvention::inclusive) run_min = 0.0;  // T_0
    for (int n = 1; n <= len; ++n) {
        double t_n = data.prefix[static_cast<std::size_t>(n)] + half_c * n;
        if (t_n <= run_min) out.push_back(n);
        run_min = std::min(run_min, t_n);
    }
    return out;
}

std::vector<int> detect_hyperbolic_times_bruteforce(const OrbitExpansionData& data,
                                                    HtConvention convention) {
    const int len = static_cast<int>(data.a.size());
    std::vector<int> out;
    for (int n = 1; n <= len; ++n) {
        int kmax = (convention == HtConvention::inclusive) ? n : n - 1;
        bool hyp = true;
        for (int k = 1; k <= kmax; ++k) {
            double block = data.prefix[static_cast<std::size_t>(n)] -
                           data.prefix[static_cast<std::size_t>(n - k)];
            if (!(block <= -0.5 * data.c * k)) {
                hyp = false;
                break;
            }
        }
        if (hyp) out.push_back(n);
    }
    return out;
}

double nue_statistic(const OrbitExpansionData& data, int n) {
    if (n < 1 || n > static_cast<int>(data.a.size())) throw Error("nue_statistic: n out of range");
    return data.prefix[static_cast<std::size_t>(n)] / static_cast<double>(n);
}

double estimate_c(const IntervalMap& map, int samples, int n) {
    if (samples < 1 || n < 1) throw Error("estimate_c: samples and n must be >= 1");
    std::vector<double> stats;
    stats.reserve(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) {
        double x = weyl_point(static_cast<std::size_t>(s), 0.2137);
        try {
            auto data = OrbitExpansionData::from_orbit(map, x, n, 1.0);
            stats.push_back(nue_statistic(data, n));
        } catch (const BranchBoundary&) {
            // orbit hit a partition endpoint; skip this start point
        }
    }
    if (stats.empty()) throw Error("estimate_c: no usable sample orbits");
    std::sort(stats.begin(), stats.end());
    double median = stats[stats.size() / 2];
    if (median >= 0.0) throw NotExpanding("estimate_c: median expansion statistic is non-negative");
    return -0.5 * median;
}

double delta1_estimate(const IntervalMap& map, double c, int grid) {
    if (c <= 0.0) throw Error("delta1_estimate: c must be > 0");
    std::vector<double> a(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i)
        a[static_cast<std::size_t>(i)] = map.log_inv_derivative((i + 0.5) / static_cast<double>(grid));
    const double budget = c / 4.0;
    const bool circle = map.metric() == Metric::circle;
    // max-min of a over every window of diameter 2 eps, via monotonic deques
    auto window_ok = [&](double eps) {
        int w = static_cast<int>(std::ceil(2.0 * eps * grid));  // points per window
        if (w < 1) w = 1;
        int total = circle ? grid + w : grid;
        std::deque<int> maxq, minq;
        for (int i = 0; i < total; ++i) {
            int idx = i % grid;
            double v = a[static_cast<std::size_t>(idx)];
            while (!maxq.empty() && a[static_cast<std::size_t>(maxq.back() % grid)] <= v) maxq.pop_back();
            maxq.push_back(i);
            while (!minq.empty() && a[static_cast<std::size_t>(minq.back() % grid)] >= v) minq.pop_back();
            minq.push_back(i);
            while (maxq.front() <= i - w) maxq.pop_front();
            while (minq.front() <= i - w) minq.pop_front();
            if (i >= w - 1) {
                double spread = a[static_cast<std::size_t>(maxq.front() % grid)] -
                                a[static_cast<std::size_t>(minq.front() % grid)];
                if (spread > budget) return false;
            }
        }
        return true;
    };
    double eps = 0.25;
    const double floor_eps = 1.0 / static_cast<double>(grid);
    while (eps >= floor_eps) {
        if (window_ok(eps)) return eps;
        eps *= 0.5;
    }
    return 0.0;
}

double pliss_density_floor(const OrbitExpansionData& data) {
    if (data.a.empty()) throw Error("pliss_density_floor: empty sequence");
    double stat = nue_statistic(data, static_cast<int>(data.a.size()));
    double max_gain = 0.0;
    for (double v : data.a) max_gain = std::max(max_gain, -v);
    double denom = max_gain - 0.5 * data.c;
    if (denom <= 0.0) return 1.0;  // every suffix already contracts at rate c/2
    return ((-stat) - 0.5 * data.c) / denom;
}

std::vector<BallLevel> pullback_dynamic_ball(const IntervalMap& map,
                                             const std::vector<double>& orbit, double eps,
                                             PullbackMode mode) {
    if (orbit.size() < 2) throw Error("pullback_dynamic_ball: orbit must hold x..f^n x");
    if (!(eps > 0.0) || eps >= 0.5) throw Error("pullback_dynamic_ball: need 0 < eps < 1/2");
    const int n = static_cast<int>(orbit.size()) - 1;
    std::vector<BallLevel> levels(static_cast<std::size_t>(n) + 1);
    levels[static_cast<std::size_t>(n)] = {orbit[static_cast<std::size_t>(n)] - eps,
                                           orbit[static_cast<std::size_t>(n)] + eps};
    constexpr double tol = 1e-12;
    for (int j = n; j >= 1; --j) {
        double z = orbit[static_cast<std::size_t>(j - 1)];
        int b = map.branch_index(z);
        const Branch& br = map.branches()[static_cast<std::size_t>(b)];
        // Undo the circle wrap: the branch formula may differ from the
        // recorded orbit point by an integer.
        double raw = map.branch_forward_raw(b, z);
        double shift = std::round(raw - orbit[static_cast<std::size_t>(j)]);
        double lo = levels[static_cast<std::size_t>(j)].lo + shift;
        double hi = levels[static_cast<std::size_t>(j)].hi + shift;
        double img_a = br.image_lo(), img_b = br.image_hi();
        double img_lo = std::min(img_a, img_b), img_hi = std::max(img_a, img_b);
        if (lo < img_lo - tol || hi > img_hi + tol) {
            if (mode == PullbackMode::strict)
                throw BallEscapesBranch("pullback_dynamic_ball: ball leaves branch image", j);
        }
        lo = std::clamp(lo, img_lo, img_hi);
        hi = std::clamp(hi, img_lo, img_hi);
        double pa = map.branch_inverse(b, lo);
        double pb = map.branch_inverse(b, hi);
        double plo = std::min(pa, pb), phi = std::max(pa, pb);
        // enforce d(f^{j-1} y, f^{j-1} x) < eps
        plo = std::max(plo, z - eps);
        phi = std::min(phi, z + eps);
        if (phi < plo) phi = plo = z;  // degenerate, should not happen for valid inputs
        levels[static_cast<std::size_t>(j - 1)] = {plo, phi};
    }
    return levels;
}

double distortion_k_bound(double seminorm, double alpha, double c, double eps) {
    double q = std::exp(-c * alpha / 4.0);
    double series = q / (1.0 - q);  // sum_{j>=1} e^{-c alpha j / 4}
    return std::exp(seminorm * std::pow(2.0 * eps, alpha) * series);
}

ContractionReport verify_contraction(const IntervalMap& map, const Potential& phi, double x,
                                     int n, double c, double eps, int probes) {
    if (n < 1) throw Error("verify_contraction: n must be >= 1");
    auto data = OrbitExpansionData::from_orbit(map, x, n, c);
    auto hts = detect_hyperbolic_times(data, HtConvention::inclusive);
    if (std::find(hts.begin(), hts.end(), n) == hts.end())
        throw Error("verify_contraction: n is not a hyperbolic time for x");
    auto orbit = map.orbit(x, n + 1);
    auto levels = pullback_dynamic_ball(map, orbit, eps, PullbackMode::strict);

    ContractionReport rep;
    rep.n = n;
    rep.k_bound = distortion_k_bound(effective_seminorm(phi), phi.alpha, c, eps);
    rep.pairs.resize(static_cast<std::size_t>(n));
    for (int j = 1; j <= n; ++j)
        rep.pairs[static_cast<std::size_t>(j - 1)] = {j, 0.0, std::exp(-c * j / 4.0)};

    const BallLevel& base = levels[0];
    rep.distortion_min = std::numeric_limits<double>::infinity();
    rep.distortion_max = -std::numeric_limits<double>::infinity();
    int used = 0;
    for (int p = 0; p < probes; ++p) {
        double u = weyl_point(static_cast<std::size_t>(2 * p), 0.05);
        double v = weyl_point(static_cast<std::size_t>(2 * p + 1), 0.55);
        double y = base.lo + u * base.length();
        double z = base.lo + v * base.length();
        if (std::fabs(y - z) < 1e-15) continue;
        auto oy = map.orbit(y, n + 1);
        auto oz = map.orbit(z, n + 1);
        double dn = map.distance(oy[static_cast<std::size_t>(n)], oz[static_cast<std::size_t>(n)]);
        if (dn < 1e-15) continue;
        for (int j = 1; j <= n; ++j) {
            double dj = map.distance(oy[static_cast<std::size_t>(n - j)],
                                     oz[static_cast<std::size_t>(n - j)]);
            auto& entry = rep.pairs[static_cast<std::size_t>(j - 1)];
            entry.observed_ratio = std::max(entry.observed_ratio, dj / dn);
        }
        double dist = std::exp(birkhoff_sum(map, phi, y, n) - birkhoff_sum(map, phi, z, n));
        rep.distortion_min = std::min(rep.distortion_min, dist);
        rep.distortion_max = std::max(rep.distortion_max, dist);
        ++used;
    }
    if (used == 0) throw Error("verify_contraction: no usable probe pairs");
    rep.contraction_ok = true;
    for (const auto& e : rep.pairs)
        if (e.observed_ratio > e.bound * (1.0 + 1e-9)) rep.contraction_ok = false;
    rep.distortion_ok =
        rep.distortion_max <= rep.k_bound * (1.0 + 1e-9) && rep.distortion_min >= 1.0 / rep.k_bound * (1.0 - 1e-9);
    return rep;
}

}  // namespace eqstab
