#include "eqstab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "eqstab/sampling.hpp"

namespace eqstab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Potential constant_potential(double c) {
    std::ostringstream label;
    label << "const(" << c << ")";
    return Potential{[c](double) { return c; }, 1.0, label.str(), 0.0};
}

Potential cosine_potential(double amplitude, int frequency) {
    std::ostringstream label;
    label << amplitude << "*cos(2pi*" << frequency << "x)";
    double a = amplitude;
    double f = static_cast<double>(frequency);
    return Potential{[a, f](double x) { return a * std::cos(2.0 * kPi * f * x); }, 1.0,
                     label.str(), std::fabs(a) * 2.0 * kPi * f};
}

Potential linear_potential(double slope, double intercept) {
    std::ostringstream label;
    label << slope << "*x+" << intercept;
    return Potential{[slope, intercept](double x) { return slope * x + intercept; }, 1.0,
                     label.str(), std::fabs(slope)};
}

Potential dyadic_potential(int depth, std::vector<double> values) {
    std::size_t cells = static_cast<std::size_t>(1) << depth;
    if (values.size() != cells) throw ConfigError("dyadic_potential: values.size() != 2^depth");
    double scale = static_cast<double>(cells);
    auto vals = std::make_shared<std::vector<double>>(std::move(values));
    std::ostringstream label;
    label << "dyadic(depth=" << depth << ")";
    return Potential{[vals, scale](double x) {
                         auto i = static_cast<std::size_t>(x * scale);
                         if (i >= vals->size()) i = vals->size() - 1;
                         return (*vals)[i];
                     },
                     1.0, label.str(), std::nullopt};
}

double birkhoff_sum(const IntervalMap& map, const Potential& phi, double x, int n) {
    if (n < 1) throw Error("birkhoff_sum: n must be >= 1");
    double sum = 0.0;
    double z = x;
    for (int j = 0; j < n; ++j) {
        sum += phi(z);
        if (j + 1 < n) z = map.evaluate(z);
    }
    return sum;
}

double SupInfEstimate::holder_correction(double seminorm, double alpha) const {
    return seminorm * std::pow(grid_spacing, alpha);
}

SupInfEstimate sup_inf_estimate(const Potential& phi, int resolution) {
    if (resolution < 2) throw Error("sup_inf_estimate: resolution must be >= 2");
    SupInfEstimate est;
    est.grid_spacing = 1.0 / static_cast<double>(resolution - 1);
    est.inf = est.sup = phi(0.0);
    for (int i = 1; i < resolution; ++i) {
        double v = phi(static_cast<double>(i) * est.grid_spacing);
        est.inf = std::min(est.inf, v);
        est.sup = std::max(est.sup, v);
    }
    return est;
}

double holder_seminorm_estimate(const Potential& phi, double alpha, int pairs, Metric metric) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("holder_seminorm_estimate: alpha in (0,1]");
    if (pairs < 1) throw Error("holder_seminorm_estimate: pairs must be >= 1");
    double best = 0.0;
    auto consider = [&](double x, double y) {
        double d = metric_distance(metric, x, y);
        if (d <= 0.0) return;
        double q = std::fabs(phi(x) - phi(y)) / std::pow(d, alpha);
        best = std::max(best, q);
    };
    // Local grid pairs within distance 0.1 capture steep short-range ratios.
    constexpr int grid_n = 201;
    const double h = 1.0 / (grid_n - 1);
    const int reach = static_cast<int>(0.1 / h);
    for (int i = 0; i < grid_n; ++i)
        for (int j = i + 1; j <= std::min(grid_n - 1, i + reach); ++j)
            consider(i * h, j * h);
    // Low-discrepancy global pairs.
    for (int i = 0; i < pairs; ++i)
        consider(weyl_point(static_cast<std::size_t>(i)), weyl_point(static_cast<std::size_t>(i), 0.41421356237309503));
    return best;
}

double effective_seminorm(const Potential& phi, int pairs, Metric metric) {
    if (phi.declared_seminorm) return *phi.declared_seminorm;
    return holder_seminorm_estimate(phi, phi.alpha, pairs, metric);
}

SmallVariationResult small_variation_check(const Potential& phi, int deg, int q, int resolution) {
    if (q < 1 || q >= deg) throw InvalidCover("small_variation_check: need 1 <= q < deg");
    SupInfEstimate est = sup_inf_estimate(phi, resolution);
    SmallVariationResult r;
    r.sup = est.sup;
    r.inf = est.inf;
    r.margin = (std::log(static_cast<double>(deg)) - std::log(static_cast<double>(q))) -
               (est.sup - est.inf);
    r.ok = r.margin > 0.0;
    return r;
}

double horseshoe_variation_threshold() {
    double omega = 0.5 * (1.0 + std::sqrt(5.0));
    return 0.5 * std::log(omega);
}

SmallVariationResult horseshoe_small_variation_check(double phi_sup, double phi_inf) {
    SmallVariationResult r;
    r.sup = phi_sup;
    r.inf = phi_inf;
    r.margin = horseshoe_variation_threshold() - (phi_sup - phi_inf);
    r.ok = r.margin > 0.0;
    return r;
}

}  // namespace eqstab
