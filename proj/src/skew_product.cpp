#include "eqstab/skew_product.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "eqstab/parallel.hpp"
#include "eqstab/sampling.hpp"

namespace eqstab {

SkewSystem::SkewSystem(IntervalMap base, std::function<double(double, double)> fiber,
                       double lambda_c, std::vector<FiberPiece> pieces, int probe_grid)
    : base_(std::move(base)), fiber_(std::move(fiber)), lambda_c_(lambda_c),
      pieces_(std::move(pieces)) {
    if (!(lambda_c_ > 0.0 && lambda_c_ < 1.0))
        throw ConfigError("SkewSystem: contraction rate must lie in (0,1)");
    if (pieces_.empty()) throw ConfigError("SkewSystem: at least one fiber piece required");
    // Probe the declared contraction rate and the fixed fiber points.
    for (const FiberPiece& piece : pieces_) {
        for (int i = 0; i < probe_grid; ++i) {
            double x = (i + 0.5) / probe_grid;
            for (int a = 0; a < 8; ++a) {
                double y1 = piece.lo + (piece.hi - piece.lo) * weyl_point(static_cast<std::size_t>(a), 0.17);
                double y2 = piece.lo + (piece.hi - piece.lo) * weyl_point(static_cast<std::size_t>(a), 0.71);
                if (std::fabs(y1 - y2) < 1e-12) continue;
                double contraction =
                    std::fabs(fiber_(x, y1) - fiber_(x, y2)) / std::fabs(y1 - y2);
                if (contraction > lambda_c_ + 1e-9)
                    throw ConfigError("SkewSystem: fiber map exceeds the declared contraction rate");
            }
            if (piece.y0 && std::fabs(fiber_(x, *piece.y0) - *piece.y0) > 1e-12)
                throw ConfigError("SkewSystem: declared fiber point is not fixed");
        }
    }
}

std::pair<double, double> SkewSystem::evaluate(std::pair<double, double> p) const {
    return {base_.evaluate(p.first), fiber_(p.first, p.second)};
}

bool SkewSystem::has_y0(int piece) const {
    return piece >= 0 && piece < static_cast<int>(pieces_.size()) &&
           pieces_[static_cast<std::size_t>(piece)].y0.has_value();
}

double SkewSystem::y0(int piece) const {
    if (!has_y0(piece)) throw Error("SkewSystem: fiber piece has no validated fixed point");
    return *pieces_[static_cast<std::size_t>(piece)].y0;
}

// --- cohomology -------------------------------------------------------------

double cohomology_tail_bound(const ProductPotential& phi, const SkewSystem& sys, int truncation) {
    double q = std::pow(sys.lambda_c(), phi.alpha);
    return phi.holder_const * std::pow(q, truncation) / (1.0 - q);
}

int cohomology_truncation_for(const ProductPotential& phi, const SkewSystem& sys, double target) {
    double q = std::pow(sys.lambda_c(), phi.alpha);
    double c = phi.holder_const / (1.0 - q);
    if (c <= target) return 1;
    int j = static_cast<int>(std::ceil(std::log(target / c) / std::log(q)));
    return std::max(j, 1);
}

std::pair<double, CohomologyData> u_truncated(const SkewSystem& sys, const ProductPotential& phi,
                                              std::pair<double, double> p, int truncation,
                                              int piece) {
    if (truncation < 1) throw Error("u_truncated: truncation must be >= 1");
    double y0 = sys.y0(piece);
    double sum = 0.0;
    std::pair<double, double> a = p;
    std::pair<double, double> b{p.first, y0};
    for (int j = 0; j < truncation; ++j) {
        sum += phi(a.first, a.second) - phi(b.first, b.second);
        a = sys.evaluate(a);
        b = sys.evaluate(b);
    }
    CohomologyData data{truncation, cohomology_tail_bound(phi, sys, truncation)};
    return {sum, data};
}

ProductPotential bar_phi(const ProductPotential& phi, const SkewSystem& sys, int piece) {
    double y0 = sys.y0(piece);
    auto f = phi.eval;
    ProductPotential out;
    out.eval = [f, y0](double x, double) { return f(x, y0); };
    out.alpha = phi.alpha;
    out.holder_const = phi.holder_const;
    out.label = phi.label + "|y0";
    return out;
}

Potential induced_base_potential(const ProductPotential& barphi, double z0, double z1) {
    for (int i = 0; i < 1000; ++i) {
        double x = weyl_point(static_cast<std::size_t>(i), 0.09);
        if (std::fabs(barphi(x, z0) - barphi(x, z1)) > 1e-12)
            throw FiberDependence("induced_base_potential: potential depends on the fiber");
    }
    auto f = barphi.eval;
    double z = z0;
    Potential out;
    out.eval = [f, z](double x) { return f(x, z); };
    out.alpha = barphi.alpha;
    out.label = barphi.label + "|base";
    out.declared_seminorm = barphi.holder_const;
    return out;
}

// --- lifting ------------------------------------------------------------------

std::vector<LiftedSample> lift_measure(const SkewSystem& sys, const std::vector<double>& base_orbit,
                                       int burn_in, double y_init) {
    if (burn_in < 1) throw Error("lift_measure: burn_in must be >= 1");
    if (static_cast<int>(base_orbit.size()) <= burn_in)
        throw Error("lift_measure: base orbit shorter than burn_in");
    std::vector<LiftedSample> out;
    out.reserve(base_orbit.size() - static_cast<std::size_t>(burn_in));
    for (std::size_t t = static_cast<std::size_t>(burn_in); t < base_orbit.size(); ++t) {
        double y = y_init;
        for (std::size_t s = t - static_cast<std::size_t>(burn_in); s < t; ++s)
            y = sys.fiber(base_orbit[s], y);
        out.push_back({base_orbit[t], y});
    }
    return out;
}

// --- 2-D discretization --------------------------------------------------------

UlamDiscretization build_ulam_skew(const SkewSystem& sys, const ProductPotential& phi, int k,
                                   int k_fiber, int quadrature_base, int quadrature_fiber) {
    if (k < 2 || k_fiber < 1) throw Error("build_ulam_skew: bad resolution");
    const IntervalMap& base = sys.base();
    UlamDiscretization disc;
    disc.k = k * k_fiber;
    disc.quadrature = quadrature_base;
    disc.degree = base.degree();
    disc.matrix = SparseMatrix(disc.k);

    const double fw = 1.0 / static_cast<double>(k_fiber);
    auto cell_index = [k_fiber](int i_base, int m_fiber) { return i_base * k_fiber + m_fiber; };

    std::vector<std::vector<std::pair<std::int32_t, double>>> columns(
        static_cast<std::size_t>(disc.k));
    parallel_for(static_cast<std::size_t>(k), [&](std::size_t jz) {
        int j = static_cast<int>(jz);
        for_each_ulam_piece(base, k, j, [&](int b, double plo, double phi_, int i) {
            const Branch& br = base.branches()[static_cast<std::size_t>(b)];
            double w = (phi_ - plo) / quadrature_base;
            for (int m = 0; m < quadrature_base; ++m) {
                double x = plo + (m + 0.5) * w;
                double jac = std::fabs(br.derivative(x)) * w;
                for (int l = 0; l < k_fiber; ++l) {
                    auto& col = columns[static_cast<std::size_t>(cell_index(j, l))];
                    for (int s = 0; s < quadrature_fiber; ++s) {
                        double y = (l + (s + 0.5) / quadrature_fiber) * fw;
                        double gy = sys.fiber(x, y);
                        int tf = std::clamp(static_cast<int>(std::floor(gy * k_fiber)), 0,
                                            k_fiber - 1);
                        double val = k * std::exp(phi(x, y)) * jac / quadrature_fiber;
                        col.emplace_back(cell_index(i, tf), val);
                    }
                }
            }
        });
    });
    for (int j = 0; j < disc.k; ++j)
        for (const auto& [i, v] : columns[static_cast<std::size_t>(j)]) disc.matrix.add(i, j, v);
    disc.matrix.finalize();
    return disc;
}

SkewPressureReport skew_pressure_check(const SkewSystem& sys, const ProductPotential& phi,
                                       const SkewCheckParams& params) {
    SkewPressureReport rep;
    rep.k = params.k;
    rep.k_fiber = params.k_fiber > 0
                      ? params.k_fiber
                      : 2 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(params.k))));
    rep.burn_in = params.burn_in;
    rep.truncation = params.truncation > 0 ? params.truncation
                                           : cohomology_truncation_for(phi, sys, 1e-8);
    rep.tail_bound = cohomology_tail_bound(phi, sys, rep.truncation);

    // Base route: P_f of the induced potential.
    ProductPotential reduced = bar_phi(phi, sys);
    Potential base_phi = induced_base_potential(reduced);
    rep.p_base = power_iterate(build_ulam(sys.base(), base_phi, params.k)).pressure;

    // Skew route: 2-D Ulam with the original potential.
    rep.p_skew = power_iterate(build_ulam_skew(sys, phi, params.k, rep.k_fiber)).pressure;
    rep.diff = std::fabs(rep.p_skew - rep.p_base);

    // Truncated homology residual |phi - u_J + u_J o F - bar_phi| on probes.
    double max_residual = 0.0;
    for (int i = 0; i < params.homology_probes; ++i) {
        double x = weyl_point(static_cast<std::size_t>(i), 0.13);
        double y = weyl_point(static_cast<std::size_t>(i), 0.57);
        auto [u_p, data] = u_truncated(sys, phi, {x, y}, rep.truncation);
        auto fp = sys.evaluate({x, y});
        auto [u_fp, data2] = u_truncated(sys, phi, fp, rep.truncation);
        double residual = phi(x, y) - u_p + u_fp - reduced(x, y);
        max_residual = std::max(max_residual, std::fabs(residual));
    }
    rep.homology_residual_max = max_residual;

    // Homologous potentials integrate equally against invariant measures;
    // along lifted orbit samples the gap telescopes at rate 1/n.
    auto base_orbit = sys.base().orbit(weyl_point(11, 0.37), params.lift_samples + params.burn_in);
    auto lifted = lift_measure(sys, base_orbit, params.burn_in);
    double mean_phi = 0.0, mean_bar = 0.0;
    for (const auto& s : lifted) {
        mean_phi += phi(s.x, s.y);
        mean_bar += reduced(s.x, s.y);
    }
    mean_phi /= static_cast<double>(lifted.size());
    mean_bar /= static_cast<double>(lifted.size());
    rep.integral_identity_gap = std::fabs(mean_phi - mean_bar);
    return rep;
}

std::string skew_report_to_json(const SkewPressureReport& rep) {
    nlohmann::json j;
    j["P_base"] = rep.p_base;
    j["P_skew"] = rep.p_skew;
    j["diff"] = rep.diff;
    j["homology_residual_max"] = rep.homology_residual_max;
    j["tail_bound"] = rep.tail_bound;
    j["truncation"] = rep.truncation;
    j["integral_identity_gap"] = rep.integral_identity_gap;
    j["burn_in"] = rep.burn_in;
    j["k"] = rep.k;
    j["k_fiber"] = rep.k_fiber;
    return j.dump(2);
}

SkewSystem solenoid_skew(double rate) {
    return SkewSystem(doubling_map(), [rate](double, double y) { return rate * y; }, rate,
                      {FiberPiece{0.0, 1.0, 0.0}});
}

SkewSystem two_piece_skew(double rate) {
    auto g = [rate](double, double y) {
        if (y <= 0.5) return rate * y;                  // fixes 0
        return 1.0 - rate * (1.0 - y);                  // fixes 1
    };
    return SkewSystem(doubling_map(), g, rate,
                      {FiberPiece{0.0, 0.5, 0.0}, FiberPiece{0.5, 1.0, 1.0}});
}

}  // namespace eqstab
