#include "eqstab/transfer_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>

#include <json.hpp>

#include "eqstab/hyperbolic_times.hpp"
#include "eqstab/io_util.hpp"
#include "eqstab/parallel.hpp"
#include "eqstab/sampling.hpp"

namespace eqstab {

// --- SparseMatrix ----------------------------------------------------------

void SparseMatrix::add(int row, int col, double value) {
    if (value == 0.0) return;
    cols_[static_cast<std::size_t>(col)].emplace_back(row, value);
}

void SparseMatrix::finalize() {
    for (auto& col : cols_) {
        std::sort(col.begin(), col.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t out = 0;
        for (std::size_t i = 0; i < col.size(); ++i) {
            if (out > 0 && col[out - 1].first == col[i].first)
                col[out - 1].second += col[i].second;
            else
                col[out++] = col[i];
        }
        col.resize(out);
    }
}

void SparseMatrix::apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) {
        double xj = x[static_cast<std::size_t>(j)];
        if (xj == 0.0) continue;
        for (const auto& [i, v] : cols_[static_cast<std::size_t>(j)])
            y[static_cast<std::size_t>(i)] += v * xj;
    }
}

void SparseMatrix::apply_transpose(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) {
        double acc = 0.0;
        for (const auto& [i, v] : cols_[static_cast<std::size_t>(j)])
            acc += v * x[static_cast<std::size_t>(i)];
        y[static_cast<std::size_t>(j)] = acc;
    }
}

double SparseMatrix::column_sum(int j) const {
    double s = 0.0;
    for (const auto& [i, v] : cols_[static_cast<std::size_t>(j)]) s += v;
    return s;
}

int UlamDiscretization::cell_of(double x) const {
    int i = static_cast<int>(std::floor(x * static_cast<double>(k)));
    return std::clamp(i, 0, k - 1);
}

// --- operator application and discretization -------------------------------

double apply_pointwise(const IntervalMap& map, const Potential& phi,
                       const std::function<double(double)>& psi, double x) {
    double sum = 0.0;
    for (const auto& [b, y] : map.inverse_branches(x)) sum += std::exp(phi(y)) * psi(y);
    return sum;
}

void for_each_ulam_piece(const IntervalMap& map, int k, int source_cell,
                         const std::function<void(int branch, double lo, double hi, int target)>& fn) {
    const double cw = 1.0 / static_cast<double>(k);
    double cell_lo = source_cell * cw, cell_hi = (source_cell + 1) * cw;
    for (std::size_t b = 0; b < map.branches().size(); ++b) {
        const Branch& br = map.branches()[b];
        double rlo = std::max(br.lo, cell_lo);
        double rhi = std::min(br.hi, cell_hi);
        if (rhi <= rlo + 1e-15) continue;
        // Split the restriction at the preimages of target-cell boundaries,
        // so the landing cell is constant on each piece (raw image space:
        // circle wrap is applied to the landing cell only).
        double vlo = br.forward(rlo), vhi = br.forward(rhi);
        double a = std::min(vlo, vhi), bv = std::max(vlo, vhi);
        std::vector<double> cuts;
        cuts.push_back(rlo);
        long m_first = static_cast<long>(std::floor(a / cw)) + 1;
        long m_last = static_cast<long>(std::ceil(bv / cw)) - 1;
        for (long m = m_first; m <= m_last; ++m) {
            double v = static_cast<double>(m) * cw;
            if (v <= a + 1e-15 || v >= bv - 1e-15) continue;
            cuts.push_back(map.branch_inverse(static_cast<int>(b), v));
        }
        cuts.push_back(rhi);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
            double plo = cuts[p], phi_ = cuts[p + 1];
            if (phi_ - plo < 1e-15) continue;
            double fmid = br.forward(0.5 * (plo + phi_));
            if (map.metric() == Metric::circle && (fmid < 0.0 || fmid > 1.0))
                fmid -= std::floor(fmid);
            int target = std::clamp(static_cast<int>(std::floor(fmid * k)), 0, k - 1);
            fn(static_cast<int>(b), plo, phi_, target);
        }
    }
}

UlamDiscretization build_ulam(const IntervalMap& map, const Potential& phi, int k,
                              int quadrature) {
    if (k < 2) throw Error("build_ulam: k must be >= 2");
    if (quadrature < 1) throw Error("build_ulam: quadrature must be >= 1");
    UlamDiscretization disc;
    disc.k = k;
    disc.quadrature = quadrature;
    disc.degree = map.degree();
    disc.matrix = SparseMatrix(k);

    std::vector<std::vector<std::pair<std::int32_t, double>>> columns(static_cast<std::size_t>(k));
    parallel_for(static_cast<std::size_t>(k), [&](std::size_t jz) {
        int j = static_cast<int>(jz);
        std::vector<std::pair<std::int32_t, double>> col;
        for_each_ulam_piece(map, k, j, [&](int b, double plo, double phi_, int target) {
            const Branch& br = map.branches()[static_cast<std::size_t>(b)];
            double w = (phi_ - plo) / quadrature;
            double acc = 0.0;
            for (int m = 0; m < quadrature; ++m) {
                double y = plo + (m + 0.5) * w;
                acc += std::exp(phi(y)) * std::fabs(br.derivative(y)) * w;
            }
            col.emplace_back(target, k * acc);
        });
        columns[jz] = std::move(col);
    });
    for (int j = 0; j < k; ++j)
        for (const auto& [i, v] : columns[static_cast<std::size_t>(j)]) disc.matrix.add(i, j, v);
    disc.matrix.finalize();
    return disc;
}

// --- power iteration --------------------------------------------------------

namespace {

// Strong connectivity plus aperiodicity of the sparsity pattern; a
// non-primitive matrix can make plain power iteration oscillate or settle
// on a component eigenvalue.
bool primitive_structure(const SparseMatrix& A) {
    const int n = A.size();
    std::vector<std::vector<int>> fwd(static_cast<std::size_t>(n)), bwd(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        for (const auto& [i, v] : A.column(j)) {
            fwd[static_cast<std::size_t>(j)].push_back(i);
            bwd[static_cast<std::size_t>(i)].push_back(j);
        }
    auto reaches_all = [n](const std::vector<std::vector<int>>& adj) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int count = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : adj[static_cast<std::size_t>(u)])
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    ++count;
                    q.push(v);
                }
        }
        return count == n;
    };
    if (!reaches_all(fwd) || !reaches_all(bwd)) return false;
    // Period = gcd over edges (u->v) of level[u] + 1 - level[v] on a BFS tree.
    std::vector<int> level(static_cast<std::size_t>(n), -1);
    std::queue<int> q;
    q.push(0);
    level[0] = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v : fwd[static_cast<std::size_t>(u)])
            if (level[static_cast<std::size_t>(v)] < 0) {
                level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
                q.push(v);
            }
    }
    long long g = 0;
    for (int u = 0; u < n; ++u)
        for (int v : fwd[static_cast<std::size_t>(u)]) {
            long long d = level[static_cast<std::size_t>(u)] + 1 - level[static_cast<std::size_t>(v)];
            g = std::gcd(g, std::llabs(d));
        }
    return g == 1;
}

struct EigResult {
    double lambda = 0.0;
    std::vector<double> vec;
    long iterations = 0;
    bool oscillated = false;
};

EigResult dominant_positive_eig(const SparseMatrix& A, bool transpose, double tol,
                                long max_iter) {
    const int n = A.size();
    EigResult r;
    r.vec.assign(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
    std::vector<double> next;
    double lam_prev = 0.0, lam_prev2 = 0.0;
    int osc_count = 0;
    for (long it = 1; it <= max_iter; ++it) {
        if (transpose)
            A.apply_transpose(r.vec, next);
        else
            A.apply(r.vec, next);
        double total = std::accumulate(next.begin(), next.end(), 0.0);
        r.iterations = it;
        if (!(total > 0.0)) {  // nilpotent direction; treat as converged at 0
            r.lambda = 0.0;
            return r;
        }
        double lam = total;  // previous iterate had unit l1 mass
        double vec_change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] /= total;
            vec_change += std::fabs(next[i] - r.vec[i]);
        }
        r.vec.swap(next);
        // The eigenvalue estimate can lock in while the vector is still
        // developing fine structure; require both to settle.
        if (it >= 2 && std::fabs(lam - lam_prev) <= tol * std::fabs(lam) && vec_change <= tol) {
            r.lambda = lam;
            return r;
        }
        if (it >= 3 && std::fabs(lam - lam_prev2) <= tol * std::fabs(lam) &&
            std::fabs(lam - lam_prev) > 1e3 * tol * std::fabs(lam)) {
            if (++osc_count >= 8) {  // period-2 oscillation
                r.lambda = 0.5 * (lam + lam_prev);
                r.oscillated = true;
                return r;
            }
        } else {
            osc_count = 0;
        }
        lam_prev2 = lam_prev;
        lam_prev = lam;
    }
    double res = std::fabs(lam_prev - lam_prev2) / std::max(std::fabs(lam_prev), 1e-300);
    throw NotConverged("power_iterate: no convergence after max_iter", res, max_iter);
}

}  // namespace

SpectralSolution power_iterate(const UlamDiscretization& disc, const PowerIterationOptions& opts) {
    if (!(opts.tol > 0.0)) throw Error("power_iterate: tol must be > 0");
    const SparseMatrix& B = disc.matrix;
    SpectralSolution sol;
    sol.k = disc.k;
    sol.nonprimitive = !primitive_structure(B);

    EigResult right = dominant_positive_eig(B, false, opts.tol, opts.max_iter);
    EigResult left = dominant_positive_eig(B, true, opts.tol, opts.max_iter);
    sol.nonprimitive = sol.nonprimitive || right.oscillated || left.oscillated;
    sol.lambda = right.lambda;
    sol.pressure = std::log(sol.lambda);
    sol.iterations = right.iterations + left.iterations;
    sol.h = std::move(right.vec);
    sol.nu = std::move(left.vec);

    // Residual with h scaled to unit max-norm.
    double hmax = *std::max_element(sol.h.begin(), sol.h.end());
    std::vector<double> bh;
    B.apply(sol.h, bh);
    double res = 0.0;
    for (std::size_t i = 0; i < sol.h.size(); ++i)
        res = std::max(res, std::fabs(bh[i] - sol.lambda * sol.h[i]));
    sol.residual = res / (sol.lambda * std::max(hmax, 1e-300));

    // Gauge: nu is a probability vector, sum_i nu_i h_i = 1, mu = h nu.
    double nu_total = std::accumulate(sol.nu.begin(), sol.nu.end(), 0.0);
    for (double& v : sol.nu) v /= nu_total;
    double pairing = 0.0;
    for (std::size_t i = 0; i < sol.h.size(); ++i) pairing += sol.nu[i] * sol.h[i];
    if (!(pairing > 0.0)) throw Error("power_iterate: degenerate eigenvector pairing");
    for (double& v : sol.h) v /= pairing;
    sol.mu.resize(sol.h.size());
    double mu_total = 0.0;
    for (std::size_t i = 0; i < sol.h.size(); ++i) {
        sol.mu[i] = sol.h[i] * sol.nu[i];
        mu_total += sol.mu[i];
    }
    for (double& v : sol.mu) v /= mu_total;
    return sol;
}

PressureResult pressure(const IntervalMap& map, const Potential& phi, int k, int quadrature) {
    PressureResult result;
    for (int level = 0; level < 3; ++level) {
        int cells = k << level;
        SpectralSolution sol = power_iterate(build_ulam(map, phi, cells, quadrature));
        result.refinement.emplace_back(cells, sol.pressure);
    }
    result.pressure = result.refinement.front().second;
    return result;
}

double pressure_value(const IntervalMap& map, const Potential& phi, int k, int quadrature) {
    return power_iterate(build_ulam(map, phi, k, quadrature)).pressure;
}

EquilibriumMeasure equilibrium_measure(const IntervalMap& map, const SpectralSolution& sol) {
    EquilibriumMeasure em;
    em.weights = sol.mu;
    // Unweighted Ulam transition: mass of C_j flows to C_i in proportion to
    // the Lebesgue fraction of C_j mapping there.
    const int k = sol.k;
    const int q = 16;
    const double cw = 1.0 / static_cast<double>(k);
    std::vector<double> pushed(static_cast<std::size_t>(k), 0.0);
    for (int j = 0; j < k; ++j) {
        double cell_lo = j * cw, cell_hi = (j + 1) * cw;
        double mass = sol.mu[static_cast<std::size_t>(j)];
        for (const Branch& br : map.branches()) {
            double rlo = std::max(br.lo, cell_lo);
            double rhi = std::min(br.hi, cell_hi);
            if (rhi <= rlo + 1e-15) continue;
            double frac = (rhi - rlo) / cw / q;
            for (int m = 0; m < q; ++m) {
                double y = rlo + (m + 0.5) * (rhi - rlo) / q;
                double fy = br.forward(y);
                if (map.metric() == Metric::circle && (fy < 0.0 || fy > 1.0))
                    fy -= std::floor(fy);
                int i = std::clamp(static_cast<int>(std::floor(fy * k)), 0, k - 1);
                pushed[static_cast<std::size_t>(i)] += mass * frac;
            }
        }
    }
    double defect = 0.0;
    for (int i = 0; i < k; ++i)
        defect += std::fabs(pushed[static_cast<std::size_t>(i)] - sol.mu[static_cast<std::size_t>(i)]);
    em.pushforward_defect = defect;
    return em;
}

SpectralBounds check_spectral_bounds(const SpectralSolution& sol, const IntervalMap& map,
                                     const Potential& phi, int resolution, double slack) {
    SupInfEstimate est = sup_inf_estimate(phi, resolution);
    double corr = est.holder_correction(effective_seminorm(phi), phi.alpha);
    SpectralBounds b;
    double deg = static_cast<double>(map.degree());
    b.lower = deg * std::exp(est.inf - corr) * (1.0 - slack);
    b.upper = deg * std::exp(est.sup + corr) * (1.0 + slack);
    b.ok = sol.lambda >= b.lower && sol.lambda <= b.upper;
    return b;
}

// --- Gibbs property ----------------------------------------------------------

double measure_of_interval(const std::vector<double>& nu, int k, double lo, double hi,
                           Metric metric) {
    if (static_cast<int>(nu.size()) != k) throw ShapeMismatch("measure_of_interval: bad weights");
    if (hi < lo) std::swap(lo, hi);
    if (hi - lo >= 1.0) return std::accumulate(nu.begin(), nu.end(), 0.0);
    // Split wrapped pieces on the circle; clamp on the interval.
    std::vector<std::pair<double, double>> pieces;
    if (metric == Metric::circle) {
        double shift = std::floor(lo);
        lo -= shift;
        hi -= shift;
        if (hi <= 1.0)
            pieces.emplace_back(lo, hi);
        else {
            pieces.emplace_back(lo, 1.0);
            pieces.emplace_back(0.0, hi - 1.0);
        }
    } else {
        pieces.emplace_back(std::max(lo, 0.0), std::min(hi, 1.0));
    }
    double total = 0.0;
    double kd = static_cast<double>(k);
    for (auto [plo, phi_] : pieces) {
        if (phi_ <= plo) continue;
        int first = std::clamp(static_cast<int>(std::floor(plo * kd)), 0, k - 1);
        int last = std::clamp(static_cast<int>(std::floor(phi_ * kd)), 0, k - 1);
        for (int i = first; i <= last; ++i) {
            double c_lo = i / kd, c_hi = (i + 1) / kd;
            double ov = std::min(phi_, c_hi) - std::max(plo, c_lo);
            if (ov > 0.0) total += nu[static_cast<std::size_t>(i)] * ov * kd;
        }
    }
    return total;
}

double gibbs_ratio(const IntervalMap& map, const Potential& phi, const SpectralSolution& sol,
                   double x, int n, double eps) {
    auto orbit = map.orbit(x, n + 1);
    auto levels = pullback_dynamic_ball(map, orbit, eps, PullbackMode::strict);
    double nu_dynamic = measure_of_interval(sol.nu, sol.k, levels[0].lo, levels[0].hi, map.metric());
    double fx = orbit[static_cast<std::size_t>(n)];
    double nu_image = measure_of_interval(sol.nu, sol.k, fx - eps, fx + eps, map.metric());
    if (!(nu_dynamic > 0.0) || !(nu_image > 0.0))
        throw Error("gibbs_ratio: ball carries no nu-mass at this resolution");
    double sn = birkhoff_sum(map, phi, x, n);
    return nu_dynamic / (nu_image * std::exp(sn - n * std::log(sol.lambda)));
}

GibbsReport gibbs_check(const IntervalMap& map, const Potential& phi, const SpectralSolution& sol,
                        const GibbsParams& params) {
    GibbsReport rep;
    rep.eps = params.eps;
    rep.c = params.c > 0.0 ? params.c : estimate_c(map, 64, 4000);
    rep.delta1 = delta1_estimate(map, rep.c);
    rep.eps_within_delta1 = rep.delta1 > 0.0 && params.eps <= rep.delta1;
    rep.k_theory = distortion_k_bound(effective_seminorm(phi), phi.alpha, rep.c, params.eps);

    DetRng rng(params.seed);
    const long max_attempts = static_cast<long>(params.trials) * 400;
    long attempts = 0;
    bool found_time = false;
    while (static_cast<int>(rep.samples.size()) < params.trials && attempts < max_attempts) {
        ++attempts;
        double x = rng.uniform();
        OrbitExpansionData data;
        try {
            data = OrbitExpansionData::from_orbit(map, x, params.orbit_cap, rep.c);
        } catch (const BranchBoundary&) {
            continue;
        }
        auto hts = detect_hyperbolic_times(data, HtConvention::inclusive);
        std::vector<int> candidates;
        for (int n : hts)
            if (n >= params.n_min && n <= params.n_max) candidates.push_back(n);
        if (candidates.empty()) continue;
        found_time = true;
        // Prefer the deepest resolvable ball.
        for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
            int n = *it;
            try {
                auto orbit = map.orbit(x, n + 1);
                auto levels = pullback_dynamic_ball(map, orbit, params.eps, PullbackMode::strict);
                if (levels[0].length() * sol.k < params.min_ball_cells) continue;
                double ratio = gibbs_ratio(map, phi, sol, x, n, params.eps);
                rep.samples.push_back({x, n, x, ratio});
                break;
            } catch (const BallEscapesBranch&) {
                continue;
            } catch (const Error&) {
                continue;
            }
        }
    }
    if (rep.samples.empty()) {
        if (!found_time)
            throw NoHyperbolicTimes("gibbs_check: no hyperbolic times up to the orbit cap");
        throw Error("gibbs_check: sampling produced no usable dynamic balls");
    }
    rep.c_lower = std::numeric_limits<double>::infinity();
    rep.c_upper = 0.0;
    for (const auto& s : rep.samples) {
        rep.c_lower = std::min(rep.c_lower, s.ratio);
        rep.c_upper = std::max(rep.c_upper, s.ratio);
    }
    return rep;
}

// --- serialization -----------------------------------------------------------

std::string spectral_solution_to_json(const SpectralSolution& sol) {
    nlohmann::json j;
    j["lambda"] = sol.lambda;
    j["pressure"] = sol.pressure;
    j["residual"] = sol.residual;
    j["iterations"] = sol.iterations;
    j["h"] = sol.h;
    j["nu"] = sol.nu;
    j["mu"] = sol.mu;
    j["nonprimitive"] = sol.nonprimitive;
    j["k"] = sol.k;
    return j.dump(2);
}

void dump_matrix_csv(const UlamDiscretization& disc, std::ostream& os, bool sparse_format) {
    const int k = disc.k;
    if (sparse_format) {
        os << "row,col,value\r\n";
        for (int j = 0; j < k; ++j)
            for (const auto& [i, v] : disc.matrix.column(j))
                os << i << "," << j << "," << format_double(v) << "\r\n";
        return;
    }
    std::vector<std::vector<double>> dense(static_cast<std::size_t>(k),
                                           std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (int j = 0; j < k; ++j)
        for (const auto& [i, v] : disc.matrix.column(j))
            dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (j) os << ",";
            os << format_double(dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        }
        os << "\r\n";
    }
}

}  // namespace eqstab
