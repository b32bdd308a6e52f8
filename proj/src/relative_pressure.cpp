#include "eqstab/relative_pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stack>

#include <json.hpp>

#include "eqstab/hyperbolic_times.hpp"
#include "eqstab/parallel.hpp"
#include "eqstab/sampling.hpp"
#include "eqstab/transfer_operator.hpp"

namespace eqstab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

// --- SFT machinery ---------------------------------------------------------

double SFTModel::word_value(const std::vector<int>& word) const {
    std::size_t idx = 0;
    for (int s : word) idx = idx * static_cast<std::size_t>(alphabet) + static_cast<std::size_t>(s);
    return potential[idx];
}

bool SFTModel::word_admissible(const std::vector<int>& word) const {
    for (std::size_t i = 0; i + 1 < word.size(); ++i)
        if (!transition[static_cast<std::size_t>(word[i])][static_cast<std::size_t>(word[i + 1])])
            return false;
    return true;
}

SFTModel SFTModel::full_shift(int alphabet, std::vector<double> symbol_values) {
    SFTModel m;
    m.alphabet = alphabet;
    m.depth = 1;
    m.transition.assign(static_cast<std::size_t>(alphabet),
                        std::vector<int>(static_cast<std::size_t>(alphabet), 1));
    m.potential = std::move(symbol_values);
    if (m.potential.size() != static_cast<std::size_t>(alphabet))
        throw ConfigError("full_shift: one value per symbol required");
    return m;
}

namespace {

// Weighted word-level transition graph of an SFT restricted to a symbol set.
struct WordGraph {
    std::vector<std::vector<int>> words;           // admissible depth-m words
    std::vector<std::vector<int>> succ;            // edges u -> v
    std::vector<double> weight;                    // e^{phi(word_u)}
};

WordGraph build_word_graph(const SFTModel& model, const std::vector<int>& allowed) {
    if (model.alphabet < 1 || model.depth < 1) throw ConfigError("SFTModel: bad dimensions");
    std::size_t expect = 1;
    for (int i = 0; i < model.depth; ++i) expect *= static_cast<std::size_t>(model.alphabet);
    if (model.potential.size() != expect)
        throw ConfigError("SFTModel: potential table must have alphabet^depth entries");

    std::vector<char> in_allowed(static_cast<std::size_t>(model.alphabet), 0);
    for (int s : allowed) in_allowed[static_cast<std::size_t>(s)] = 1;

    WordGraph g;
    // enumerate admissible words over the allowed symbols
    std::vector<int> word(static_cast<std::size_t>(model.depth), 0);
    std::vector<long> index_of(expect, -1);
    while (true) {
        bool ok = true;
        for (int s : word)
            if (!in_allowed[static_cast<std::size_t>(s)]) ok = false;
        if (ok && model.word_admissible(word)) {
            std::size_t idx = 0;
            for (int s : word)
                idx = idx * static_cast<std::size_t>(model.alphabet) + static_cast<std::size_t>(s);
            index_of[idx] = static_cast<long>(g.words.size());
            g.words.push_back(word);
            g.weight.push_back(std::exp(model.potential[idx]));
        }
        int pos = model.depth - 1;
        while (pos >= 0 && word[static_cast<std::size_t>(pos)] == model.alphabet - 1)
            word[static_cast<std::size_t>(pos--)] = 0;
        if (pos < 0) break;
        ++word[static_cast<std::size_t>(pos)];
    }
    g.succ.resize(g.words.size());
    for (std::size_t u = 0; u < g.words.size(); ++u) {
        const auto& w = g.words[u];
        int last = w[static_cast<std::size_t>(model.depth - 1)];
        for (int s = 0; s < model.alphabet; ++s) {
            if (!in_allowed[static_cast<std::size_t>(s)]) continue;
            if (!model.transition[static_cast<std::size_t>(last)][static_cast<std::size_t>(s)])
                continue;
            std::vector<int> next(w.begin() + 1, w.end());
            next.push_back(s);
            std::size_t idx = 0;
            for (int t : next)
                idx = idx * static_cast<std::size_t>(model.alphabet) + static_cast<std::size_t>(t);
            long v = index_of[idx];
            if (v >= 0) g.succ[u].push_back(static_cast<int>(v));
        }
    }
    return g;
}

// Kosaraju strongly connected components, iterative.
std::vector<std::vector<int>> strong_components(const std::vector<std::vector<int>>& succ) {
    const int n = static_cast<int>(succ.size());
    std::vector<std::vector<int>> pred(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u)
        for (int v : succ[static_cast<std::size_t>(u)]) pred[static_cast<std::size_t>(v)].push_back(u);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    for (int start = 0; start < n; ++start) {
        if (seen[static_cast<std::size_t>(start)]) continue;
        std::stack<std::pair<int, std::size_t>> st;
        st.push({start, 0});
        seen[static_cast<std::size_t>(start)] = 1;
        while (!st.empty()) {
            auto& [u, i] = st.top();
            if (i < succ[static_cast<std::size_t>(u)].size()) {
                int v = succ[static_cast<std::size_t>(u)][i++];
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    st.push({v, 0});
                }
            } else {
                order.push_back(u);
                st.pop();
            }
        }
    }
    std::vector<std::vector<int>> comps;
    std::vector<char> taken(static_cast<std::size_t>(n), 0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (taken[static_cast<std::size_t>(*it)]) continue;
        std::vector<int> comp;
        std::stack<int> st;
        st.push(*it);
        taken[static_cast<std::size_t>(*it)] = 1;
        while (!st.empty()) {
            int u = st.top();
            st.pop();
            comp.push_back(u);
            for (int v : pred[static_cast<std::size_t>(u)])
                if (!taken[static_cast<std::size_t>(v)]) {
                    taken[static_cast<std::size_t>(v)] = 1;
                    st.push(v);
                }
        }
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
    }
    return comps;
}

// Perron value of the weighted subgraph restricted to one component, via
// power iteration on M + I (primitive for an irreducible component, so the
// iteration cannot cycle).
double component_spectral_radius(const WordGraph& g, const std::vector<int>& comp) {
    const int n = static_cast<int>(comp.size());
    std::vector<int> local(g.words.size(), -1);
    for (int i = 0; i < n; ++i) local[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])] = i;
    bool has_edge = false;
    std::vector<std::vector<int>> succ(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int u = comp[static_cast<std::size_t>(i)];
        for (int v : g.succ[static_cast<std::size_t>(u)]) {
            int lv = local[static_cast<std::size_t>(v)];
            if (lv >= 0) {
                succ[static_cast<std::size_t>(i)].push_back(lv);
                has_edge = true;
            }
        }
    }
    if (!has_edge) return 0.0;  // isolated state without a self-loop
    std::vector<double> x(static_cast<std::size_t>(n), 1.0 / n), y(static_cast<std::size_t>(n));
    double lam = 0.0, lam_prev = -1.0;
    for (long it = 0; it < 200000; ++it) {
        for (int i = 0; i < n; ++i) {
            int u = comp[static_cast<std::size_t>(i)];
            double acc = x[static_cast<std::size_t>(i)];  // the +I shift
            for (int lv : succ[static_cast<std::size_t>(i)])
                acc += g.weight[static_cast<std::size_t>(u)] * x[static_cast<std::size_t>(lv)];
            y[static_cast<std::size_t>(i)] = acc;
        }
        double total = std::accumulate(y.begin(), y.end(), 0.0);
        lam = total;
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] / total;
        if (it > 2 && std::fabs(lam - lam_prev) <= 1e-15 * std::fabs(lam)) break;
        lam_prev = lam;
    }
    return lam - 1.0;
}

SftPressureResult pressure_of_graph(const WordGraph& g) {
    SftPressureResult r;
    if (g.words.empty()) {
        r.pressure = kNegInf;
        r.empty = true;
        return r;
    }
    auto comps = strong_components(g.succ);
    double best = 0.0;
    bool any = false;
    for (const auto& comp : comps) {
        double rho = component_spectral_radius(g, comp);
        if (rho > 0.0) {
            best = any ? std::max(best, rho) : rho;
            any = true;
        }
    }
    r.reducible = comps.size() != 1;
    if (!any) {
        r.pressure = kNegInf;
        r.empty = true;
        return r;
    }
    r.pressure = std::log(best);
    return r;
}

std::vector<int> all_symbols(const SFTModel& model) {
    std::vector<int> s(static_cast<std::size_t>(model.alphabet));
    std::iota(s.begin(), s.end(), 0);
    return s;
}

}  // namespace

SftPressureResult sft_pressure(const SFTModel& model) {
    return pressure_of_graph(build_word_graph(model, all_symbols(model)));
}

SftPressureResult relative_pressure_subsystem(const SFTModel& model,
                                              const std::vector<int>& allowed) {
    if (allowed.empty()) throw ConfigError("relative_pressure_subsystem: empty symbol set");
    return pressure_of_graph(build_word_graph(model, allowed));
}

SftPressureResult relative_pressure_complement(const SFTModel& model,
                                               const std::vector<int>& allowed) {
    WordGraph g = build_word_graph(model, all_symbols(model));
    std::vector<char> in_allowed(static_cast<std::size_t>(model.alphabet), 0);
    for (int s : allowed) in_allowed[static_cast<std::size_t>(s)] = 1;
    auto comps = strong_components(g.succ);
    SftPressureResult r;
    r.reducible = comps.size() != 1;
    double best = 0.0;
    bool any = false;
    for (const auto& comp : comps) {
        bool touches_complement = false;
        for (int u : comp)
            for (int s : g.words[static_cast<std::size_t>(u)])
                if (!in_allowed[static_cast<std::size_t>(s)]) touches_complement = true;
        if (!touches_complement) continue;
        double rho = component_spectral_radius(g, comp);
        if (rho > 0.0) {
            best = any ? std::max(best, rho) : rho;
            any = true;
        }
    }
    if (!any) {
        r.pressure = kNegInf;
        r.empty = true;
        return r;
    }
    r.pressure = std::log(best);
    return r;
}

std::vector<std::vector<int>> sft_components(const SFTModel& model) {
    SFTModel depth1 = model;
    depth1.depth = 1;
    depth1.potential.assign(static_cast<std::size_t>(model.alphabet), 0.0);
    WordGraph g = build_word_graph(depth1, all_symbols(model));
    auto comps = strong_components(g.succ);
    std::vector<std::vector<int>> out;
    for (auto& comp : comps) {
        std::vector<int> symbols;
        for (int u : comp) symbols.push_back(g.words[static_cast<std::size_t>(u)][0]);
        std::sort(symbols.begin(), symbols.end());
        out.push_back(std::move(symbols));
    }
    return out;
}

// --- cover estimates ---------------------------------------------------------

CoverEstimate cover_pressure_estimate(const IntervalMap& map, const Potential& phi,
                                      const std::function<bool(double)>& region_indicator,
                                      const CoverParams& params) {
    const int grid = params.region_grid;
    const double spacing = 1.0 / static_cast<double>(grid);
    std::vector<int> region;
    for (int i = 0; i < grid; ++i) {
        double x = (i + 0.5) * spacing;
        if (region_indicator(x)) region.push_back(i);
    }
    CoverEstimate est;
    if (region.empty()) {
        est.pressure = kNegInf;
        est.region_empty = true;
        return est;
    }
    double region_measure = static_cast<double>(region.size()) * spacing;
    est.threshold = std::max(1.0, region_measure / (2.0 * params.delta));

    std::vector<double> gammas = params.gamma_grid;
    if (gammas.empty())
        for (int i = 0; i < 75; ++i) gammas.push_back(0.01 + 0.02 * i);
    std::sort(gammas.begin(), gammas.end());

    const double seminorm = effective_seminorm(phi);
    const double holder_step = seminorm * std::pow(2.0 * params.delta, phi.alpha);

    std::vector<int> depth_candidates;
    for (int n = params.min_depth; n <= params.max_depth; n += 4) depth_candidates.push_back(n);

    // One greedy cover per gamma; depth chosen per ball to minimize the
    // charged weight per newly covered point.
    struct GammaOutcome {
        double sum = 0.0;
        int balls = 0;
        bool complete = false;
    };
    std::vector<GammaOutcome> outcomes(gammas.size());

    parallel_for(gammas.size(), [&](std::size_t gi) {
        double gamma = gammas[gi];
        std::vector<char> covered(region.size(), 0);
        std::size_t cursor = 0;
        double sum = 0.0;
        int balls = 0;
        const int ball_cap = grid * 10;
        while (balls < ball_cap) {
            while (cursor < region.size() && covered[cursor]) ++cursor;
            if (cursor >= region.size()) break;
            double x = (region[cursor] + 0.5) * spacing;
            auto orbit = map.orbit(x, params.max_depth + 1);
            double best_score = std::numeric_limits<double>::infinity();
            double best_charge = 0.0;
            BallLevel best_ball{x, x};
            for (int n : depth_candidates) {
                std::vector<double> prefix(orbit.begin(), orbit.begin() + n + 1);
                auto levels = pullback_dynamic_ball(map, prefix, params.delta, PullbackMode::clip);
                const BallLevel& ball = levels[0];
                double len = std::max(ball.length(), 1e-300);
                // sup of S_n phi over the ball: probe points plus modulus term
                double sup_sn = -std::numeric_limits<double>::infinity();
                for (int p = 0; p < params.probes_per_ball; ++p) {
                    double y = ball.lo + weyl_point(static_cast<std::size_t>(p), 0.3) * ball.length();
                    sup_sn = std::max(sup_sn, birkhoff_sum(map, phi, y, n));
                }
                sup_sn += holder_step * n;
                double weight = std::exp(-gamma * n + sup_sn);
                // A ball shorter than one grid cell must be charged with the
                // multiplicity needed to tile the cell it represents.
                double charge = weight * std::max(1.0, spacing / len);
                int newly = 0;
                if (len >= spacing) {
                    for (std::size_t r = cursor; r < region.size(); ++r) {
                        if (covered[r]) continue;
                        double cx = (region[r] + 0.5) * spacing;
                        if (cx >= ball.lo && cx <= ball.hi) ++newly;
                        if (cx > ball.hi) break;
                    }
                }
                newly = std::max(newly, 1);
                double score = charge / newly;
                if (score < best_score) {
                    best_score = score;
                    best_charge = charge;
                    best_ball = ball;
                }
            }
            // mark everything inside the chosen ball
            covered[cursor] = 1;
            for (std::size_t r = cursor; r < region.size(); ++r) {
                double cx = (region[r] + 0.5) * spacing;
                if (cx >= best_ball.lo && cx <= best_ball.hi) covered[r] = 1;
                if (cx > best_ball.hi) break;
            }
            sum += best_charge;
            ++balls;
        }
        bool complete = true;
        for (char c : covered)
            if (!c) complete = false;
        outcomes[gi] = {sum, balls, complete};
    });

    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        if (!outcomes[gi].complete)
            throw CoverIncomplete("cover_pressure_estimate: greedy cover did not exhaust the region");
        if (outcomes[gi].sum <= est.threshold) {
            est.pressure = gammas[gi];
            est.balls_used = outcomes[gi].balls;
            return est;
        }
    }
    est.pressure = std::numeric_limits<double>::infinity();  // no gamma qualified
    return est;
}

// --- certification ------------------------------------------------------------

HyperbolicityCertificate certify_hyperbolic(const IntervalMap& map, const Potential& phi,
                                            double c, const CertifyParams& params) {
    if (!(c > 0.0)) throw Error("certify_hyperbolic: c must be > 0");
    HyperbolicityCertificate cert;
    cert.c = c;
    cert.params = params;
    cert.p_total = pressure_value(map, phi, params.k);

    // Bad region: grid points whose finite-time expansion statistic fails -c.
    const int grid = params.grid;
    std::vector<char> bad(static_cast<std::size_t>(grid), 0);
    bool any_bad = false;
    for (int i = 0; i < grid; ++i) {
        double x = (i + 0.5) / static_cast<double>(grid);
        double stat;
        try {
            auto data = OrbitExpansionData::from_orbit(map, x, params.horizon, c);
            stat = nue_statistic(data, params.horizon);
        } catch (const BranchBoundary&) {
            stat = 0.0;  // orbit touched a partition endpoint; treat as bad
        }
        if (stat > -c) {
            bad[static_cast<std::size_t>(i)] = 1;
            any_bad = true;
        }
    }
    if (!any_bad) {
        cert.bad_region_empty = true;
        cert.p_bad = kNegInf;
        cert.margin = std::numeric_limits<double>::infinity();
        cert.zeta = std::numeric_limits<double>::infinity();
        cert.passes = true;
        return cert;
    }
    CoverParams cover = params.cover;
    cover.region_grid = grid;
    if (cover.gamma_grid.empty()) {
        // span past the total pressure so a bad region carrying full
        // pressure still crosses the threshold inside the grid
        double top = std::max(1.5, cert.p_total + 0.3);
        for (double g = 0.01; g <= top; g += 0.02) cover.gamma_grid.push_back(g);
    }
    auto indicator = [&bad, grid](double x) {
        int i = std::clamp(static_cast<int>(std::floor(x * grid)), 0, grid - 1);
        return bad[static_cast<std::size_t>(i)] != 0;
    };
    CoverEstimate bad_est = cover_pressure_estimate(map, phi, indicator, cover);
    cert.p_bad = bad_est.pressure;
    cert.margin = cert.p_total - cert.p_bad;
    cert.zeta = 0.5 * cert.margin;
    cert.passes = cert.margin > 0.0;
    return cert;
}

std::string certificate_to_json(const HyperbolicityCertificate& cert) {
    nlohmann::json j;
    auto finite_or_sentinel = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) return v;
        return v > 0 ? "+inf" : "-inf";
    };
    j["P_total"] = cert.p_total;
    j["P_bad"] = finite_or_sentinel(cert.p_bad);
    j["margin"] = finite_or_sentinel(cert.margin);
    j["zeta"] = finite_or_sentinel(cert.zeta);
    j["c"] = cert.c;
    j["passes"] = cert.passes;
    j["bad_region_empty"] = cert.bad_region_empty;
    j["heuristic"] = cert.heuristic;
    j["params"]["k"] = cert.params.k;
    j["params"]["horizon"] = cert.params.horizon;
    j["params"]["grid"] = cert.params.grid;
    j["params"]["delta"] = cert.params.cover.delta;
    j["params"]["min_depth"] = cert.params.cover.min_depth;
    j["params"]["max_depth"] = cert.params.cover.max_depth;
    return j.dump(2);
}

}  // namespace eqstab
