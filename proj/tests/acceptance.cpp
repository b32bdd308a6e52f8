// Acceptance suite: one line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "eqstab/hyperbolic_times.hpp"
#include "eqstab/potentials.hpp"
#include "eqstab/relative_pressure.hpp"
#include "eqstab/sampling.hpp"
#include "eqstab/skew_product.hpp"
#include "eqstab/stability.hpp"
#include "eqstab/transfer_operator.hpp"

using namespace eqstab;

namespace {

constexpr double kPi = 3.14159265358979323846;

int failures = 0;

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %-34s %s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// 1. Markov-aligned oracle: pressure log 4 and Bernoulli(1/4,3/4) weights.
void criterion1() {
    Timer timer;
    Potential phi = dyadic_potential(1, {0.0, std::log(3.0)});
    IntervalMap d = doubling_map();
    double worst_p = 0.0, worst_w = 0.0;
    for (int k = 2; k <= 1024; k *= 2) {
        SpectralSolution sol = power_iterate(build_ulam(d, phi, k));
        worst_p = std::max(worst_p, std::fabs(sol.pressure - std::log(4.0)));
        int depth = static_cast<int>(std::lround(std::log2(k)));
        for (int i = 0; i < k; ++i) {
            double expected = 1.0;
            for (int b = depth - 1; b >= 0; --b) expected *= ((i >> b) & 1) ? 0.75 : 0.25;
            worst_w = std::max(worst_w, std::fabs(sol.mu[static_cast<std::size_t>(i)] - expected));
        }
    }
    double secs = timer.seconds();
    bool ok = worst_p <= 1e-10 && worst_w <= 1e-10 && secs < 1.0;
    report(1, "oracle pressure equivalence", ok,
           "|dP|<=" + fmt(worst_p) + " |dw|<=" + fmt(worst_w) + " t=" + fmt(secs) + "s");
}

// 2. Spectral bounds with Holder-corrected brackets, 100 random potentials.
void criterion2() {
    DetRng rng(911);
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        IntervalMap map = trial % 2 == 0 ? doubling_map() : linear_full_map(3);
        double a1 = rng.uniform(-0.5, 0.5), b1 = rng.uniform(-0.5, 0.5);
        double a2 = rng.uniform(-0.25, 0.25), b2 = rng.uniform(-0.25, 0.25);
        double a3 = rng.uniform(-0.1, 0.1);
        Potential phi{[=](double x) {
                          double w = 2.0 * kPi * x;
                          return a1 * std::cos(w) + b1 * std::sin(w) + a2 * std::cos(2 * w) +
                                 b2 * std::sin(2 * w) + a3 * std::cos(3 * w);
                      },
                      1.0, "random-trig",
                      2.0 * kPi * (std::fabs(a1) + std::fabs(b1) + 2 * std::fabs(a2) +
                                   2 * std::fabs(b2) + 3 * std::fabs(a3))};
        SpectralSolution sol = power_iterate(build_ulam(map, phi, 512));
        if (!check_spectral_bounds(sol, map, phi).ok) ++violations;
    }
    report(2, "spectral bounds (100 random)", violations == 0,
           std::to_string(violations) + " violations");
}

// 3. Gibbs property: exact cylinder ratios, then hyperbolic balls on the
// intermittent map against the geometric-series distortion bound.
void criterion3() {
    Timer timer;
    IntervalMap d = doubling_map();
    Potential pc = dyadic_potential(1, {0.2, -0.3});
    SpectralSolution sol = power_iterate(build_ulam(d, pc, 256));
    double worst_aligned = 0.0;
    for (int i = 0; i < 40; ++i) {
        double x = (2.0 * i + 1.0) / 512.0;  // odd/512: aligned at eps=1/32, n=4
        double ratio = gibbs_ratio(d, pc, sol, x, 4, 1.0 / 32.0);
        worst_aligned = std::max(worst_aligned, std::fabs(ratio - 1.0));
    }

    IntervalMap im = intermittent_map(0.5);
    Potential phi = cosine_potential(0.1);
    SpectralSolution isol = power_iterate(build_ulam(im, phi, 4096));
    GibbsParams params;
    params.eps = 1.0 / 64.0;
    params.trials = 100;
    params.n_min = 3;
    params.n_max = 8;
    params.seed = 23;
    GibbsReport rep = gibbs_check(im, phi, isol, params);
    bool in_band = rep.c_lower >= 1.0 / rep.k_theory && rep.c_upper <= rep.k_theory;
    double secs = timer.seconds();
    bool ok = worst_aligned <= 1e-8 && static_cast<int>(rep.samples.size()) == 100 && in_band &&
              secs < 30.0;
    report(3, "gibbs property", ok,
           "|aligned-1|<=" + fmt(worst_aligned) + " band=[" + fmt(rep.c_lower) + "," +
               fmt(rep.c_upper) + "] K=" + fmt(rep.k_theory) + " t=" + fmt(secs) + "s");
}

// 4. O(n) detector vs brute force, 1000 random length-1000 sequences.
void criterion4() {
    Timer timer;
    DetRng rng(4242);
    int mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> a(1000);
        for (double& v : a) v = rng.uniform(-1.5, 0.8);
        auto data = OrbitExpansionData::from_sequence(a, rng.uniform(0.05, 1.0));
        for (auto conv : {HtConvention::inclusive, HtConvention::strict})
            if (detect_hyperbolic_times(data, conv) !=
                detect_hyperbolic_times_bruteforce(data, conv))
                ++mismatches;
    }
    double secs = timer.seconds();
    bool ok = mismatches == 0 && secs < 5.0;
    report(4, "hyperbolic-time detector", ok,
           std::to_string(mismatches) + " mismatches t=" + fmt(secs) + "s");
}

// 5. Sup identity on 50 random reducible SFT models.
void criterion5() {
    DetRng rng(555);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        int q = 3 + static_cast<int>(rng.next_u64() % 4);
        SFTModel m;
        m.alphabet = q;
        m.depth = 1;
        m.potential.resize(static_cast<std::size_t>(q));
        for (double& v : m.potential) v = rng.uniform(-1.0, 1.0);
        int split = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(q - 1));
        m.transition.assign(static_cast<std::size_t>(q),
                            std::vector<int>(static_cast<std::size_t>(q), 0));
        for (int u = 0; u < q; ++u)
            for (int v = 0; v < q; ++v) {
                bool same_block = (u < split) == (v < split);
                if (same_block)
                    m.transition[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] = 1;
                else if (u < split)
                    m.transition[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] =
                        static_cast<int>(rng.next_u64() % 2);
            }
        double full = sft_pressure(m).pressure;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& comp : sft_components(m))
            best = std::max(best, relative_pressure_subsystem(m, comp).pressure);
        worst = std::max(worst, std::fabs(full - best));
    }
    report(5, "relative-pressure sup identity", worst <= 1e-12, "|gap|<=" + fmt(worst));
}

// 6. Openness of certification under sup-norm perturbations.
void criterion6() {
    IntervalMap d = doubling_map();
    Potential phi = cosine_potential(0.25);
    double c = 0.5 * std::log(2.0);
    CertifyParams params;
    params.k = 256;
    params.grid = 2048;
    HyperbolicityCertificate cert = certify_hyperbolic(d, phi, c, params);
    double radius = std::isfinite(cert.margin) ? cert.margin / 4.0 : 0.1;
    DetRng rng(66);
    int fails = 0;
    for (int trial = 0; trial < 20; ++trial) {
        double amp = rng.uniform(-radius, radius);
        int freq = 1 + static_cast<int>(rng.next_u64() % 3);
        Potential psi{[&phi, amp, freq](double x) {
                          return phi(x) + amp * std::cos(2.0 * kPi * freq * x);
                      },
                      1.0, "perturbed",
                      (phi.declared_seminorm ? *phi.declared_seminorm : 2.0 * kPi) +
                          std::fabs(amp) * 2.0 * kPi * freq};
        HyperbolicityCertificate again = certify_hyperbolic(d, psi, c, params);
        if (!(again.passes && again.margin > 0.0)) ++fails;
    }
    bool ok = cert.passes && fails == 0;
    report(6, "certification openness", ok,
           std::to_string(fails) + " failures radius=" + fmt(radius));
}

// 7. Pressure continuity along both sweep families.
void criterion7() {
    Timer timer;
    SweepConfig cfg;
    cfg.family = family_potential_scale();
    for (int i = 0; i <= 10; ++i) cfg.t_grid.push_back(0.05 * i);
    cfg.k = 512;
    SweepResult potential_sweep = run_sweep(cfg);
    bool lipschitz = true;
    for (const auto& p : potential_sweep.pairs)
        if (!(p.valid && p.dp <= p.dt + 1e-3)) lipschitz = false;

    SweepConfig icfg;
    icfg.family = family_intermittent_alpha();
    for (int i = 1; i <= 9; ++i) icfg.t_grid.push_back(0.1 * i);
    icfg.k = 4096;
    icfg.certify = CertifyPolicy::off;  // certification is measured separately
    SweepResult alpha_sweep = run_sweep(icfg);
    double worst = 0.0;
    bool solved = true;
    for (const auto& r : alpha_sweep.records) {
        if (!r.error.empty()) solved = false;
        worst = std::max(worst, std::fabs(r.pressure - std::log(2.0)));
    }
    double secs = timer.seconds();
    bool ok = lipschitz && solved && worst <= 5e-3 && secs < 120.0;
    report(7, "pressure continuity", ok,
           "lipschitz=" + std::string(lipschitz ? "yes" : "no") + " |P-log2|<=" + fmt(worst) +
               " t=" + fmt(secs) + "s");
}

// 8. Halving the t-step moves the max adjacent weak-* distance by a factor
// in [1/2, 8] for both proxies.
void criterion8() {
    auto max_distance = [](double step, WeakStarMode mode) {
        SweepConfig cfg;
        cfg.family = family_potential_scale();
        for (double t = 0.0; t <= 0.5 + 1e-12; t += step) cfg.t_grid.push_back(t);
        cfg.k = 512;
        SweepResult r = run_sweep(cfg);
        double worst = 0.0;
        for (const auto& p : r.pairs)
            worst = std::max(worst, mode == WeakStarMode::fourier ? p.fourier_distance
                                                                  : p.wasserstein_distance);
        return worst;
    };
    double rf = max_distance(0.05, WeakStarMode::fourier) /
                max_distance(0.025, WeakStarMode::fourier);
    double rw = max_distance(0.05, WeakStarMode::wasserstein) /
                max_distance(0.025, WeakStarMode::wasserstein);
    bool ok = rf >= 0.5 && rf <= 8.0 && rw >= 0.5 && rw <= 8.0;
    report(8, "equilibrium stability (halving)", ok,
           "fourier ratio=" + fmt(rf) + " wasserstein ratio=" + fmt(rw));
}

// 9. Skew-product reduction: homology residual, pressure equality with one
// monotone refinement, exact lifted projection.
void criterion9() {
    Timer timer;
    SkewSystem sys = solenoid_skew(0.3);
    ProductPotential phi;
    phi.eval = [](double x, double y) { return std::cos(2.0 * kPi * x) / 5.0 + y / 5.0; };
    phi.alpha = 1.0;
    phi.holder_const = 2.0 * kPi / 5.0 + 0.2;
    phi.label = "cos/5+y/5";

    SkewCheckParams params;
    params.k = 1024;
    SkewPressureReport rep = skew_pressure_check(sys, phi, params);

    SkewCheckParams fine = params;
    fine.k = 2048;
    SkewPressureReport rep2 = skew_pressure_check(sys, phi, fine);

    auto orbit = sys.base().orbit(0.3141, 2000);
    auto lifted = lift_measure(sys, orbit, 40);
    bool projection_exact = lifted.size() == orbit.size() - 40;
    for (std::size_t i = 0; i < lifted.size(); ++i)
        if (lifted[i].x != orbit[i + 40]) projection_exact = false;

    double secs = timer.seconds();
    bool ok = rep.homology_residual_max <= 2.0 * rep.tail_bound && rep.diff <= 2e-3 &&
              rep2.diff <= rep.diff && projection_exact && secs < 60.0;
    report(9, "skew reduction", ok,
           "residual=" + fmt(rep.homology_residual_max) + " diff=" + fmt(rep.diff) +
               " refined=" + fmt(rep2.diff) + " t=" + fmt(secs) + "s");
}

// 10. Byte-identical CSV/JSON on rerun with an identical config.
void criterion10() {
    namespace fs = std::filesystem;
    SweepConfig cfg;
    cfg.family = family_potential_scale();
    for (int i = 0; i <= 6; ++i) cfg.t_grid.push_back(0.05 * i);
    cfg.k = 128;
    fs::path dir = fs::temp_directory_path() / "eqstab_acceptance_det";
    fs::create_directories(dir);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    };
    EmitPaths paths{(dir / "sweep.csv").string(), (dir / "sweep.json").string(), "", ""};
    emit(run_sweep(cfg), paths);
    std::string csv1 = slurp(paths.csv), json1 = slurp(paths.json);
    emit(run_sweep(cfg), paths);
    bool sweep_same = csv1 == slurp(paths.csv) && json1 == slurp(paths.json);

    IntervalMap d = doubling_map();
    Potential phi = cosine_potential(0.2);
    std::string sol1 = spectral_solution_to_json(power_iterate(build_ulam(d, phi, 128)));
    std::string sol2 = spectral_solution_to_json(power_iterate(build_ulam(d, phi, 128)));
    std::ostringstream m1, m2;
    dump_matrix_csv(build_ulam(d, phi, 32), m1, true);
    dump_matrix_csv(build_ulam(d, phi, 32), m2, true);
    bool solution_same = sol1 == sol2 && m1.str() == m2.str();
    fs::remove_all(dir);
    bool ok = sweep_same && solution_same;
    report(10, "determinism", ok,
           std::string(sweep_same ? "sweep ok" : "sweep differs") + ", " +
               (solution_same ? "solution ok" : "solution differs"));
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    if (failures == 0)
        std::printf("all criteria passed\n");
    else
        std::printf("%d criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
