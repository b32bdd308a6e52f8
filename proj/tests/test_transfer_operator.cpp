#include <doctest.h>

#include <cmath>
#include <sstream>

#include "eqstab/hyperbolic_times.hpp"
#include "eqstab/sampling.hpp"
#include "eqstab/transfer_operator.hpp"

using namespace eqstab;

namespace {

// independent 2x2 dominant-eigenvalue oracle
double spectral_radius_2x2(double a, double b, double c, double d) {
    double tr = a + d, det = a * d - b * c;
    return 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
}

}  // namespace

TEST_CASE("pointwise transfer operator") {
    IntervalMap d = doubling_map();
    Potential zero = constant_potential(0.0);
    auto one = [](double) { return 1.0; };
    CHECK(apply_pointwise(d, zero, one, 0.37) == doctest::Approx(2.0).epsilon(1e-14));

    double a = 0.3, b = -0.8;
    Potential pc = dyadic_potential(1, {a, b});
    CHECK(apply_pointwise(d, pc, one, 0.61) ==
          doctest::Approx(std::exp(a) + std::exp(b)).epsilon(1e-14));

    auto ident = [](double y) { return y; };
    CHECK(apply_pointwise(d, zero, ident, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ulam matrix on Markov-aligned data") {
    IntervalMap d = doubling_map();
    SUBCASE("doubling with zero potential at k = 2 is all ones") {
        UlamDiscretization disc = build_ulam(d, constant_potential(0.0), 2);
        for (int j = 0; j < 2; ++j) {
            REQUIRE(disc.matrix.column(j).size() == 2);
            for (const auto& [i, v] : disc.matrix.column(j))
                CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
        }
        SpectralSolution sol = power_iterate(disc);
        CHECK(sol.lambda == doctest::Approx(2.0).epsilon(1e-13));
    }
    SUBCASE("weighted doubling matches the 2x2 oracle") {
        double a = 0.4, b = std::log(3.0);
        UlamDiscretization disc = build_ulam(d, dyadic_potential(1, {a, b}), 2);
        SpectralSolution sol = power_iterate(disc);
        double oracle = spectral_radius_2x2(std::exp(a), std::exp(b), std::exp(a), std::exp(b));
        CHECK(sol.lambda == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(sol.lambda == doctest::Approx(std::exp(a) + std::exp(b)).epsilon(1e-12));
    }
    SUBCASE("slope-3 map at k = 3 is all ones") {
        UlamDiscretization disc = build_ulam(linear_full_map(3), constant_potential(0.0), 3);
        for (int j = 0; j < 3; ++j)
            for (const auto& [i, v] : disc.matrix.column(j))
                CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(power_iterate(disc).lambda == doctest::Approx(3.0).epsilon(1e-13));
    }
}

TEST_CASE("power iteration eigendata and gauge") {
    IntervalMap d = doubling_map();
    double b = std::log(3.0);
    SpectralSolution sol = power_iterate(build_ulam(d, dyadic_potential(1, {0.0, b}), 2));
    CHECK(sol.lambda == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(sol.pressure == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    // nu = (1/4, 3/4), h uniform, mu = h nu
    CHECK(sol.nu[0] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(sol.nu[1] == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(sol.mu[0] == doctest::Approx(0.25).epsilon(1e-10));
    double gauge = sol.nu[0] * sol.h[0] + sol.nu[1] * sol.h[1];
    CHECK(gauge == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sol.residual <= 1e-10);
    CHECK_FALSE(sol.nonprimitive);
}

TEST_CASE("column sums stay inside the degree-weighted potential bracket") {
    IntervalMap maps[] = {doubling_map(), linear_full_map(3)};
    Potential phi = cosine_potential(0.3);
    SupInfEstimate est = sup_inf_estimate(phi, 2048);
    double corr = est.holder_correction(effective_seminorm(phi), 1.0);
    for (const IntervalMap& map : maps) {
        UlamDiscretization disc = build_ulam(map, phi, 64);
        double lo = map.degree() * std::exp(est.inf - corr);
        double hi = map.degree() * std::exp(est.sup + corr);
        for (int j = 0; j < disc.k; ++j) {
            double s = disc.matrix.column_sum(j);
            CHECK(s >= lo - 1e-12);
            CHECK(s <= hi + 1e-12);
        }
    }
}

TEST_CASE("power iteration throws NotConverged when starved of iterations") {
    IntervalMap d = doubling_map();
    PowerIterationOptions opts;
    opts.max_iter = 2;  // the Bernoulli structure needs log2(k) iterations
    UlamDiscretization disc = build_ulam(d, dyadic_potential(1, {0.0, std::log(3.0)}), 64);
    CHECK_THROWS_AS(power_iterate(disc, opts), NotConverged);
}

TEST_CASE("identity matrix flags the nonprimitive path") {
    UlamDiscretization disc;
    disc.k = 2;
    disc.quadrature = 1;
    disc.degree = 1;
    disc.matrix = SparseMatrix(2);
    disc.matrix.add(0, 0, 1.0);
    disc.matrix.add(1, 1, 1.0);
    disc.matrix.finalize();
    SpectralSolution sol = power_iterate(disc);
    CHECK(sol.lambda == doctest::Approx(1.0));
    CHECK(sol.nonprimitive);
}

TEST_CASE("pressure values and refinement") {
    IntervalMap d = doubling_map();
    SUBCASE("zero potential gives log 2 at every resolution") {
        PressureResult pr = pressure(d, constant_potential(0.0), 16);
        CHECK(pr.pressure == doctest::Approx(std::log(2.0)).epsilon(1e-12));
        for (const auto& [cells, p] : pr.refinement)
            CHECK(p == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    }
    SUBCASE("constants shift pressure additively") {
        double c = 0.37;
        CHECK(pressure_value(d, constant_potential(c), 64) ==
              doctest::Approx(std::log(2.0) + c).epsilon(1e-12));
    }
    SUBCASE("intermittent entropy is log 2") {
        CHECK(pressure_value(intermittent_map(0.5), constant_potential(0.0), 1024) ==
              doctest::Approx(std::log(2.0)).epsilon(5e-3));
    }
}

TEST_CASE("oracle equivalence for Markov-aligned piecewise-linear maps") {
    // k = 4 cells on doubling with a depth-2 dyadic potential: the exact
    // weighted transition matrix has entries e^{phi_j} wherever f(C_j)
    // covers C_i
    IntervalMap d = doubling_map();
    std::vector<double> vals = {0.2, -0.4, 0.7, 0.1};
    UlamDiscretization disc = build_ulam(d, dyadic_potential(2, vals), 4);
    for (int j = 0; j < 4; ++j) {
        REQUIRE(disc.matrix.column(j).size() == 2);
        for (const auto& [i, v] : disc.matrix.column(j)) {
            CHECK(v == doctest::Approx(std::exp(vals[static_cast<std::size_t>(j)])).epsilon(1e-13));
            // f(C_j) covers cells 2j mod 4 and 2j+1 mod 4
            bool covered = (i == (2 * j) % 4) || (i == (2 * j + 1) % 4);
            CHECK(covered);
        }
    }
    // dominant eigenvalue of the exact matrix by dense power iteration
    double m[4][4] = {};
    for (int j = 0; j < 4; ++j)
        for (const auto& [i, v] : disc.matrix.column(j)) m[i][j] = std::exp(vals[static_cast<std::size_t>(j)]);
    double x[4] = {1, 1, 1, 1}, lam = 0.0;
    for (int it = 0; it < 20000; ++it) {
        double y[4] = {};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) y[i] += m[i][j] * x[j];
        lam = y[0] + y[1] + y[2] + y[3];
        for (int i = 0; i < 4; ++i) x[i] = y[i] / lam;
    }
    CHECK(power_iterate(disc).pressure == doctest::Approx(std::log(lam)).epsilon(1e-10));
}

TEST_CASE("oracle equivalence on a mixed-slope Markov map") {
    // degree-3 full-branch map with slopes (2, 4, 4): cell boundaries at
    // k = 4 map onto cell boundaries, so the exact weighted transition
    // matrix has entries e^{phi_j} wherever f(C_j) covers C_i
    std::vector<Branch> br(3);
    br[0] = Branch{0.0, 0.5, [](double x) { return 2.0 * x; }, [](double) { return 2.0; },
                   [](double v) { return 0.5 * v; }};
    br[1] = Branch{0.5, 0.75, [](double x) { return 4.0 * (x - 0.5); },
                   [](double) { return 4.0; }, [](double v) { return 0.5 + 0.25 * v; }};
    br[2] = Branch{0.75, 1.0, [](double x) { return 4.0 * (x - 0.75); },
                   [](double) { return 4.0; }, [](double v) { return 0.75 + 0.25 * v; }};
    IntervalMap map("mixed244", Metric::circle, 3, std::move(br));

    DetRng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> vals(4);
        for (double& v : vals) v = rng.uniform(-0.8, 0.8);
        UlamDiscretization disc = build_ulam(map, dyadic_potential(2, vals), 4);
        double m[4][4] = {};
        for (int j = 0; j < 4; ++j)
            for (const auto& [i, v] : disc.matrix.column(j)) {
                CHECK(v == doctest::Approx(std::exp(vals[static_cast<std::size_t>(j)])).epsilon(1e-12));
                m[i][j] = std::exp(vals[static_cast<std::size_t>(j)]);
            }
        double x[4] = {1, 1, 1, 1}, lam = 0.0;
        for (int it = 0; it < 40000; ++it) {
            double y[4] = {};
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) y[i] += m[i][j] * x[j];
            lam = y[0] + y[1] + y[2] + y[3];
            for (int i = 0; i < 4; ++i) x[i] = y[i] / lam;
        }
        CHECK(power_iterate(disc).pressure == doctest::Approx(std::log(lam)).epsilon(1e-10));
    }
}

TEST_CASE("spectral bounds hold with Holder-corrected brackets") {
    DetRng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        IntervalMap map = trial % 2 == 0 ? doubling_map() : linear_full_map(3);
        // random low-mode trigonometric potential
        double a1 = rng.uniform(-0.4, 0.4), b1 = rng.uniform(-0.4, 0.4);
        double a2 = rng.uniform(-0.2, 0.2), b2 = rng.uniform(-0.2, 0.2);
        Potential phi{[a1, b1, a2, b2](double x) {
                          double w = 2.0 * 3.14159265358979323846 * x;
                          return a1 * std::cos(w) + b1 * std::sin(w) + a2 * std::cos(2 * w) +
                                 b2 * std::sin(2 * w);
                      },
                      1.0, "random-trig",
                      2.0 * 3.14159265358979323846 *
                          (std::fabs(a1) + std::fabs(b1) + 2 * std::fabs(a2) + 2 * std::fabs(b2))};
        SpectralSolution sol = power_iterate(build_ulam(map, phi, 256));
        SpectralBounds bounds = check_spectral_bounds(sol, map, phi);
        CHECK(bounds.ok);
    }
}

TEST_CASE("duality identity of left and right eigendata") {
    IntervalMap d = doubling_map();
    Potential phi = cosine_potential(0.3);
    SpectralSolution sol = power_iterate(build_ulam(d, phi, 128));
    std::vector<double> bh;
    build_ulam(d, phi, 128).matrix.apply(sol.h, bh);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < bh.size(); ++i) {
        lhs += bh[i] * sol.nu[i];
        rhs += sol.h[i] * sol.nu[i];
    }
    CHECK(lhs == doctest::Approx(sol.lambda * rhs).epsilon(1e-10));
}

TEST_CASE("pressure is Lipschitz and monotone in the potential") {
    IntervalMap d = doubling_map();
    DetRng rng(5);
    for (int trial = 0; trial < 8; ++trial) {
        double a = rng.uniform(-0.5, 0.5);
        double b = rng.uniform(-0.5, 0.5);
        Potential pa = cosine_potential(a);
        Potential pb = cosine_potential(b);
        double gap = std::fabs(a - b);  // sup norm of the difference
        double p1 = pressure_value(d, pa, 256);
        double p2 = pressure_value(d, pb, 256);
        double grid_mod = (std::fabs(a) + std::fabs(b)) * 2.0 * 3.14159265358979323846 / 256.0;
        CHECK(std::fabs(p1 - p2) <= gap + 2.0 * grid_mod + 1e-12);
    }
    // monotonicity: phi <= psi pointwise
    Potential lo = cosine_potential(0.2);
    Potential hi{[](double x) { return 0.2 * std::cos(2.0 * 3.14159265358979323846 * x) + 0.1; },
                 1.0, "shifted", 0.2 * 2.0 * 3.14159265358979323846};
    CHECK(pressure_value(d, lo, 128) <= pressure_value(d, hi, 128) + 1e-10);
}

TEST_CASE("equilibrium measures") {
    IntervalMap d = doubling_map();
    SUBCASE("zero potential gives uniform weights") {
        SpectralSolution sol = power_iterate(build_ulam(d, constant_potential(0.0), 16));
        EquilibriumMeasure em = equilibrium_measure(d, sol);
        for (double w : em.weights) CHECK(w == doctest::Approx(1.0 / 16.0).epsilon(1e-10));
        CHECK(em.pushforward_defect <= 1e-10);
    }
    SUBCASE("Bernoulli weights from the weighted matrix") {
        SpectralSolution sol =
            power_iterate(build_ulam(d, dyadic_potential(1, {0.0, std::log(3.0)}), 2));
        EquilibriumMeasure em = equilibrium_measure(d, sol);
        CHECK(em.weights[0] == doctest::Approx(0.25).epsilon(1e-10));
        CHECK(em.weights[1] == doctest::Approx(0.75).epsilon(1e-10));
    }
    SUBCASE("slope-3 uniform") {
        IntervalMap tri = linear_full_map(3);
        SpectralSolution sol = power_iterate(build_ulam(tri, constant_potential(0.0), 27));
        for (double w : sol.mu) CHECK(w == doctest::Approx(1.0 / 27.0).epsilon(1e-10));
    }
}

TEST_CASE("variational entropy proxy stays admissible") {
    IntervalMap d = doubling_map();
    for (double amp : {0.0, 0.2, 0.5}) {
        SpectralSolution sol = power_iterate(build_ulam(d, cosine_potential(amp), 256));
        double integral = 0.0;
        for (int i = 0; i < sol.k; ++i)
            integral += sol.mu[static_cast<std::size_t>(i)] *
                        cosine_potential(amp)((i + 0.5) / static_cast<double>(sol.k));
        double h = sol.pressure - integral;
        CHECK(h >= -0.01);
        CHECK(h <= std::log(2.0) + 0.01);
    }
}

TEST_CASE("gibbs ratios are exactly 1 on cylinder-aligned balls") {
    IntervalMap d = doubling_map();
    SUBCASE("lebesgue case") {
        SpectralSolution sol = power_iterate(build_ulam(d, constant_potential(0.0), 256));
        // x dyadic: the orbit and all pullbacks stay grid-aligned
        double ratio = gibbs_ratio(d, constant_potential(0.0), sol, 3.0 / 256.0, 5, 1.0 / 32.0);
        CHECK(ratio == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("locally constant case") {
        // x = odd/512 with eps = 1/32 and n = 4 keeps every pullback level
        // aligned with the 256-cell grid, so the cell sums are exact
        // cylinder masses nu[w] = e^{S phi}/lambda^n.
        Potential pc = dyadic_potential(1, {0.15, -0.35});
        SpectralSolution sol = power_iterate(build_ulam(d, pc, 256));
        for (double x : {5.0 / 512.0, 57.0 / 512.0, 201.0 / 512.0}) {
            double ratio = gibbs_ratio(d, pc, sol, x, 4, 1.0 / 32.0);
            CHECK(ratio == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("gibbs report on the intermittent map") {
    IntervalMap im = intermittent_map(0.5);
    Potential phi = cosine_potential(0.1);
    SpectralSolution sol = power_iterate(build_ulam(im, phi, 2048));
    GibbsParams params;
    params.eps = 1.0 / 64.0;
    params.trials = 25;
    params.seed = 11;
    GibbsReport rep = gibbs_check(im, phi, sol, params);
    CHECK(static_cast<int>(rep.samples.size()) == params.trials);
    CHECK(rep.k_theory > 1.0);
    CHECK(rep.c_lower >= 1.0 / rep.k_theory);
    CHECK(rep.c_upper <= rep.k_theory);
    for (const auto& s : rep.samples) CHECK(s.ratio > 0.0);
}

TEST_CASE("measure_of_interval handles wrap and fractions") {
    std::vector<double> nu(4, 0.25);
    CHECK(measure_of_interval(nu, 4, 0.0, 1.0, Metric::circle) == doctest::Approx(1.0));
    CHECK(measure_of_interval(nu, 4, -0.125, 0.125, Metric::circle) == doctest::Approx(0.25));
    CHECK(measure_of_interval(nu, 4, 0.125, 0.375, Metric::interval) == doctest::Approx(0.25));
}

TEST_CASE("solution serialization and matrix dump") {
    IntervalMap d = doubling_map();
    SpectralSolution sol = power_iterate(build_ulam(d, constant_potential(0.0), 4));
    std::string js = spectral_solution_to_json(sol);
    CHECK(js.find("\"lambda\"") != std::string::npos);
    CHECK(js.find("\"pressure\"") != std::string::npos);
    CHECK(js.find("\"mu\"") != std::string::npos);

    std::ostringstream dense, sparse;
    UlamDiscretization disc = build_ulam(d, constant_potential(0.0), 4);
    dump_matrix_csv(disc, dense, false);
    dump_matrix_csv(disc, sparse, true);
    CHECK(dense.str().find("\r\n") != std::string::npos);
    CHECK(sparse.str().rfind("row,col,value", 0) == 0);
}
