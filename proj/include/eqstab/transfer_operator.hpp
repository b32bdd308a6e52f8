#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "eqstab/dynamics.hpp"
#include "eqstab/potentials.hpp"

namespace eqstab {

// Column-major sparse nonnegative matrix; columns indexed by source cell,
// rows by target cell.
class SparseMatrix {
  public:
    SparseMatrix() = default;
    explicit SparseMatrix(int n) : n_(n), cols_(static_cast<std::size_t>(n)) {}

    int size() const { return n_; }
    void add(int row, int col, double value);  // accumulates duplicates on finalize
    void finalize();                           // sort rows, merge duplicates

    const std::vector<std::pair<std::int32_t, double>>& column(int j) const {
        return cols_[static_cast<std::size_t>(j)];
    }

    // y = A x
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
    // y = A^T x
    void apply_transpose(const std::vector<double>& x, std::vector<double>& y) const;

    double column_sum(int j) const;

  private:
    int n_ = 0;
    std::vector<std::vector<std::pair<std::int32_t, double>>> cols_;
};

// Weighted Ulam discretization of the transfer operator
//   (L psi)(x) = sum_{f(y)=x} e^{phi(y)} psi(y)
// on k uniform cells.  Entry B[i][j] integrates e^{phi} |f'| over
// C_j n f^{-1}(C_i), scaled by k, via a composite midpoint rule with
// `quadrature` nodes per cell per branch restriction; this is the Galerkin
// projection of L onto piecewise-constant functions and is exact for
// Markov-aligned piecewise-linear maps with cell-constant potentials.
struct UlamDiscretization {
    int k = 0;
    int quadrature = 0;
    int degree = 0;
    SparseMatrix matrix;

    double cell_width() const { return 1.0 / static_cast<double>(k); }
    double cell_center(int i) const { return (static_cast<double>(i) + 0.5) / static_cast<double>(k); }
    int cell_of(double x) const;
};

// L applied pointwise to an observable: sum over inverse branches of
// e^{phi(y)} psi(y).
double apply_pointwise(const IntervalMap& map, const Potential& phi,
                       const std::function<double(double)>& psi, double x);

// Enumerates the sub-intervals of a source cell on which the landing cell
// is constant: the branch restrictions split at the preimages of target
// cell boundaries.
void for_each_ulam_piece(const IntervalMap& map, int k, int source_cell,
                         const std::function<void(int branch, double lo, double hi, int target)>& fn);

UlamDiscretization build_ulam(const IntervalMap& map, const Potential& phi, int k,
                              int quadrature = 8);

// Dominant eigendata of an Ulam matrix.
struct SpectralSolution {
    double lambda = 0.0;
    double pressure = 0.0;        // log lambda
    std::vector<double> h;        // right eigenvector (eigenfunction values)
    std::vector<double> nu;       // left eigenvector, sums to 1 (eigenmeasure)
    std::vector<double> mu;       // equilibrium weights h_i nu_i, sums to 1
    double residual = 0.0;        // max-norm of (B h - lambda h)/lambda, h scaled to max 1
    long iterations = 0;
    bool nonprimitive = false;    // reducible or periodic sparsity structure
    int k = 0;
};

struct PowerIterationOptions {
    double tol = 1e-12;     // relative eigenvalue change
    long max_iter = 100000;
};

// Deterministic power iteration from the uniform start vector, for the
// right and left Perron eigendata.  Throws NotConverged after max_iter;
// flags (rather than rejects) non-primitive structure.
SpectralSolution power_iterate(const UlamDiscretization& disc,
                               const PowerIterationOptions& opts = {});

// Pressure log lambda at resolution k plus the refinement diagnostics at
// 2k and 4k cells.
struct PressureResult {
    double pressure = 0.0;  // at the requested k
    std::vector<std::pair<int, double>> refinement;  // (cells, pressure)
};

PressureResult pressure(const IntervalMap& map, const Potential& phi, int k, int quadrature = 8);

// Single-resolution pressure without the refinement report.
double pressure_value(const IntervalMap& map, const Potential& phi, int k, int quadrature = 8);

// Equilibrium weights mu_i = h_i nu_i (normalized) together with the
// l1 defect of mu under the unweighted Ulam push-forward.  The defect is a
// coarse diagnostic only: it vanishes for within-cell-uniform measures and
// stays positive for self-similar singular ones at any resolution.
struct EquilibriumMeasure {
    std::vector<double> weights;
    double pushforward_defect = 0.0;
};

EquilibriumMeasure equilibrium_measure(const IntervalMap& map, const SpectralSolution& sol);

// Spectral-radius bracket deg e^{inf phi} <= lambda <= deg e^{sup phi} with
// the Holder-corrected grid sup/inf.
struct SpectralBounds {
    double lower = 0.0;
    double upper = 0.0;
    bool ok = false;
};

SpectralBounds check_spectral_bounds(const SpectralSolution& sol, const IntervalMap& map,
                                     const Potential& phi, int resolution = 2048,
                                     double slack = 0.0);

// --- Gibbs property ---------------------------------------------------

struct GibbsSample {
    double x = 0.0;
    int n = 0;
    double y = 0.0;      // evaluation point of the Birkhoff sum (= x)
    double ratio = 0.0;  // nu(B_eps(x,n)) / (nu(B(f^n x, eps)) e^{S_n phi - n log lambda})
};

struct GibbsReport {
    std::vector<GibbsSample> samples;
    double c_lower = 0.0;   // min observed ratio
    double c_upper = 0.0;   // max observed ratio
    double k_theory = 1.0;  // distortion bound exp(|phi|_a sum_j (2 eps e^{-cj/4})^a)
    double eps = 0.0;
    double c = 0.0;         // expansion constant used for hyperbolic times
    double delta1 = 0.0;    // estimated admissible radius; eps may exceed it
    bool eps_within_delta1 = false;
};

struct GibbsParams {
    double eps = 1.0 / 64.0;
    int trials = 100;
    int n_min = 3;
    int n_max = 8;
    int orbit_cap = 64;
    std::uint64_t seed = 7;
    double c = 0.0;  // 0 => estimate from the map
    // Cell sums cannot resolve a ball below the nu grid scale; samples whose
    // pulled-back ball spans fewer cells are skipped.
    double min_ball_cells = 8.0;
};

// Samples hyperbolic dynamic balls and compares nu(ball) with the
// conformal weight; the ratio is normalized by the measure of the image
// ball so the locally constant Markov case gives exactly 1.
GibbsReport gibbs_check(const IntervalMap& map, const Potential& phi, const SpectralSolution& sol,
                        const GibbsParams& params);

// Single Gibbs ratio for a caller-chosen point and hyperbolic time.
double gibbs_ratio(const IntervalMap& map, const Potential& phi, const SpectralSolution& sol,
                   double x, int n, double eps);

// nu-mass of [lo,hi] (wrapped on the circle) from cell weights, with
// fractional overlap at the edge cells.
double measure_of_interval(const std::vector<double>& nu, int k, double lo, double hi,
                           Metric metric);

// --- serialization -----------------------------------------------------

std::string spectral_solution_to_json(const SpectralSolution& sol);
void dump_matrix_csv(const UlamDiscretization& disc, std::ostream& os, bool sparse_format);

}  // namespace eqstab
