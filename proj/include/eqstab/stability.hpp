#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eqstab/dynamics.hpp"
#include "eqstab/potentials.hpp"
#include "eqstab/relative_pressure.hpp"
#include "eqstab/transfer_operator.hpp"

namespace eqstab {

enum class WeakStarMode { fourier, wasserstein };

// Computable weak-* proxies between cell-weight measures on the same
// uniform grid: the max gap of the first 20 Fourier coefficients, or the
// L1 distance of the piecewise-linear CDFs (Wasserstein-1 on [0,1]).
double weak_star_distance(const std::vector<double>& mu1, const std::vector<double>& mu2,
                          WeakStarMode mode);

// Entropy from the variational identity: pressure - integral of phi against
// the equilibrium weights, evaluated at cell centers.
struct EntropyEstimate {
    double value = 0.0;
    bool admissible = false;  // 0 <= value <= log(deg) + tolerance
    double tolerance = 0.0;
};

EntropyEstimate entropy_from_identity(const SpectralSolution& sol, const Potential& phi, int deg,
                                      double tolerance = 0.02);

// --- sweep configuration -----------------------------------------------------

// A parametrized family t -> (map, potential).
struct SweepFamily {
    std::string name;
    std::function<IntervalMap(double)> map_at;
    std::function<Potential(double)> potential_at;
    bool map_varies = false;  // controls the per-endpoint certification policy
};

// Built-in families addressable from configs.
SweepFamily family_potential_scale();     // doubling, phi_t = t cos(2 pi x)
SweepFamily family_intermittent_alpha();  // f_alpha, phi = 0
SweepFamily family_constant();            // t-independent (doubling, cos/4)
SweepFamily family_skew_cos_fiber();      // reduced skew family on the base

SweepFamily sweep_family(const std::string& name);

enum class CertifyPolicy { off, endpoints, all };

struct SweepConfig {
    SweepFamily family;
    std::vector<double> t_grid;
    int k = 512;
    int quadrature = 8;
    std::vector<WeakStarMode> metric_modes = {WeakStarMode::fourier, WeakStarMode::wasserstein};
    CertifyPolicy certify = CertifyPolicy::off;
    int fourier_modes = 20;  // recorded per measure summary
};

struct SweepRecord {
    double t = 0.0;
    double pressure = 0.0;
    double lambda = 0.0;
    double residual = 0.0;
    long iterations = 0;
    double entropy = 0.0;
    bool entropy_admissible = false;
    double mu_mean = 0.0;
    double mu_variance = 0.0;
    std::vector<double> fourier_re;
    std::vector<double> fourier_im;
    std::vector<double> mu;  // retained for pairwise diagnostics
    std::optional<double> c_estimate;
    std::string error;  // nonempty when the solve failed; row kept in place
};

struct SweepPair {
    double t_lo = 0.0;
    double t_hi = 0.0;
    double dt = 0.0;
    double dp = 0.0;
    double fourier_distance = 0.0;
    double wasserstein_distance = 0.0;
    bool valid = false;
};

struct SweepResult {
    std::string family;
    int k = 0;
    std::vector<SweepRecord> records;
    std::vector<SweepPair> pairs;
    std::vector<std::pair<double, HyperbolicityCertificate>> certificates;  // (t, cert)
};

SweepResult run_sweep(const SweepConfig& config);

// --- emission ----------------------------------------------------------------

struct EmitPaths {
    std::string csv;
    std::string json;
    std::string svg_pressure;
    std::string svg_distance;
};

// CSV (one data row per t plus one per adjacent pair), JSON (full result),
// and two SVG line plots.  Reruns with identical configs are byte-identical.
void emit(const SweepResult& result, const EmitPaths& paths);

std::string sweep_result_to_json(const SweepResult& result);
SweepResult sweep_result_from_json(const std::string& text);
bool operator==(const SweepRecord& a, const SweepRecord& b);
bool operator==(const SweepPair& a, const SweepPair& b);
bool operator==(const SweepResult& a, const SweepResult& b);

std::string sweep_result_to_csv(const SweepResult& result);

// Minimal SVG 1.1 polyline plot; series share the x axis.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};
std::string render_svg_plot(const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace eqstab
