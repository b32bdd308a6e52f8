#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eqstab/dynamics.hpp"

namespace eqstab {

// Holder observable on [0,1].  `alpha` is the Holder exponent used by the
// modulus corrections; `declared_seminorm`, when present, is an a-priori
// bound on |phi|_alpha and takes precedence over the sampled estimate.
struct Potential {
    std::function<double(double)> eval;
    double alpha = 1.0;
    std::string label;
    std::optional<double> declared_seminorm;

    double operator()(double x) const { return eval(x); }
};

Potential constant_potential(double c);
Potential cosine_potential(double amplitude, int frequency = 1);
Potential linear_potential(double slope, double intercept = 0.0);
// Piecewise constant on dyadic cylinders of the given depth; values.size()
// must be 2^depth.
Potential dyadic_potential(int depth, std::vector<double> values);

// S_n phi(x) = sum_{j<n} phi(f^j x).
double birkhoff_sum(const IntervalMap& map, const Potential& phi, double x, int n);

struct SupInfEstimate {
    double inf = 0.0;
    double sup = 0.0;
    double grid_spacing = 0.0;
    // Outer bound: the true range is contained in
    // [inf - seminorm*h^alpha, sup + seminorm*h^alpha].
    double holder_correction(double seminorm, double alpha) const;
};

// Grid min/max over `resolution` equally spaced points including both
// endpoints.  An estimate: the true extrema can exceed it by at most the
// Holder modulus of one grid step.
SupInfEstimate sup_inf_estimate(const Potential& phi, int resolution);

// Max of |phi(x)-phi(y)| / d(x,y)^alpha over a deterministic pair set: all
// grid pairs closer than 0.1 plus `pairs` low-discrepancy global pairs.
// A lower bound on the true seminorm.
double holder_seminorm_estimate(const Potential& phi, double alpha, int pairs,
                                Metric metric = Metric::interval);

// Seminorm used in bound formulas: the declared value when present, else
// the sampled estimate.
double effective_seminorm(const Potential& phi, int pairs = 10000,
                          Metric metric = Metric::interval);

struct SmallVariationResult {
    bool ok = false;
    double margin = 0.0;  // (log deg - log q) - (sup - inf)
    double sup = 0.0;
    double inf = 0.0;
};

// Checks sup phi - inf phi < log(deg) - log(q), the admissibility condition
// for potentials over a covering with q slow pieces.
SmallVariationResult small_variation_check(const Potential& phi, int deg, int q,
                                           int resolution = 4096);

// Variation threshold (log omega)/2, omega the golden ratio, used by the
// horseshoe family.
double horseshoe_variation_threshold();

SmallVariationResult horseshoe_small_variation_check(double phi_sup, double phi_inf);

}  // namespace eqstab
