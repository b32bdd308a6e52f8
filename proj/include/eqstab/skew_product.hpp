#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eqstab/dynamics.hpp"
#include "eqstab/potentials.hpp"
#include "eqstab/transfer_operator.hpp"

namespace eqstab {

// Holder observable on the product [0,1] x [0,1] under the max metric
// d((x,y),(x',y')) = max(d_M(x,x'), |y - y'|).  `holder_const` bounds the
// alpha-seminorm and feeds the cohomology tail estimates.
struct ProductPotential {
    std::function<double(double, double)> eval;
    double alpha = 1.0;
    double holder_const = 1.0;
    std::string label;

    double operator()(double x, double y) const { return eval(x, y); }
};

struct FiberPiece {
    double lo = 0.0;
    double hi = 1.0;
    std::optional<double> y0;  // fixed fiber point, required for bar_phi
};

// Skew product F(x,y) = (f(x), g(x,y)) with a uniformly contracting fiber.
// The contraction rate and the fixed fiber points are validated on a probe
// grid at construction.  Systems without fixed fiber points are allowed;
// only the homologous-potential reduction requires one.
class SkewSystem {
  public:
    SkewSystem(IntervalMap base, std::function<double(double, double)> fiber, double lambda_c,
               std::vector<FiberPiece> pieces = {FiberPiece{0.0, 1.0, 0.0}}, int probe_grid = 64);

    const IntervalMap& base() const { return base_; }
    double lambda_c() const { return lambda_c_; }
    const std::vector<FiberPiece>& pieces() const { return pieces_; }

    double fiber(double x, double y) const { return fiber_(x, y); }
    std::pair<double, double> evaluate(std::pair<double, double> p) const;

    // Fixed fiber point of the piece containing y (default piece 0).
    double y0(int piece = 0) const;
    bool has_y0(int piece = 0) const;

  private:
    IntervalMap base_;
    std::function<double(double, double)> fiber_;
    double lambda_c_;
    std::vector<FiberPiece> pieces_;
};

// --- cohomology reduction -------------------------------------------------

struct CohomologyData {
    int truncation = 0;       // J
    double tail_bound = 0.0;  // C_phi lambda_c^{alpha J} / (1 - lambda_c^alpha)
};

double cohomology_tail_bound(const ProductPotential& phi, const SkewSystem& sys, int truncation);

// Truncation depth achieving tail_bound <= target.
int cohomology_truncation_for(const ProductPotential& phi, const SkewSystem& sys, double target);

// Partial sum u_J(x,y) = sum_{j<J} (phi(F^j(x,y)) - phi(F^j(x,y0))).
std::pair<double, CohomologyData> u_truncated(const SkewSystem& sys, const ProductPotential& phi,
                                              std::pair<double, double> p, int truncation,
                                              int piece = 0);

// The homologous potential (x,y) -> phi(x, y0): independent of the fiber by
// construction.
ProductPotential bar_phi(const ProductPotential& phi, const SkewSystem& sys, int piece = 0);

// Restriction of a fiber-independent potential to the base; the two-point
// fiber check guards against accidental fiber dependence.
Potential induced_base_potential(const ProductPotential& barphi, double z0 = 0.25,
                                 double z1 = 0.75);

// --- measure lifting --------------------------------------------------------

struct LiftedSample {
    double x = 0.0;
    double y = 0.0;
};

// Lifts the tail of a base orbit onto the fiber attractor: the fiber
// coordinate of orbit[t] is reconstructed by running the fiber map along
// the `burn_in` preceding base points starting from y_init.  Accurate to
// lambda_c^burn_in.
std::vector<LiftedSample> lift_measure(const SkewSystem& sys, const std::vector<double>& base_orbit,
                                       int burn_in, double y_init = 0.0);

// --- 2-D discretization and the pressure equality ----------------------------

// Transfer-operator discretization for F on k x k_f product cells: Ulam in
// the base direction, fiber routing by cell quadrature nodes (the fiber
// carries no entropy, so no fiber Jacobian enters).
UlamDiscretization build_ulam_skew(const SkewSystem& sys, const ProductPotential& phi, int k,
                                   int k_fiber, int quadrature_base = 8, int quadrature_fiber = 4);

struct SkewPressureReport {
    double p_base = 0.0;
    double p_skew = 0.0;
    double diff = 0.0;                 // |p_skew - p_base|
    double homology_residual_max = 0.0;  // max |phi - u_J + u_J o F - bar_phi| over probes
    double tail_bound = 0.0;
    int truncation = 0;
    double integral_identity_gap = 0.0;  // |avg phi - avg bar_phi| over lifted samples
    int burn_in = 0;
    int k = 0;
    int k_fiber = 0;
};

struct SkewCheckParams {
    int k = 1024;
    int k_fiber = 0;   // 0 => 2 ceil(sqrt(k))
    int truncation = 0;  // 0 => tail_bound <= 1e-8
    int homology_probes = 1000;
    int burn_in = 40;
    int lift_samples = 20000;
};

// Compares the skew pressure (2-D Ulam with the original potential) with
// the base pressure of the induced potential, and reports the truncated
// homology residual and the invariant-integral identity along lifted
// samples.
SkewPressureReport skew_pressure_check(const SkewSystem& sys, const ProductPotential& phi,
                                       const SkewCheckParams& params = {});

std::string skew_report_to_json(const SkewPressureReport& rep);

// Solenoid-style preset: doubling base with the linear fiber contraction
// g(x,y) = rate * y (fixed point y0 = 0).
SkewSystem solenoid_skew(double rate = 0.3);

// Two-piece fiber preset: independent contractions on [0,1/2] and [1/2,1]
// with fixed points y = 0 and y = 1.
SkewSystem two_piece_skew(double rate = 0.3);

}  // namespace eqstab
