#pragma once

#include <set>
#include <vector>

#include "eqstab/dynamics.hpp"
#include "eqstab/potentials.hpp"

namespace eqstab {

// Log inverse-derivative cocycle along an orbit: a_j = log ||Df(f^j x)^-1||,
// S_m = a_0 + ... + a_{m-1}, and the expansion constant c > 0 against which
// hyperbolic times are detected.
struct OrbitExpansionData {
    std::vector<double> a;
    std::vector<double> prefix;  // length a.size()+1, prefix[0] = 0
    double c = 0.0;

    static OrbitExpansionData from_sequence(std::vector<double> a, double c);
    static OrbitExpansionData from_orbit(const IntervalMap& map, double x, int n, double c);

    double statistic(int n) const;  // S_n / n
};

// k <= n ("inclusive", the default) also constrains the full block back to
// time zero; k < n ("strict") leaves n = 1 vacuously hyperbolic.
enum class HtConvention { inclusive, strict };

// n is hyperbolic iff S_n - S_{n-k} <= -c k/2 for all admissible k.
// O(len) via the running minimum of T_m = S_m + c m / 2.
std::vector<int> detect_hyperbolic_times(const OrbitExpansionData& data,
                                         HtConvention convention = HtConvention::inclusive);

// Reference O(n^2) detector; checks the defining inequality directly.
std::vector<int> detect_hyperbolic_times_bruteforce(const OrbitExpansionData& data,
                                                    HtConvention convention);

double nue_statistic(const OrbitExpansionData& data, int n);

// Half the median empirical expansion rate over deterministic sample
// orbits.  Throws NotExpanding when the median statistic is >= 0.
double estimate_c(const IntervalMap& map, int samples, int n);

// Largest radius eps (from a halving scan) such that log ||Df^-1|| varies
// by at most c/4 over every 2*eps-ball.  Returns 0 when even the finest
// candidate fails.
double delta1_estimate(const IntervalMap& map, double c, int grid = 4096);

// Pliss-type lower bound for the density of hyperbolic times along data:
// ((-statistic) - c/2) / (max_j(-a_j) - c/2).  Meaningful only when the
// denominator is positive; otherwise every time is hyperbolic and 1.0 is
// returned.
double pliss_density_floor(const OrbitExpansionData& data);

// --- dynamic-ball pullback ---------------------------------------------

struct BallLevel {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

enum class PullbackMode {
    strict,  // throw BallEscapesBranch if the ball leaves a branch image
    clip,    // intersect with the branch image and continue
};

// Reconstructs B_eps(x,n) by pulling B(f^n x, eps) back along the orbit's
// branch itinerary, intersecting with the eps-ball about the orbit at every
// level.  orbit must hold x, f(x), ..., f^n(x).  levels[j] brackets
// f^j(B_eps(x,n)); levels[0] is the dynamic ball itself.
std::vector<BallLevel> pullback_dynamic_ball(const IntervalMap& map,
                                             const std::vector<double>& orbit, double eps,
                                             PullbackMode mode);

// --- backward contraction and bounded distortion -------------------------

struct ContractionEntry {
    int j = 0;
    double observed_ratio = 0.0;  // max over probes of d(f^{n-j}y, f^{n-j}z)/d(f^n y, f^n z)
    double bound = 0.0;           // e^{-c j / 4}
};

struct ContractionReport {
    int n = 0;
    std::vector<ContractionEntry> pairs;
    double distortion_min = 1.0;  // extremes of e^{S_n phi(y) - S_n phi(z)}
    double distortion_max = 1.0;
    double k_bound = 1.0;  // exp(|phi|_a sum_{j>=1} (2 eps e^{-c j/4})^a)
    bool contraction_ok = false;
    bool distortion_ok = false;
};

// Verifies the backward-contraction ratios and the Birkhoff-sum distortion
// on `probes` deterministic point pairs inside the dynamic ball.  n must be
// a hyperbolic time for x at rate c.
ContractionReport verify_contraction(const IntervalMap& map, const Potential& phi, double x,
                                     int n, double c, double eps, int probes);

// Distortion constant of the geometric-series estimate at radius eps.
double distortion_k_bound(double seminorm, double alpha, double c, double eps);

}  // namespace eqstab
