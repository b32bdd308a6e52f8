#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqstab/errors.hpp"

namespace eqstab {

enum class Metric { circle, interval };

// Distance on [0,1] under the chosen metric; the circle identifies 0 and 1.
double metric_distance(Metric m, double a, double b);

// One monotone C^1 piece of a piecewise-smooth map.  `forward` and
// `derivative` must be defined on [lo, hi]; when `inverse` is not supplied
// the branch is inverted by safeguarded Newton bracketed by the domain.
struct Branch {
    double lo = 0.0;
    double hi = 1.0;
    std::function<double(double)> forward;
    std::function<double(double)> derivative;
    std::function<double(double)> inverse;  // optional closed form

    double image_lo() const { return forward(lo); }
    double image_hi() const { return forward(hi); }
    bool increasing() const { return image_hi() >= image_lo(); }
    bool has_closed_inverse() const { return static_cast<bool>(inverse); }
};

// Piecewise-smooth expanding map of the interval/circle with enumerable
// inverse branches.  Branch domains partition [0,1]; a point on a shared
// endpoint belongs to the branch on its left.
class IntervalMap {
  public:
    IntervalMap(std::string name, Metric metric, int degree, std::vector<Branch> branches);

    const std::string& name() const { return name_; }
    Metric metric() const { return metric_; }
    int degree() const { return degree_; }
    const std::vector<Branch>& branches() const { return branches_; }

    // Index of the branch owning x (left branch at shared endpoints).
    int branch_index(double x) const;

    // f(x); values outside [0,1] wrap mod 1 on the circle.
    double evaluate(double x) const;

    // All preimages (branch_id, y) with evaluate(y) = x, one per branch
    // whose image contains x.
    std::vector<std::pair<int, double>> inverse_branches(double x) const;

    // log ||Df(x)^{-1}|| = -log |f'(x)|.  At an interior partition endpoint
    // the two one-sided values must agree or BranchBoundary is thrown.
    double log_inv_derivative(double x) const;

    // (x, f(x), ..., f^{n-1}(x)), n >= 1.
    std::vector<double> orbit(double x, int n) const;

    double distance(double a, double b) const { return metric_distance(metric_, a, b); }

    // Inverts branch b at value v, which must lie in the branch image
    // (within root tolerance).  Closed form when available, Newton otherwise.
    double branch_inverse(int b, double v) const;

    // Branch formula without the circle wrap, for pullback arithmetic.
    double branch_forward_raw(int b, double x) const { return branches_[b].forward(x); }

    static constexpr double root_tolerance = 1e-13;
    static constexpr int newton_max_iter = 100;

  private:
    double newton_inverse(const Branch& br, double v) const;

    std::string name_;
    Metric metric_;
    int degree_;
    std::vector<Branch> branches_;
};

// --- presets -------------------------------------------------------------

// x -> 2x mod 1 on the circle.
IntervalMap doubling_map();

// Full linear map of the given degree (all slopes = degree).
IntervalMap linear_full_map(int degree);

// Manneville-Pomeau style intermittent map with neutral fixed point at 0:
//   x (1 + 2^a x^a)        on [0, 1/2]
//   x - 2^a (1-x)^(1+a)    on [1/2, 1]
IntervalMap intermittent_map(double alpha);

// Degree-2 full-branch piecewise-linear map with one slow branch of width
// `slow_width` (slope 1/slow_width close to 1) and one fast branch.
IntervalMap abv_linear_map(double slow_width);

// Per-branch classification against the expansion conditions of a covering
// with a slow region: `slow` branches satisfy ||Df^-1|| <= 1+delta only,
// `fast` ones satisfy ||Df^-1|| <= sigma.
struct AbvClassification {
    std::vector<int> slow_branches;
    std::vector<int> fast_branches;
    bool admissible = false;  // every branch lands in one of the two classes
};
AbvClassification classify_abv(const IntervalMap& map, double delta, double sigma);

// --- 3-D horseshoe preset ------------------------------------------------

using Vec3 = std::array<double, 3>;

// Two-piece horseshoe on the cube: F0 on R0 = [0,1]^2 x [0,1/6] and
// F1 on R1 = [0,1]^2 x [5/6,1],
//   F0(x,y,z) = (rho x, 1/(1-(1-1/y)e^-1), beta z)
//   F1(x,y,z) = (3/4 - rho x, sigma (1-y), beta1 (z - 5/6))
// with rho < 1/3, beta > 6, 3 < beta1 < 4, sigma < 1/3.
struct HorseshoeParams {
    double rho = 0.2;
    double beta = 6.5;
    double beta1 = 3.5;
    double sigma = 0.25;
};

class Horseshoe {
  public:
    explicit Horseshoe(const HorseshoeParams& p);  // throws ConfigError outside ranges

    const HorseshoeParams& params() const { return p_; }

    bool in_r0(const Vec3& q) const;
    bool in_r1(const Vec3& q) const;

    Vec3 f0(const Vec3& q) const;
    Vec3 f1(const Vec3& q) const;

    // F on R0 u R1; throws Error for points outside both pieces.
    Vec3 evaluate(const Vec3& q) const;

    // Forward orbit while it stays inside R0 u R1.
    std::vector<Vec3> orbit(const Vec3& q, int n) const;

    // Interior fiber map of F0's y-coordinate, fixing y = 1.
    static double fiber_f(double y);

  private:
    HorseshoeParams p_;
};

}  // namespace eqstab
