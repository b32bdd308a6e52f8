#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace eqstab {

// Deterministic xorshift-based generator.  std::mt19937 is reproducible, but
// the standard distributions are not pinned across library implementations,
// so uniforms are produced by explicit bit manipulation.
class DetRng {
  public:
    explicit DetRng(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state_(seed ? seed : 1) {}

    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        state_ = x;
        return x * 0x2545f4914f6cdd1dull;
    }

    // Uniform in [0,1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi) {  // inclusive range
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

  private:
    std::uint64_t state_;
};

// Golden-ratio Weyl sequence on [0,1): the standard low-discrepancy filler
// for deterministic probe points.
inline double weyl_point(std::size_t i, double offset = 0.0) {
    constexpr double golden = 0.6180339887498948482;
    double v = offset + golden * static_cast<double>(i + 1);
    return v - std::floor(v);
}

inline std::vector<double> weyl_points(std::size_t n, double offset = 0.0) {
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = weyl_point(i, offset);
    return pts;
}

}  // namespace eqstab
