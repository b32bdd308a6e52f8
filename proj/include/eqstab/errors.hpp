#pragma once

#include <stdexcept>
#include <string>

namespace eqstab {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A Newton-branch inverse failed to reach tolerance within the iteration cap.
struct RootNotConverged : Error {
    using Error::Error;
};

// Derivative requested at a partition endpoint where the two one-sided
// values disagree.
struct BranchBoundary : Error {
    using Error::Error;
};

// Power iteration exhausted max_iter without meeting the tolerance.
struct NotConverged : Error {
    NotConverged(const std::string& msg, double res, long iters)
        : Error(msg), residual(res), iterations(iters) {}
    double residual = 0.0;
    long iterations = 0;
};

// Dynamic-ball sampling found no hyperbolic time up to the orbit cap.
struct NoHyperbolicTimes : Error {
    using Error::Error;
};

// A dynamic-ball pullback crossed a branch-image boundary; the radius is
// too large for a diffeomorphic pullback.
struct BallEscapesBranch : Error {
    BallEscapesBranch(const std::string& msg, int lvl) : Error(msg), level(lvl) {}
    int level = 0;
};

// small_variation_check called with q >= deg.
struct InvalidCover : Error {
    using Error::Error;
};

// Greedy dynamic-ball cover failed to exhaust the region grid.
struct CoverIncomplete : Error {
    using Error::Error;
};

// induced_base_potential detected fiber dependence beyond tolerance.
struct FiberDependence : Error {
    using Error::Error;
};

// Measure vectors of different cell counts were compared.
struct ShapeMismatch : Error {
    using Error::Error;
};

// estimate_c found a non-negative median expansion statistic.
struct NotExpanding : Error {
    using Error::Error;
};

// Config-file or CLI parameter problem.
struct ConfigError : Error {
    using Error::Error;
};

// File I/O failure, message carries the path.
struct IoError : Error {
    using Error::Error;
};

}  // namespace eqstab
