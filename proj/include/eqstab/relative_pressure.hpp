#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eqstab/dynamics.hpp"
#include "eqstab/potentials.hpp"

namespace eqstab {

// Subshift of finite type with a depth-m locally constant potential: the
// exact oracle model for relative pressure.  `transition[u][v]` allows the
// symbol v after u; `potential` has one value per admissible length-m word
// (indexed in base `alphabet` with the first symbol most significant).
struct SFTModel {
    int alphabet = 2;
    std::vector<std::vector<int>> transition;  // 0/1
    int depth = 1;
    std::vector<double> potential;  // size alphabet^depth

    double word_value(const std::vector<int>& word) const;
    bool word_admissible(const std::vector<int>& word) const;
    static SFTModel full_shift(int alphabet, std::vector<double> symbol_values);
};

struct SftPressureResult {
    double pressure = 0.0;  // -infinity when no admissible loop exists
    bool reducible = false;
    bool empty = false;
};

// log of the spectral radius of the weighted word-transition matrix
// M[u -> v] = A[u_last -> v_last] e^{potential(u)}; on a reducible model the
// maximum over strongly connected components is returned with a flag.
SftPressureResult sft_pressure(const SFTModel& model);

// Pressure of the sub-SFT over the given symbol set.  Returns the -infinity
// sentinel with empty=true if the restriction admits no loops.
SftPressureResult relative_pressure_subsystem(const SFTModel& model,
                                              const std::vector<int>& allowed);

// Pressure carried by the complement structure: the maximum over strongly
// connected components that contain at least one symbol outside `allowed`.
SftPressureResult relative_pressure_complement(const SFTModel& model,
                                               const std::vector<int>& allowed);

// Symbol-level strongly connected components of the transition graph.
std::vector<std::vector<int>> sft_components(const SFTModel& model);

// --- dynamic-ball cover estimates ----------------------------------------

struct CoverParams {
    double delta = 1.0 / 32.0;
    int min_depth = 4;         // N: smallest admissible ball depth
    int max_depth = 48;
    int region_grid = 4096;
    int probes_per_ball = 16;  // R_{n,delta} sup estimate
    std::vector<double> gamma_grid;  // empty => linspace(0.01, 1.2, 60)
};

struct CoverEstimate {
    double pressure = 0.0;    // inf over gamma with cover sum below threshold
    bool heuristic = true;    // interval-map covers are consistency checks only
    bool region_empty = false;
    double threshold = 1.0;
    int balls_used = 0;       // at the crossing gamma
};

// Upper estimate of the relative pressure of a region via greedy covers by
// dynamic balls B_delta(x,n).  The Caratheodory infimum over all covers is
// replaced by one greedy cover per gamma; flagged HEURISTIC.
CoverEstimate cover_pressure_estimate(const IntervalMap& map, const Potential& phi,
                                      const std::function<bool(double)>& region_indicator,
                                      const CoverParams& params);

// --- hyperbolicity certification ------------------------------------------

struct CertifyParams {
    int k = 1024;             // Ulam cells for the total pressure
    int horizon = 50;         // finite-time proxy for the limsup statistic
    int grid = 4096;          // bad-region grid
    CoverParams cover;
};

struct HyperbolicityCertificate {
    double p_total = 0.0;
    double p_bad = 0.0;       // -infinity when the bad region is empty
    double margin = 0.0;      // +infinity when the bad region is empty
    double zeta = 0.0;        // margin / 2
    double c = 0.0;
    bool passes = false;
    bool bad_region_empty = false;
    bool heuristic = true;
    CertifyParams params;
};

// Certifies that the potential's pressure is carried by the non-uniformly
// expanding set: P_total comes from the Ulam spectral radius, the bad
// region collects grid points whose finite-time statistic exceeds -c, and
// its pressure is bounded by a greedy dynamic-ball cover.
HyperbolicityCertificate certify_hyperbolic(const IntervalMap& map, const Potential& phi,
                                            double c, const CertifyParams& params = {});

std::string certificate_to_json(const HyperbolicityCertificate& cert);

}  // namespace eqstab
