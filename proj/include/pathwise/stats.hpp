#pragma once

#include "pathwise/exposure.hpp"

#include <span>

namespace pathwise {

// Pathwise statistics for one realization under a schedule.
//
// u and v_mu are the schedule-weighted cumulative return and cumulative
// squared deviation, centered at the *known* process mean. m and v_sample
// are the realized (unweighted) sample mean and sum of squared deviations
// around it; the weighted analog of m is deliberately not defined.
struct PathStats {
    double u;        // sum a_j r_j
    double v_mu;     // sum a_j^2 (r_j - mu)^2
    double u_norm;   // u / e1
    double v_norm;   // v_mu / e2
    double m;        // (1/t) sum r_j
    double v_sample; // sum (r_j - m)^2 = (t-1) * unbiased sample variance
};

// Throws validation_error when path length and schedule length differ.
PathStats path_stats(std::span<const double> path, const Schedule& schedule, double mu);

enum class PathField { cumulative_return, cumulative_risk }; // u, v_mu

struct MeanVar {
    double mean;
    double variance; // unbiased (N-1 divisor)
};

// Cross-path mean and unbiased variance of the selected field. Requires at
// least two paths.
MeanVar ensemble_average(std::span<const PathStats> stats, PathField field);

// Shared accumulation core: u = sum a_j r_j and v = sum a_j^2 (r_j - mu)^2
// in one compensated pass. Used by both path_stats and the ensemble engine.
struct WeightedSums {
    double u;
    double v;
};

WeightedSums weighted_sums(std::span<const double> path, std::span<const double> a, double mu);

} // namespace pathwise
