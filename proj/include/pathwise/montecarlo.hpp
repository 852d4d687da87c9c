#pragma once

#include "pathwise/analytic.hpp"
#include "pathwise/exposure.hpp"
#include "pathwise/process.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pathwise::mc {

// ---------------------------------------------------------------------------
// Streaming moment accumulator (Welford/Pebay updates through M4)
// ---------------------------------------------------------------------------

class MomentAccumulator {
public:
    void add(double x) noexcept;
    void merge(const MomentAccumulator& other) noexcept;

    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return m1_; }
    double variance() const noexcept;        // unbiased, requires n >= 2
    double central_moment4() const noexcept; // M4 / n

    double mean_std_error() const noexcept;
    // Delta-method standard error of the variance estimate, using the sample
    // fourth central moment.
    double variance_std_error() const noexcept;

private:
    std::uint64_t n_ = 0;
    double m1_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double m4_ = 0.0;
};

// ---------------------------------------------------------------------------
// Ensemble engine
// ---------------------------------------------------------------------------

struct EnsembleConfig {
    std::uint64_t n_paths = 0;
    int horizon = 0;            // must match the schedule length
    std::uint64_t seed = 0;
    int workers = 0;            // parallelism hint; <= 0 means hardware default
    std::string dump_file;      // when set, per-path returns are written as CSV
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

struct EnsembleEstimates {
    std::uint64_t n_paths = 0;
    Estimate mean_u;
    Estimate var_u;
    Estimate mean_v;
    Estimate var_v;

    analytic::MomentReport report() const;
};

// Unbiased estimates of E[U], Var(U), E[V], Var(V) over n_paths independent
// paths. Bit-identical for a fixed (spec, schedule, n_paths, seed) across
// worker counts: paths own substreams keyed by path index and block results
// merge in index order.
EnsembleEstimates run_ensemble(const ProcessSpec& spec, const Schedule& schedule,
                               const EnsembleConfig& config);

// ---------------------------------------------------------------------------
// Verification against closed forms
// ---------------------------------------------------------------------------

struct VerificationResult {
    std::string quantity;
    double analytic = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double z_score = 0.0;
    bool pass = false;
    bool skipped = false;
    std::string reason;
};

// One result per quantity in {E[U], Var(U), E[V], Var(V), Var(U/E1)}.
// Quantities whose closed form does not exist are skipped with a reason.
std::vector<VerificationResult> verify(const ProcessSpec& spec, const Schedule& schedule,
                                       const EnsembleConfig& config, double z_max = 4.0);

// ---------------------------------------------------------------------------
// Exact enumeration oracle
// ---------------------------------------------------------------------------

struct EnumeratedMoments {
    double mean_u = 0.0;
    double var_u = 0.0;
    double mean_v = 0.0;
    double var_v = 0.0;
};

EnumeratedMoments enumerate_moments(const ProcessSpec& spec, const Schedule& schedule,
                                    std::uint64_t cap = kDefaultEnumerationCap);

struct ExactEnumeratedMoments {
    Rational mean_u;
    Rational var_u;
    Rational mean_v;
    Rational var_v;
};

ExactEnumeratedMoments enumerate_moments_exact(const ProcessSpec& spec,
                                               const Schedule& schedule,
                                               std::uint64_t cap = kDefaultEnumerationCap);

// Enumeration moments vs closed forms; std_error = 0 and pass iff
// |difference| <= tol.
std::vector<VerificationResult> enumerate_verify(const ProcessSpec& spec,
                                                 const Schedule& schedule,
                                                 std::uint64_t cap = kDefaultEnumerationCap,
                                                 double tol = 1e-9);

} // namespace pathwise::mc
