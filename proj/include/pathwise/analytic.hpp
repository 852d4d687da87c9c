#pragma once

#include "pathwise/exposure.hpp"
#include "pathwise/process.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pathwise::analytic {

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

enum class Provenance { closed_form, enumeration, monte_carlo };

enum class Assumption { iid, gaussian, finite_fourth_moment, ar1 };

std::string to_string(Provenance p);
std::string to_string(Assumption a);

// Mean/variance pairs for U (cumulative return) and V (cumulative squared
// deviation). Fields are absent when the required moments do not exist;
// `unavailable` records why.
struct MomentReport {
    std::optional<double> mean_u;
    std::optional<double> var_u;
    std::optional<double> mean_v;
    std::optional<double> var_v;
    Provenance provenance = Provenance::closed_form;
    std::set<Assumption> assumptions;
    std::vector<std::pair<std::string, std::string>> unavailable; // quantity -> reason
};

// ---------------------------------------------------------------------------
// Expectation-level quantities
// ---------------------------------------------------------------------------

// E[U] = mu * e1. Throws moment_unavailable when the mean does not exist.
double expected_return(const ProcessSpec& spec, const Schedule& schedule);

// E[V] = sigma2 * e2 (holds for any stationary process with finite variance,
// independent of the autocovariance structure).
double expected_risk(const ProcessSpec& spec, const Schedule& schedule);

// Var(U): sigma2 * e2 under iid; the autocovariance double sum for AR(1).
double var_cum_return(const ProcessSpec& spec, const Schedule& schedule);

// Var(V): var_y * e4 under iid with finite fourth moment (2 sigma^4 e4 in the
// Gaussian case); the Isserlis double sum 2 sum_j sum_l a_j^2 a_l^2
// gamma(j-l)^2 for AR(1). Non-Gaussian dependent processes are rejected.
double var_cum_risk(const ProcessSpec& spec, const Schedule& schedule);

// Var(U / e1) = Var(U) / e1^2.
double var_normalized_return(const ProcessSpec& spec, const Schedule& schedule);

// Per-period (annualized) return and risk in the lump-sum context, and their
// ratio. Independent of t by construction; t is taken only so the
// cancellation Return(t)/t = mu is the computed path.
struct Annualized {
    double a_return; // Return(t)/t = mu
    double a_risk;   // sqrt(Risk(t)/t) = sigma
    double rr;       // mu / sigma
};

Annualized annualized(const ProcessSpec& spec, int horizon);

// Relative expected-risk gap between DCA and the uniform-exposure schedule at
// equal return exposure: (E[V^dca] - E[V^unit]) / E[V^unit] = (t-1)/(3(t+1)).
double dca_unit_risk_gap(std::int64_t t);

// The raw difference sigma2 (t+1)(t-1) / (12 t).
double dca_unit_risk_difference(std::int64_t t, double sigma2);

// ---------------------------------------------------------------------------
// Cross-sectional diversification template
// ---------------------------------------------------------------------------

// Symmetric covariance matrix in row-major storage.
struct CovarianceMatrix {
    int n = 0;
    std::vector<double> data; // n*n

    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * n + j]; }
};

// Var(U/A) = (1/A^2) (sum a^2 sigma^2 + 2 sum_{a<b} a_a a_b Cov). Validates
// dimensions and symmetry (tolerance 1e-9).
double cross_sectional_variance(std::span<const double> exposures,
                                const CovarianceMatrix& cov, double total_exposure);

// ---------------------------------------------------------------------------
// Bundled reports
// ---------------------------------------------------------------------------

// All closed-form moments available for this (process, schedule) pair.
MomentReport closed_form_report(const ProcessSpec& spec, const Schedule& schedule);

// Moments of ensemble averages over n_paths independent paths: means
// unchanged, variances divided by N.
MomentReport ensemble_moments(const ProcessSpec& spec, const Schedule& schedule,
                              std::uint64_t n_paths);

// Exact closed forms; available for finite-support processes paired with a
// schedule that carries an exact representation.
struct ExactMomentReport {
    std::optional<Rational> mean_u;
    std::optional<Rational> var_u;
    std::optional<Rational> mean_v;
    std::optional<Rational> var_v;
};

std::optional<ExactMomentReport> closed_form_report_exact(const ProcessSpec& spec,
                                                          const Schedule& schedule);

// ---------------------------------------------------------------------------
// AR(1) internals, exposed so the two algebraic forms can be cross-checked
// ---------------------------------------------------------------------------

// Lump-sum form 2 t sigma^4 + 4 sum_k (t-k) gamma(k)^2.
double ar1_var_v_lump(int t, double sigma2, double phi);

// General lag-grouped form 2 sum_k count_k(a) gamma(k)^2.
double ar1_var_v(const Schedule& schedule, double sigma2, double phi);

double ar1_var_u(const Schedule& schedule, double sigma2, double phi);

} // namespace pathwise::analytic
