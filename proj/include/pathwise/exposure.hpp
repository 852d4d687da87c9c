#pragma once

#include "pathwise/rational.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pathwise {

// An investment timing schedule stored as cumulative invested fractions
// a_1..a_t (the form every closed-form expression consumes); the per-period
// weights w_i = a_i - a_{i-1} are derived. The budget constraint sum(w) = 1
// is a flag rather than an invariant: the uniform-exposure schedule matches
// DCA's return exposure with total invested capital below 1. Leverage
// (a_j > 1) is allowed at the type level and policed by callers.
class Schedule {
public:
    Schedule(std::vector<double> a, std::string label = "custom");
    Schedule(std::vector<Rational> a_exact, std::string label = "custom");

    int horizon() const { return static_cast<int>(a_.size()); }
    std::span<const double> a() const { return a_; }
    const std::optional<std::vector<Rational>>& a_exact() const { return a_exact_; }
    const std::string& label() const { return label_; }

    std::vector<double> weights() const;
    bool budget_matched() const { return budget_matched_; } // |a_t - 1| <= 1e-12
    double max_a() const;

private:
    void validate() const;

    std::vector<double> a_;
    std::optional<std::vector<Rational>> a_exact_;
    std::string label_;
    bool budget_matched_ = false;
};

// Built-in schedules. All capital up front; evenly spread weights a_j = j/t;
// constant a_j = (t+1)/(2t) matching DCA's return exposure; everything in the
// final period.
Schedule lump_sum(int t);
Schedule dca(int t);
Schedule uniform_exposure(int t);
Schedule last_period(int t);

// Prefix sums of nonnegative weights. Throws validation_error on a negative
// weight.
Schedule custom(std::span<const double> weights);
Schedule custom_exact(std::vector<Rational> weights);

// e_time = sum w_i (t-i+1): time-integrated invested capital. Algebraically
// identical to e1 = sum a_j; computed independently from the weights so the
// identity stays a testable property. e2 = sum a_j^2 scales expected risk,
// e4 = sum a_j^4 scales the uncertainty of realized risk.
struct ExposureMeasures {
    double e_time;
    double e1;
    double e2;
    double e4;
};

ExposureMeasures measures(const Schedule& s);

struct ExactExposureMeasures {
    Rational e_time;
    Rational e1;
    Rational e2;
    Rational e4;
};

// Present when the schedule carries an exact representation.
std::optional<ExactExposureMeasures> measures_exact(const Schedule& s);

} // namespace pathwise
