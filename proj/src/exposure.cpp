#include "pathwise/exposure.hpp"

#include "pathwise/errors.hpp"
#include "pathwise/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace pathwise {

namespace {

constexpr double kBudgetTolerance = 1e-12;

// Built-in schedules carry an exact rational mirror up to this horizon;
// beyond it only the double form is kept.
constexpr int kMaxExactHorizon = 200'000;

void require_horizon(int t) {
    if (t < 1) throw validation_error("schedule horizon must be >= 1");
}

} // namespace

Schedule::Schedule(std::vector<double> a, std::string label)
    : a_(std::move(a)), label_(std::move(label)) {
    validate();
    budget_matched_ = std::abs(a_.back() - 1.0) <= kBudgetTolerance;
}

Schedule::Schedule(std::vector<Rational> a_exact, std::string label)
    : label_(std::move(label)) {
    if (a_exact.empty()) throw validation_error("schedule must be non-empty");
    a_.reserve(a_exact.size());
    for (const auto& r : a_exact) a_.push_back(to_double(r));
    a_exact_ = std::move(a_exact);
    validate();
    budget_matched_ = a_exact_->back() == 1;
}

void Schedule::validate() const {
    if (a_.empty()) throw validation_error("schedule must be non-empty");
    double prev = 0.0;
    for (double aj : a_) {
        if (!std::isfinite(aj) || aj < 0.0) {
            throw validation_error("cumulative exposure must be finite and >= 0");
        }
        if (aj < prev) {
            throw validation_error("cumulative exposure must be non-decreasing");
        }
        prev = aj;
    }
    if (a_exact_) {
        Rational rprev = 0;
        for (const auto& r : *a_exact_) {
            if (r < rprev) throw validation_error("cumulative exposure must be non-decreasing");
            rprev = r;
        }
    }
}

std::vector<double> Schedule::weights() const {
    std::vector<double> w(a_.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) {
        w[i] = a_[i] - prev;
        prev = a_[i];
    }
    return w;
}

double Schedule::max_a() const {
    return a_.back(); // non-decreasing
}

Schedule lump_sum(int t) {
    require_horizon(t);
    if (t <= kMaxExactHorizon) {
        return Schedule(std::vector<Rational>(static_cast<std::size_t>(t), Rational(1)), "lump");
    }
    return Schedule(std::vector<double>(static_cast<std::size_t>(t), 1.0), "lump");
}

Schedule dca(int t) {
    require_horizon(t);
    if (t <= kMaxExactHorizon) {
        std::vector<Rational> a;
        a.reserve(static_cast<std::size_t>(t));
        for (int j = 1; j <= t; ++j) a.emplace_back(j, t);
        return Schedule(std::move(a), "dca");
    }
    std::vector<double> a(static_cast<std::size_t>(t));
    for (int j = 1; j <= t; ++j) a[static_cast<std::size_t>(j - 1)] = double(j) / double(t);
    return Schedule(std::move(a), "dca");
}

Schedule uniform_exposure(int t) {
    require_horizon(t);
    if (t <= kMaxExactHorizon) {
        const Rational c(t + 1, 2LL * t);
        return Schedule(std::vector<Rational>(static_cast<std::size_t>(t), c), "unit");
    }
    const double c = (double(t) + 1.0) / (2.0 * double(t));
    return Schedule(std::vector<double>(static_cast<std::size_t>(t), c), "unit");
}

Schedule last_period(int t) {
    require_horizon(t);
    if (t <= kMaxExactHorizon) {
        std::vector<Rational> a(static_cast<std::size_t>(t), Rational(0));
        a.back() = 1;
        return Schedule(std::move(a), "last");
    }
    std::vector<double> a(static_cast<std::size_t>(t), 0.0);
    a.back() = 1.0;
    return Schedule(std::move(a), "last");
}

Schedule custom(std::span<const double> weights) {
    if (weights.empty()) throw validation_error("custom schedule needs at least one weight");
    std::vector<Rational> w;
    w.reserve(weights.size());
    for (double x : weights) {
        if (!std::isfinite(x) || x < 0.0) {
            throw validation_error("custom schedule weights must be finite and >= 0");
        }
        w.push_back(rational_from_double(x));
    }
    return custom_exact(std::move(w));
}

Schedule custom_exact(std::vector<Rational> weights) {
    if (weights.empty()) throw validation_error("custom schedule needs at least one weight");
    std::vector<Rational> a;
    a.reserve(weights.size());
    Rational cum = 0;
    for (const auto& w : weights) {
        if (w < 0) throw validation_error("custom schedule weights must be >= 0");
        cum += w;
        a.push_back(cum);
    }
    return Schedule(std::move(a), "custom");
}

ExposureMeasures measures(const Schedule& s) {
    KahanSum e1;
    KahanSum e2;
    KahanSum e4;
    for (double aj : s.a()) {
        const double a2 = aj * aj;
        e1.add(aj);
        e2.add(a2);
        e4.add(a2 * a2);
    }
    // e_time from the weight form, independently of e1.
    const int t = s.horizon();
    KahanSum et;
    double prev = 0.0;
    for (int i = 1; i <= t; ++i) {
        const double aj = s.a()[static_cast<std::size_t>(i - 1)];
        et.add((aj - prev) * double(t - i + 1));
        prev = aj;
    }
    return ExposureMeasures{et.value(), e1.value(), e2.value(), e4.value()};
}

std::optional<ExactExposureMeasures> measures_exact(const Schedule& s) {
    if (!s.a_exact()) return std::nullopt;
    const auto& a = *s.a_exact();
    Rational e1 = 0;
    Rational e2 = 0;
    Rational e4 = 0;
    for (const auto& aj : a) {
        const Rational a2 = aj * aj;
        e1 += aj;
        e2 += a2;
        e4 += a2 * a2;
    }
    const int t = s.horizon();
    Rational et = 0;
    Rational prev = 0;
    for (int i = 1; i <= t; ++i) {
        const Rational& aj = a[static_cast<std::size_t>(i - 1)];
        et += (aj - prev) * (t - i + 1);
        prev = aj;
    }
    return ExactExposureMeasures{et, e1, e2, e4};
}

} // namespace pathwise
