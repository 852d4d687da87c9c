#include "pathwise/analytic.hpp"

#include "pathwise/errors.hpp"
#include "pathwise/numeric.hpp"

#include <cmath>
#include <variant>

namespace pathwise::analytic {

namespace {

// Lags with |gamma(k)| below this relative floor contribute nothing at double
// precision; AR(1) decay is geometric so the lag loops cut off early.
constexpr double kLagCutoff = 1e-24;

struct MomentOr {
    const Moments m;
    explicit MomentOr(const ProcessSpec& spec) : m(moments(spec)) {}

    double mean() const {
        if (!m.mu) throw moment_unavailable("process mean does not exist (nu <= 1)");
        return *m.mu;
    }
    double sigma2() const {
        if (!m.sigma2) throw moment_unavailable("process variance does not exist (nu <= 2)");
        return *m.sigma2;
    }
    double var_y() const {
        if (!m.var_y) {
            throw moment_unavailable("fourth moment does not exist (nu <= 4)");
        }
        return *m.var_y;
    }
};

int max_lag(int t, double phi) {
    if (phi == 0.0) return 0;
    const double decay = std::abs(phi);
    int k = t - 1;
    const double log_cut = std::log(kLagCutoff) / std::log(decay);
    if (log_cut < double(k)) k = static_cast<int>(log_cut) + 1;
    return k;
}

} // namespace

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::closed_form: return "closed-form";
        case Provenance::enumeration: return "enumeration";
        case Provenance::monte_carlo: return "monte-carlo";
    }
    return "?";
}

std::string to_string(Assumption a) {
    switch (a) {
        case Assumption::iid: return "iid";
        case Assumption::gaussian: return "gaussian";
        case Assumption::finite_fourth_moment: return "finite-fourth-moment";
        case Assumption::ar1: return "ar1";
    }
    return "?";
}

double expected_return(const ProcessSpec& spec, const Schedule& schedule) {
    return MomentOr(spec).mean() * measures(schedule).e1;
}

double expected_risk(const ProcessSpec& spec, const Schedule& schedule) {
    return MomentOr(spec).sigma2() * measures(schedule).e2;
}

double ar1_var_u(const Schedule& schedule, double sigma2, double phi) {
    const auto a = schedule.a();
    const int t = schedule.horizon();
    // Var(U) = sum_j sum_l a_j a_l gamma(j-l), grouped by lag.
    KahanSum acc;
    double diag = 0.0;
    {
        KahanSum s;
        for (double aj : a) s.add(aj * aj);
        diag = s.value();
    }
    acc.add(sigma2 * diag);
    const int kmax = max_lag(t, phi);
    double gamma_k = sigma2;
    for (int k = 1; k <= kmax; ++k) {
        gamma_k *= phi;
        KahanSum s;
        for (int j = 0; j + k < t; ++j) {
            s.add(a[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(j + k)]);
        }
        acc.add(2.0 * gamma_k * s.value());
    }
    return acc.value();
}

double ar1_var_v(const Schedule& schedule, double sigma2, double phi) {
    const auto a = schedule.a();
    const int t = schedule.horizon();
    // Isserlis: Var(V) = 2 sum_j sum_l a_j^2 a_l^2 gamma(j-l)^2, grouped by lag.
    KahanSum acc;
    {
        KahanSum s;
        for (double aj : a) {
            const double a2 = aj * aj;
            s.add(a2 * a2);
        }
        acc.add(2.0 * sigma2 * sigma2 * s.value());
    }
    const int kmax = max_lag(t, phi);
    double gamma_k = sigma2;
    for (int k = 1; k <= kmax; ++k) {
        gamma_k *= phi;
        const double g2 = gamma_k * gamma_k;
        KahanSum s;
        for (int j = 0; j + k < t; ++j) {
            const double aj2 = a[static_cast<std::size_t>(j)] * a[static_cast<std::size_t>(j)];
            const double al2 =
                a[static_cast<std::size_t>(j + k)] * a[static_cast<std::size_t>(j + k)];
            s.add(aj2 * al2);
        }
        acc.add(4.0 * g2 * s.value());
    }
    return acc.value();
}

double ar1_var_v_lump(int t, double sigma2, double phi) {
    if (t < 1) throw validation_error("horizon must be >= 1");
    KahanSum acc;
    acc.add(2.0 * double(t) * sigma2 * sigma2);
    const int kmax = max_lag(t, phi);
    double gamma_k = sigma2;
    for (int k = 1; k <= kmax; ++k) {
        gamma_k *= phi;
        acc.add(4.0 * double(t - k) * gamma_k * gamma_k);
    }
    return acc.value();
}

double var_cum_return(const ProcessSpec& spec, const Schedule& schedule) {
    const MomentOr m(spec);
    if (const auto* ar = std::get_if<Ar1Gaussian>(&spec.value())) {
        return ar1_var_u(schedule, m.sigma2(), ar->phi);
    }
    return m.sigma2() * measures(schedule).e2;
}

double var_cum_risk(const ProcessSpec& spec, const Schedule& schedule) {
    const MomentOr m(spec);
    if (const auto* ar = std::get_if<Ar1Gaussian>(&spec.value())) {
        return ar1_var_v(schedule, m.sigma2(), ar->phi);
    }
    return m.var_y() * measures(schedule).e4;
}

double var_normalized_return(const ProcessSpec& spec, const Schedule& schedule) {
    const double e1 = measures(schedule).e1;
    if (!(e1 > 0.0)) throw validation_error("var_normalized_return: e1 must be > 0");
    return var_cum_return(spec, schedule) / (e1 * e1);
}

Annualized annualized(const ProcessSpec& spec, int horizon) {
    if (horizon < 1) throw validation_error("annualized: horizon must be >= 1");
    const MomentOr m(spec);
    const Schedule s = lump_sum(horizon);
    const auto em = measures(s);
    // Divide the exposure by t first: e1/t and e2/t are exactly 1 in the
    // lump-sum context, so the horizon cancels exactly.
    const double a_return = m.mean() * (em.e1 / double(horizon));
    const double a_risk = std::sqrt(m.sigma2() * (em.e2 / double(horizon)));
    return Annualized{a_return, a_risk, a_return / a_risk};
}

double dca_unit_risk_gap(std::int64_t t) {
    if (t < 1) throw validation_error("dca_unit_risk_gap: horizon must be >= 1");
    return double(t - 1) / (3.0 * double(t + 1));
}

double dca_unit_risk_difference(std::int64_t t, double sigma2) {
    if (t < 1) throw validation_error("dca_unit_risk_difference: horizon must be >= 1");
    return sigma2 * double(t + 1) * double(t - 1) / (12.0 * double(t));
}

double cross_sectional_variance(std::span<const double> exposures,
                                const CovarianceMatrix& cov, double total_exposure) {
    const int n = static_cast<int>(exposures.size());
    if (cov.n != n || cov.data.size() != static_cast<std::size_t>(n) * n) {
        throw validation_error("cross_sectional_variance: dimension mismatch");
    }
    if (!(total_exposure > 0.0)) {
        throw validation_error("cross_sectional_variance: total exposure must be > 0");
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(cov.at(i, j) - cov.at(j, i)) > 1e-9) {
                throw validation_error("cross_sectional_variance: covariance matrix not symmetric");
            }
        }
    }
    KahanSum acc;
    for (int i = 0; i < n; ++i) acc.add(exposures[i] * exposures[i] * cov.at(i, i));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            acc.add(2.0 * exposures[i] * exposures[j] * cov.at(i, j));
        }
    }
    return acc.value() / (total_exposure * total_exposure);
}

MomentReport closed_form_report(const ProcessSpec& spec, const Schedule& schedule) {
    const Moments m = moments(spec);
    const auto em = measures(schedule);

    MomentReport rep;
    rep.provenance = Provenance::closed_form;

    const auto* ar = std::get_if<Ar1Gaussian>(&spec.value());
    if (ar != nullptr) {
        rep.assumptions = {Assumption::ar1, Assumption::gaussian};
    } else {
        rep.assumptions = {Assumption::iid};
        if (spec.is_gaussian_family()) rep.assumptions.insert(Assumption::gaussian);
    }

    if (m.mu) {
        rep.mean_u = *m.mu * em.e1;
    } else {
        rep.unavailable.emplace_back("E[U]", "process mean does not exist (nu <= 1)");
    }

    if (m.sigma2) {
        rep.mean_v = *m.sigma2 * em.e2;
        rep.var_u = ar ? ar1_var_u(schedule, *m.sigma2, ar->phi) : *m.sigma2 * em.e2;
    } else {
        rep.unavailable.emplace_back("Var(U)", "process variance does not exist (nu <= 2)");
        rep.unavailable.emplace_back("E[V]", "process variance does not exist (nu <= 2)");
    }

    if (ar != nullptr) {
        rep.var_v = ar1_var_v(schedule, *m.sigma2, ar->phi);
    } else if (m.var_y) {
        rep.var_v = *m.var_y * em.e4;
        if (!spec.is_gaussian_family()) rep.assumptions.insert(Assumption::finite_fourth_moment);
    } else {
        rep.unavailable.emplace_back("Var(V)", "fourth moment does not exist (nu <= 4)");
    }

    return rep;
}

MomentReport ensemble_moments(const ProcessSpec& spec, const Schedule& schedule,
                              std::uint64_t n_paths) {
    if (n_paths < 1) throw validation_error("ensemble_moments: n_paths must be >= 1");
    MomentReport rep = closed_form_report(spec, schedule);
    if (rep.var_u) rep.var_u = *rep.var_u / double(n_paths);
    if (rep.var_v) rep.var_v = *rep.var_v / double(n_paths);
    return rep;
}

std::optional<ExactMomentReport> closed_form_report_exact(const ProcessSpec& spec,
                                                          const Schedule& schedule) {
    if (!spec.is_discrete() || !schedule.a_exact()) return std::nullopt;
    const MomentsExact m = moments_exact(spec.as_discrete());
    const auto em = measures_exact(schedule);

    ExactMomentReport rep;
    rep.mean_u = m.mu * em->e1;
    rep.var_u = m.sigma2 * em->e2;
    rep.mean_v = m.sigma2 * em->e2;
    rep.var_v = m.var_y * em->e4;
    return rep;
}

} // namespace pathwise::analytic
