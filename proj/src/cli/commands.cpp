#include "pathwise/cli/commands.hpp"

#include "pathwise/analytic.hpp"
#include "pathwise/cli/report.hpp"
#include "pathwise/errors.hpp"
#include "pathwise/montecarlo.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <optional>

namespace pathwise::cli {

namespace {

std::string assumptions_label(const std::set<analytic::Assumption>& as) {
    std::string out;
    for (const auto a : as) {
        if (!out.empty()) out += '|';
        out += analytic::to_string(a);
    }
    return out;
}

// Prefer the exact fraction when rational output is requested and available.
std::string value_cell(std::optional<double> v, const std::optional<Rational>& exact,
                       bool rational_mode) {
    if (!v) return "NA";
    if (rational_mode && exact) return format_rational(*exact);
    return format_value(*v);
}

struct AnalyticRow {
    std::string quantity;
    std::optional<double> value;
    std::optional<Rational> exact;
    std::string assumptions;
    std::string note;
};

std::vector<AnalyticRow> analytic_rows(const ProcessSpec& spec, const Schedule& schedule) {
    const auto rep = analytic::closed_form_report(spec, schedule);
    const auto exact = analytic::closed_form_report_exact(spec, schedule);
    const auto em = measures(schedule);
    const auto emx = measures_exact(schedule);
    const auto m = moments(spec);
    const std::string as = assumptions_label(rep.assumptions);

    auto reason_for = [&rep](const std::string& q) -> std::string {
        for (const auto& [quantity, reason] : rep.unavailable) {
            if (quantity == q) return reason;
        }
        return "closed form unavailable";
    };

    std::vector<AnalyticRow> rows;
    auto push = [&rows, &reason_for](const std::string& q, std::optional<double> v,
                                     std::optional<Rational> x, std::string assumptions) {
        AnalyticRow r{q, v, std::move(x), std::move(assumptions), ""};
        if (!v) r.note = reason_for(q);
        rows.push_back(std::move(r));
    };

    const std::optional<Rational> no_exact;
    push("E[U]", rep.mean_u, exact ? exact->mean_u : no_exact, as);
    push("E[V]", rep.mean_v, exact ? exact->mean_v : no_exact, as);
    push("Var(U)", rep.var_u, exact ? exact->var_u : no_exact, as);
    push("Var(V)", rep.var_v, exact ? exact->var_v : no_exact, as);

    if (rep.var_u && em.e1 > 0.0) {
        std::optional<Rational> xnorm;
        if (exact && exact->var_u && emx) xnorm = *exact->var_u / (emx->e1 * emx->e1);
        rows.push_back({"Var(U/E1)", *rep.var_u / (em.e1 * em.e1), xnorm, as, ""});
    } else {
        rows.push_back({"Var(U/E1)", std::nullopt, std::nullopt, as,
                        rep.var_u ? "return exposure is zero" : reason_for("Var(U)")});
    }

    rows.push_back({"E_time", em.e_time, emx ? std::optional(emx->e_time) : no_exact, "", ""});
    rows.push_back({"E1", em.e1, emx ? std::optional(emx->e1) : no_exact, "", ""});
    rows.push_back({"E2", em.e2, emx ? std::optional(emx->e2) : no_exact, "", ""});
    rows.push_back({"E4", em.e4, emx ? std::optional(emx->e4) : no_exact, "", ""});

    // Annualized quantities are per-period process constants (lump-sum context).
    if (m.mu && m.sigma2) {
        const auto ann = analytic::annualized(spec, schedule.horizon());
        rows.push_back({"a_return", ann.a_return, std::nullopt, "", ""});
        rows.push_back({"a_risk", ann.a_risk, std::nullopt, "", ""});
        rows.push_back({"rr", ann.rr, std::nullopt, "", ""});
    } else {
        const std::string why = !m.mu ? "process mean does not exist (nu <= 1)"
                                      : "process variance does not exist (nu <= 2)";
        rows.push_back({"a_return", m.mu, std::nullopt, "", m.mu ? "" : why});
        rows.push_back({"a_risk", std::nullopt, std::nullopt, "", why});
        rows.push_back({"rr", std::nullopt, std::nullopt, "", why});
    }
    return rows;
}

int cmd_analytic(const RunConfig& cfg, std::ostream& out) {
    const ProcessSpec spec = parse_process(cfg.process);
    const Schedule schedule = parse_schedule(cfg.schedule, cfg.allow_leverage);

    ReportWriter w(out, cfg.output == "json", canonical_config(cfg),
                   {"quantity", "value", "assumptions", "note"});
    for (const auto& row : analytic_rows(spec, schedule)) {
        w.add_row({row.quantity, value_cell(row.value, row.exact, cfg.rational),
                   row.assumptions, row.note});
    }
    return 0;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const ProcessSpec spec = parse_process(cfg.process);
    const Schedule schedule = parse_schedule(cfg.schedule, cfg.allow_leverage);

    mc::EnsembleConfig ec;
    ec.n_paths = cfg.paths;
    ec.horizon = schedule.horizon();
    ec.seed = cfg.seed;
    ec.workers = cfg.workers;
    ec.dump_file = cfg.dump_paths_file;
    const auto est = mc::run_ensemble(spec, schedule, ec);

    ReportWriter w(out, cfg.output == "json", canonical_config(cfg),
                   {"quantity", "estimate", "std_error"});
    auto row = [&w](const char* q, const mc::Estimate& e) {
        w.add_row({q, format_value(e.value), format_value(e.std_error)});
    };
    row("E[U]", est.mean_u);
    row("Var(U)", est.var_u);
    row("E[V]", est.mean_v);
    row("Var(V)", est.var_v);
    return 0;
}

bool enumeration_feasible(const ProcessSpec& spec, int t) {
    if (!spec.is_discrete()) return false;
    const auto n = static_cast<std::uint64_t>(spec.as_discrete().values.size());
    std::uint64_t total = 1;
    for (int i = 0; i < t; ++i) {
        if (total > kDefaultEnumerationCap / n) return false;
        total *= n;
    }
    return true;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const ProcessSpec spec = parse_process(cfg.process);
    const Schedule schedule = parse_schedule(cfg.schedule, cfg.allow_leverage);

    const bool feasible = enumeration_feasible(spec, schedule.horizon());
    if (cfg.exact && !feasible) {
        throw validation_error("--exact needs a discrete process within the enumeration cap");
    }

    std::vector<mc::VerificationResult> results;
    if (feasible) {
        results = mc::enumerate_verify(spec, schedule);
    } else {
        mc::EnsembleConfig ec;
        ec.n_paths = cfg.paths;
        ec.horizon = schedule.horizon();
        ec.seed = cfg.seed;
        ec.workers = cfg.workers;
        ec.dump_file = cfg.dump_paths_file;
        results = mc::verify(spec, schedule, ec, cfg.z_max);
    }

    ReportWriter w(out, cfg.output == "json", canonical_config(cfg),
                   {"quantity", "analytic", "estimate", "std_error", "z", "status", "note"});
    bool any_fail = false;
    for (const auto& r : results) {
        std::string status = r.skipped ? "skip" : (r.pass ? "pass" : "fail");
        if (!r.skipped && !r.pass) any_fail = true;
        if (r.skipped) {
            w.add_row({r.quantity, "NA", "NA", "NA", "NA", status, r.reason});
        } else {
            w.add_row({r.quantity, format_value(r.analytic), format_value(r.estimate),
                       format_value(r.std_error), format_value(r.z_score), status, r.reason});
        }
    }
    return any_fail ? 1 : 0;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out) {
    const ProcessSpec spec = parse_process(cfg.process);
    if (cfg.schedules.empty()) {
        throw validation_error("compare needs --schedules (e.g. lump,dca,unit)");
    }
    const auto horizons = parse_horizon_range(cfg.horizon_range);
    const auto m = moments(spec);

    bool with_gap = false;
    {
        bool has_dca = false;
        bool has_unit = false;
        for (const auto& s : cfg.schedules) {
            if (s == "dca") has_dca = true;
            if (s == "unit") has_unit = true;
        }
        with_gap = has_dca && has_unit;
    }

    ReportWriter w(out, cfg.output == "json", canonical_config(cfg),
                   {"schedule", "t", "e1", "e2", "ev", "ev_per_e2", "var_u_norm", "rr", "gap"});

    for (const std::int64_t t : horizons) {
        for (const auto& name : cfg.schedules) {
            const Schedule s = schedule_for_horizon(name, static_cast<int>(t), cfg.allow_leverage);
            const auto em = measures(s);

            std::string ev = "NA";
            std::string ev_per_e2 = "NA";
            std::string var_u_norm = "NA";
            std::string rr = "NA";
            if (m.sigma2) {
                const double risk = analytic::expected_risk(spec, s);
                ev = format_value(risk);
                ev_per_e2 = format_value(risk / em.e2);
                if (em.e1 > 0.0) {
                    var_u_norm = format_value(analytic::var_normalized_return(spec, s));
                }
                if (m.mu) {
                    rr = format_value(analytic::annualized(spec, static_cast<int>(t)).rr);
                }
            }
            const std::string gap =
                with_gap ? format_value(analytic::dca_unit_risk_gap(t)) : std::string();

            w.add_row({s.label(), std::to_string(t), format_value(em.e1), format_value(em.e2),
                       ev, ev_per_e2, var_u_norm, rr, gap});
        }
    }
    return 0;
}

int cmd_enumerate(const RunConfig& cfg, std::ostream& out) {
    const ProcessSpec spec = parse_process(cfg.process);
    const Schedule schedule = parse_schedule(cfg.schedule, cfg.allow_leverage);
    if (!spec.is_discrete()) {
        throw validation_error("enumerate needs a discrete process");
    }

    ReportWriter w(out, cfg.output == "json", canonical_config(cfg),
                   {"quantity", "value", "provenance"});

    if (schedule.a_exact()) {
        const auto ex = mc::enumerate_moments_exact(spec, schedule);
        auto cell = [&cfg](const Rational& r) {
            return cfg.rational ? format_rational(r) : format_value(to_double(r));
        };
        w.add_row({"E[U]", cell(ex.mean_u), "enumeration"});
        w.add_row({"Var(U)", cell(ex.var_u), "enumeration"});
        w.add_row({"E[V]", cell(ex.mean_v), "enumeration"});
        w.add_row({"Var(V)", cell(ex.var_v), "enumeration"});
    } else {
        const auto en = mc::enumerate_moments(spec, schedule);
        w.add_row({"E[U]", format_value(en.mean_u), "enumeration"});
        w.add_row({"Var(U)", format_value(en.var_u), "enumeration"});
        w.add_row({"E[V]", format_value(en.mean_v), "enumeration"});
        w.add_row({"Var(V)", format_value(en.var_v), "enumeration"});
    }
    return 0;
}

} // namespace

int run_command(const RunConfig& cfg, std::ostream& out) {
    if (cfg.output != "csv" && cfg.output != "json") {
        throw validation_error("--output must be csv or json");
    }
    if (cfg.command == "compare") {
        if (cfg.horizon_range.empty()) throw validation_error("compare needs --t");
    } else if (cfg.schedule.empty()) {
        throw validation_error(cfg.command + " needs --schedule");
    }
    if (cfg.command == "analytic") return cmd_analytic(cfg, out);
    if (cfg.command == "simulate") return cmd_simulate(cfg, out);
    if (cfg.command == "verify") return cmd_verify(cfg, out);
    if (cfg.command == "compare") return cmd_compare(cfg, out);
    if (cfg.command == "enumerate") return cmd_enumerate(cfg, out);
    throw validation_error("unknown command '" + cfg.command + "'");
}

} // namespace pathwise::cli
