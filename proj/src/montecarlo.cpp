#include "pathwise/montecarlo.hpp"

#include "pathwise/errors.hpp"
#include "pathwise/numeric.hpp"
#include "pathwise/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>
#include <variant>

namespace pathwise::mc {

namespace {

// Fixed block partition: results are merged in block order, so estimates are
// invariant to worker count and scheduling.
constexpr std::uint64_t kBlockSize = 8192;

struct BlockAccumulators {
    MomentAccumulator u;
    MomentAccumulator v;
};

double center_mu(const ProcessSpec& spec) {
    // V is centered at the process location parameter; for every variant this
    // equals the mean whenever the mean exists.
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IidDiscrete>) {
                return to_double(moments_exact(v).mu);
            } else {
                return v.mu;
            }
        },
        spec.value());
}

int resolve_workers(int hint) {
    if (hint > 0) return hint;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace

// ---------------------------------------------------------------------------
// MomentAccumulator
// ---------------------------------------------------------------------------

void MomentAccumulator::add(double x) noexcept {
    // Pebay one-pass central moment updates.
    const double n1 = double(n_);
    ++n_;
    const double n = double(n_);
    const double delta = x - m1_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    m1_ += delta_n;
    m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ - 4.0 * delta_n * m3_;
    m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term1;
}

void MomentAccumulator::merge(const MomentAccumulator& other) noexcept {
    if (other.n_ == 0) return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double na = double(n_);
    const double nb = double(other.n_);
    const double nc = na + nb;
    const double delta = other.m1_ - m1_;
    const double delta2 = delta * delta;
    const double delta3 = delta2 * delta;
    const double delta4 = delta2 * delta2;

    const double m1 = (na * m1_ + nb * other.m1_) / nc;
    const double m2 = m2_ + other.m2_ + delta2 * na * nb / nc;
    const double m3 = m3_ + other.m3_ + delta3 * na * nb * (na - nb) / (nc * nc) +
                      3.0 * delta * (na * other.m2_ - nb * m2_) / nc;
    const double m4 = m4_ + other.m4_ +
                      delta4 * na * nb * (na * na - na * nb + nb * nb) / (nc * nc * nc) +
                      6.0 * delta2 * (na * na * other.m2_ + nb * nb * m2_) / (nc * nc) +
                      4.0 * delta * (na * other.m3_ - nb * m3_) / nc;

    n_ += other.n_;
    m1_ = m1;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
}

double MomentAccumulator::variance() const noexcept {
    return n_ >= 2 ? m2_ / double(n_ - 1) : 0.0;
}

double MomentAccumulator::central_moment4() const noexcept {
    return n_ >= 1 ? m4_ / double(n_) : 0.0;
}

double MomentAccumulator::mean_std_error() const noexcept {
    return n_ >= 2 ? std::sqrt(variance() / double(n_)) : 0.0;
}

double MomentAccumulator::variance_std_error() const noexcept {
    if (n_ < 2) return 0.0;
    const double biased_var = m2_ / double(n_);
    const double spread = central_moment4() - biased_var * biased_var;
    return spread > 0.0 ? std::sqrt(spread / double(n_)) : 0.0;
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

analytic::MomentReport EnsembleEstimates::report() const {
    analytic::MomentReport rep;
    rep.provenance = analytic::Provenance::monte_carlo;
    rep.mean_u = mean_u.value;
    rep.var_u = var_u.value;
    rep.mean_v = mean_v.value;
    rep.var_v = var_v.value;
    return rep;
}

EnsembleEstimates run_ensemble(const ProcessSpec& spec, const Schedule& schedule,
                               const EnsembleConfig& config) {
    if (config.n_paths < 2) {
        throw validation_error("run_ensemble: variance estimates need at least 2 paths");
    }
    if (config.horizon != schedule.horizon()) {
        throw validation_error("run_ensemble: horizon must equal schedule length");
    }
    const int t = schedule.horizon();
    const std::uint64_t n = config.n_paths;
    const double mu = center_mu(spec);
    const PathSampler sampler(spec);
    const std::span<const double> a = schedule.a();

    const std::uint64_t n_blocks = (n + kBlockSize - 1) / kBlockSize;
    std::vector<BlockAccumulators> blocks(n_blocks);
    std::atomic<std::uint64_t> next_block{0};

    auto worker_fn = [&]() {
        std::vector<double> buf(static_cast<std::size_t>(t));
        for (;;) {
            const std::uint64_t b = next_block.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) break;
            BlockAccumulators& acc = blocks[b];
            const std::uint64_t begin = b * kBlockSize;
            const std::uint64_t end = std::min(n, begin + kBlockSize);
            for (std::uint64_t i = begin; i < end; ++i) {
                rng::Stream stream(config.seed, i);
                sampler.generate(t, stream, buf.data());
                const WeightedSums ws = weighted_sums(buf, a, mu);
                acc.u.add(ws.u);
                acc.v.add(ws.v);
            }
        }
    };

    const int n_workers = resolve_workers(config.workers);
    if (n_workers <= 1) {
        worker_fn();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) threads.emplace_back(worker_fn);
        for (auto& th : threads) th.join();
    }

    MomentAccumulator u;
    MomentAccumulator v;
    for (const auto& blk : blocks) {
        u.merge(blk.u);
        v.merge(blk.v);
    }

    if (!config.dump_file.empty()) {
        // Regenerate sequentially so the dump is path-ordered and costs no
        // memory during simulation.
        std::ofstream out(config.dump_file, std::ios::binary);
        if (!out) throw validation_error("cannot open dump file: " + config.dump_file);
        out << "path_index,step,return\n";
        std::vector<double> buf(static_cast<std::size_t>(t));
        char cell[64];
        for (std::uint64_t i = 0; i < n; ++i) {
            rng::Stream stream(config.seed, i);
            sampler.generate(t, stream, buf.data());
            for (int j = 0; j < t; ++j) {
                std::snprintf(cell, sizeof(cell), "%llu,%d,%.17g\n",
                              static_cast<unsigned long long>(i), j + 1, buf[size_t(j)]);
                out << cell;
            }
        }
    }

    EnsembleEstimates est;
    est.n_paths = n;
    est.mean_u = {u.mean(), u.mean_std_error()};
    est.var_u = {u.variance(), u.variance_std_error()};
    est.mean_v = {v.mean(), v.mean_std_error()};
    est.var_v = {v.variance(), v.variance_std_error()};
    return est;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

namespace {

VerificationResult compare(std::string quantity, double analytic_value, double estimate,
                           double std_error, double z_max) {
    VerificationResult r;
    r.quantity = std::move(quantity);
    r.analytic = analytic_value;
    r.estimate = estimate;
    r.std_error = std_error;
    if (std_error > 0.0) {
        r.z_score = (estimate - analytic_value) / std_error;
        r.pass = std::abs(r.z_score) <= z_max;
    } else {
        r.z_score = 0.0;
        r.pass = estimate == analytic_value;
    }
    return r;
}

VerificationResult skip(std::string quantity, std::string reason) {
    VerificationResult r;
    r.quantity = std::move(quantity);
    r.skipped = true;
    r.pass = true;
    r.reason = std::move(reason);
    return r;
}

} // namespace

std::vector<VerificationResult> verify(const ProcessSpec& spec, const Schedule& schedule,
                                       const EnsembleConfig& config, double z_max) {
    const analytic::MomentReport rep = analytic::closed_form_report(spec, schedule);
    const EnsembleEstimates est = run_ensemble(spec, schedule, config);
    const double e1 = measures(schedule).e1;

    auto reason_for = [&rep](const char* q) -> std::string {
        for (const auto& [quantity, reason] : rep.unavailable) {
            if (quantity == q) return reason;
        }
        return "closed form unavailable";
    };

    std::vector<VerificationResult> out;
    out.reserve(5);

    if (rep.mean_u) {
        out.push_back(compare("E[U]", *rep.mean_u, est.mean_u.value, est.mean_u.std_error, z_max));
    } else {
        out.push_back(skip("E[U]", reason_for("E[U]")));
    }
    if (rep.var_u) {
        out.push_back(compare("Var(U)", *rep.var_u, est.var_u.value, est.var_u.std_error, z_max));
    } else {
        out.push_back(skip("Var(U)", reason_for("Var(U)")));
    }
    if (rep.mean_v) {
        out.push_back(compare("E[V]", *rep.mean_v, est.mean_v.value, est.mean_v.std_error, z_max));
    } else {
        out.push_back(skip("E[V]", reason_for("E[V]")));
    }
    if (rep.var_v) {
        out.push_back(compare("Var(V)", *rep.var_v, est.var_v.value, est.var_v.std_error, z_max));
    } else {
        out.push_back(skip("Var(V)", reason_for("Var(V)")));
    }
    if (rep.var_u && e1 > 0.0) {
        out.push_back(compare("Var(U/E1)", *rep.var_u / (e1 * e1), est.var_u.value / (e1 * e1),
                              est.var_u.std_error / (e1 * e1), z_max));
    } else if (!rep.var_u) {
        out.push_back(skip("Var(U/E1)", reason_for("Var(U)")));
    } else {
        out.push_back(skip("Var(U/E1)", "return exposure is zero"));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Enumeration oracle
// ---------------------------------------------------------------------------

EnumeratedMoments enumerate_moments(const ProcessSpec& spec, const Schedule& schedule,
                                    std::uint64_t cap) {
    const int t = schedule.horizon();
    const double mu = center_mu(spec);
    PathEnumeration e(spec, t, cap);

    KahanSum p_total;
    KahanSum eu;
    KahanSum eu2;
    KahanSum ev;
    KahanSum ev2;
    while (e.next()) {
        const double p = e.probability();
        const WeightedSums ws = weighted_sums(e.returns(), schedule.a(), mu);
        p_total.add(p);
        eu.add(p * ws.u);
        eu2.add(p * ws.u * ws.u);
        ev.add(p * ws.v);
        ev2.add(p * ws.v * ws.v);
    }
    if (std::abs(p_total.value() - 1.0) > 1e-9) {
        throw validation_error("enumeration probabilities do not sum to 1");
    }

    EnumeratedMoments out;
    out.mean_u = eu.value();
    out.var_u = eu2.value() - eu.value() * eu.value();
    out.mean_v = ev.value();
    out.var_v = ev2.value() - ev.value() * ev.value();
    return out;
}

ExactEnumeratedMoments enumerate_moments_exact(const ProcessSpec& spec, const Schedule& schedule,
                                               std::uint64_t cap) {
    const IidDiscrete& d = spec.as_discrete();
    const int t = schedule.horizon();

    std::vector<Rational> a;
    if (schedule.a_exact()) {
        a = *schedule.a_exact();
    } else {
        a.reserve(schedule.a().size());
        for (double x : schedule.a()) a.push_back(rational_from_double(x));
    }

    const Rational mu = moments_exact(d).mu;

    PathEnumeration e(spec, t, cap);
    Rational eu = 0;
    Rational eu2 = 0;
    Rational ev = 0;
    Rational ev2 = 0;
    while (e.next()) {
        const Rational p = e.exact_probability();
        Rational u = 0;
        Rational v = 0;
        const auto idx = e.indices();
        for (int j = 0; j < t; ++j) {
            const Rational& r = d.values[static_cast<std::size_t>(idx[j])];
            const Rational dev = r - mu;
            const std::size_t sj = static_cast<std::size_t>(j);
            u += a[sj] * r;
            v += a[sj] * a[sj] * dev * dev;
        }
        eu += p * u;
        eu2 += p * u * u;
        ev += p * v;
        ev2 += p * v * v;
    }

    ExactEnumeratedMoments out;
    out.mean_u = eu;
    out.var_u = eu2 - eu * eu;
    out.mean_v = ev;
    out.var_v = ev2 - ev * ev;
    return out;
}

std::vector<VerificationResult> enumerate_verify(const ProcessSpec& spec,
                                                 const Schedule& schedule, std::uint64_t cap,
                                                 double tol) {
    const analytic::MomentReport rep = analytic::closed_form_report(spec, schedule);

    EnumeratedMoments em;
    if (schedule.a_exact() || schedule.horizon() <= 16) {
        const ExactEnumeratedMoments ex = enumerate_moments_exact(spec, schedule, cap);
        em.mean_u = to_double(ex.mean_u);
        em.var_u = to_double(ex.var_u);
        em.mean_v = to_double(ex.mean_v);
        em.var_v = to_double(ex.var_v);
    } else {
        em = enumerate_moments(spec, schedule, cap);
    }

    auto row = [tol](const char* q, double analytic_value, double enumerated) {
        VerificationResult r;
        r.quantity = q;
        r.analytic = analytic_value;
        r.estimate = enumerated;
        r.std_error = 0.0;
        r.z_score = 0.0;
        r.pass = std::abs(enumerated - analytic_value) <= tol;
        return r;
    };

    std::vector<VerificationResult> out;
    out.reserve(4);
    out.push_back(row("E[U]", rep.mean_u.value_or(0.0), em.mean_u));
    out.push_back(row("Var(U)", rep.var_u.value_or(0.0), em.var_u));
    out.push_back(row("E[V]", rep.mean_v.value_or(0.0), em.mean_v));
    out.push_back(row("Var(V)", rep.var_v.value_or(0.0), em.var_v));
    return out;
}

} // namespace pathwise::mc
