#include "pathwise/process.hpp"

#include "pathwise/errors.hpp"
#include "pathwise/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <utility>

namespace pathwise {

namespace {

std::string double_to_string(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void validate_discrete(const IidDiscrete& d) {
    if (d.values.empty()) {
        throw validation_error("discrete process needs at least one outcome");
    }
    if (d.values.size() != d.probs.size()) {
        throw validation_error("discrete process values/probs length mismatch");
    }
    Rational total = 0;
    for (const auto& p : d.probs) {
        if (p < 0) throw validation_error("discrete probabilities must be nonnegative");
        total += p;
    }
    const Rational dev = total - 1;
    if (boost::multiprecision::abs(dev) > Rational(1, 1000000000000LL)) {
        throw validation_error("discrete probabilities must sum to 1 (tolerance 1e-12)");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

ProcessSpec ProcessSpec::gaussian(double mu, double sigma) {
    if (!(sigma > 0.0)) throw validation_error("gaussian: sigma must be > 0");
    return ProcessSpec(IidGaussian{mu, sigma});
}

ProcessSpec ProcessSpec::student_t(double mu, double scale, double nu) {
    if (!(scale > 0.0)) throw validation_error("studentt: scale must be > 0");
    if (!(nu > 0.0)) throw validation_error("studentt: nu must be > 0");
    return ProcessSpec(IidStudentT{mu, scale, nu});
}

ProcessSpec ProcessSpec::discrete(std::vector<Rational> values, std::vector<Rational> probs) {
    IidDiscrete d{std::move(values), std::move(probs)};
    validate_discrete(d);
    return ProcessSpec(std::move(d));
}

ProcessSpec ProcessSpec::discrete(const std::vector<double>& values,
                                  const std::vector<double>& probs) {
    std::vector<Rational> v;
    std::vector<Rational> p;
    v.reserve(values.size());
    p.reserve(probs.size());
    for (double x : values) v.push_back(rational_from_double(x));
    for (double x : probs) p.push_back(rational_from_double(x));
    return discrete(std::move(v), std::move(p));
}

ProcessSpec ProcessSpec::ar1(double mu, double sigma, double phi) {
    if (!(sigma > 0.0)) throw validation_error("ar1: sigma must be > 0");
    if (!(std::abs(phi) < 1.0)) throw validation_error("ar1: |phi| < 1 required (weak stationarity)");
    return ProcessSpec(Ar1Gaussian{mu, sigma, phi});
}

ProcessSpec ProcessSpec::fair_die() {
    std::vector<Rational> v;
    std::vector<Rational> p;
    for (int k = 1; k <= 6; ++k) {
        v.emplace_back(k);
        p.emplace_back(Rational(1, 6));
    }
    return discrete(std::move(v), std::move(p));
}

ProcessSpec ProcessSpec::coin() {
    return discrete(std::vector<Rational>{Rational(-1), Rational(1)},
                    std::vector<Rational>{Rational(1, 2), Rational(1, 2)});
}

const IidDiscrete& ProcessSpec::as_discrete() const {
    const auto* d = std::get_if<IidDiscrete>(&v_);
    if (d == nullptr) throw unsupported_operation("operation requires a discrete process");
    return *d;
}

std::string ProcessSpec::describe() const {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IidGaussian>) {
                return "gaussian:mu=" + double_to_string(v.mu) +
                       ",sigma=" + double_to_string(v.sigma);
            } else if constexpr (std::is_same_v<T, IidStudentT>) {
                return "studentt:mu=" + double_to_string(v.mu) +
                       ",scale=" + double_to_string(v.scale) + ",nu=" + double_to_string(v.nu);
            } else if constexpr (std::is_same_v<T, Ar1Gaussian>) {
                return "ar1:mu=" + double_to_string(v.mu) + ",sigma=" + double_to_string(v.sigma) +
                       ",phi=" + double_to_string(v.phi);
            } else {
                std::string out = "discrete:values=";
                for (std::size_t i = 0; i < v.values.size(); ++i) {
                    if (i > 0) out += '|';
                    out += format_rational(v.values[i]);
                }
                out += ",probs=";
                for (std::size_t i = 0; i < v.probs.size(); ++i) {
                    if (i > 0) out += '|';
                    out += format_rational(v.probs[i]);
                }
                return out;
            }
        },
        v_);
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

MomentsExact moments_exact(const IidDiscrete& d) {
    Rational mean = 0;
    for (std::size_t i = 0; i < d.values.size(); ++i) mean += d.probs[i] * d.values[i];

    Rational m2 = 0;
    Rational m4 = 0;
    for (std::size_t i = 0; i < d.values.size(); ++i) {
        const Rational c = d.values[i] - mean;
        const Rational c2 = c * c;
        m2 += d.probs[i] * c2;
        m4 += d.probs[i] * c2 * c2;
    }
    return MomentsExact{mean, m2, m4, m4 - m2 * m2};
}

Moments moments(const ProcessSpec& spec) {
    return std::visit(
        [](const auto& v) -> Moments {
            using T = std::decay_t<decltype(v)>;
            Moments m;
            if constexpr (std::is_same_v<T, IidGaussian> || std::is_same_v<T, Ar1Gaussian>) {
                const double s2 = v.sigma * v.sigma;
                m.mu = v.mu;
                m.sigma2 = s2;
                m.fourth_central = 3.0 * s2 * s2;
                m.var_y = 2.0 * s2 * s2;
            } else if constexpr (std::is_same_v<T, IidStudentT>) {
                const double s2 = v.scale * v.scale;
                if (v.nu > 1.0) m.mu = v.mu;
                if (v.nu > 2.0) m.sigma2 = s2 * v.nu / (v.nu - 2.0);
                if (v.nu > 4.0) {
                    m.fourth_central =
                        3.0 * v.nu * v.nu / ((v.nu - 2.0) * (v.nu - 4.0)) * s2 * s2;
                    m.var_y = *m.fourth_central - *m.sigma2 * *m.sigma2;
                }
            } else {
                const MomentsExact e = moments_exact(v);
                m.mu = to_double(e.mu);
                m.sigma2 = to_double(e.sigma2);
                m.fourth_central = to_double(e.fourth_central);
                m.var_y = to_double(e.var_y);
            }
            return m;
        },
        spec.value());
}

double autocovariance(const ProcessSpec& spec, int k) {
    if (k < 0) throw validation_error("autocovariance: lag must be >= 0");
    const Moments m = moments(spec);
    if (!m.sigma2) {
        throw moment_unavailable("autocovariance: process variance does not exist");
    }
    if (k == 0) return *m.sigma2;
    if (const auto* ar = std::get_if<Ar1Gaussian>(&spec.value())) {
        return *m.sigma2 * std::pow(ar->phi, k);
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

PathSampler::PathSampler(const ProcessSpec& spec) {
    std::visit(
        [this](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, IidGaussian>) {
                kind_ = kGaussian;
                mu_ = v.mu;
                sigma_ = v.sigma;
            } else if constexpr (std::is_same_v<T, IidStudentT>) {
                kind_ = kStudentT;
                mu_ = v.mu;
                sigma_ = v.scale;
                nu_ = v.nu;
            } else if constexpr (std::is_same_v<T, Ar1Gaussian>) {
                kind_ = kAr1;
                mu_ = v.mu;
                sigma_ = v.sigma;
                phi_ = v.phi;
                innovation_sigma_ = v.sigma * std::sqrt(1.0 - v.phi * v.phi);
            } else {
                kind_ = kDiscrete;
                values_.reserve(v.values.size());
                cum_probs_.reserve(v.probs.size());
                double cum = 0.0;
                for (std::size_t i = 0; i < v.values.size(); ++i) {
                    values_.push_back(to_double(v.values[i]));
                    cum += to_double(v.probs[i]);
                    cum_probs_.push_back(cum);
                }
                cum_probs_.back() = 1.0; // guard the final bucket against rounding
            }
        },
        spec.value());
}

void PathSampler::generate(int t, rng::Stream& stream, double* out) const {
    switch (kind_) {
        case kGaussian:
            for (int i = 0; i < t; ++i) out[i] = mu_ + sigma_ * stream.gaussian();
            break;
        case kStudentT:
            for (int i = 0; i < t; ++i) out[i] = mu_ + sigma_ * stream.student_t(nu_);
            break;
        case kDiscrete:
            for (int i = 0; i < t; ++i) {
                const double u = stream.uniform01();
                const auto it = std::upper_bound(cum_probs_.begin(), cum_probs_.end(), u);
                const auto idx = std::min<std::size_t>(
                    static_cast<std::size_t>(it - cum_probs_.begin()), values_.size() - 1);
                out[i] = values_[idx];
            }
            break;
        case kAr1: {
            // Start from the stationary marginal so the path is exactly stationary.
            double x = sigma_ * stream.gaussian();
            out[0] = mu_ + x;
            for (int i = 1; i < t; ++i) {
                x = phi_ * x + innovation_sigma_ * stream.gaussian();
                out[i] = mu_ + x;
            }
            break;
        }
    }
}

std::vector<double> sample_path(const ProcessSpec& spec, int t, rng::Stream& stream) {
    if (t < 1) throw validation_error("sample_path: horizon must be >= 1");
    PathSampler sampler(spec);
    std::vector<double> out(static_cast<std::size_t>(t));
    sampler.generate(t, stream, out.data());
    return out;
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

PathEnumeration::PathEnumeration(const ProcessSpec& spec, int t, std::uint64_t cap)
    : d_(&spec.as_discrete()), t_(t) {
    if (t < 1) throw validation_error("enumerate_paths: horizon must be >= 1");

    const std::uint64_t n = d_->values.size();
    std::uint64_t total = 1;
    for (int i = 0; i < t; ++i) {
        if (total > cap / n) {
            throw size_limit_error("enumerate_paths: |values|^t exceeds cap");
        }
        total *= n;
    }
    size_ = total;

    values_d_.reserve(n);
    probs_d_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        values_d_.push_back(to_double(d_->values[i]));
        probs_d_.push_back(to_double(d_->probs[i]));
    }
    indices_.assign(static_cast<std::size_t>(t), 0);
    returns_.assign(static_cast<std::size_t>(t), values_d_[0]);
}

bool PathEnumeration::next() {
    if (emitted_ == size_) return false;
    if (emitted_ > 0) {
        // Odometer increment, least-significant digit last.
        int pos = t_ - 1;
        const int n = static_cast<int>(values_d_.size());
        while (pos >= 0) {
            if (++indices_[pos] < n) {
                returns_[pos] = values_d_[static_cast<std::size_t>(indices_[pos])];
                break;
            }
            indices_[pos] = 0;
            returns_[pos] = values_d_[0];
            --pos;
        }
    }
    ++emitted_;
    return true;
}

double PathEnumeration::probability() const {
    double p = 1.0;
    for (int idx : indices_) p *= probs_d_[static_cast<std::size_t>(idx)];
    return p;
}

Rational PathEnumeration::exact_probability() const {
    Rational p = 1;
    for (int idx : indices_) p *= d_->probs[static_cast<std::size_t>(idx)];
    return p;
}

} // namespace pathwise
