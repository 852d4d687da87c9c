#pragma once

#include "pathwise/rational.hpp"
#include "pathwise/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pathwise {

// ---------------------------------------------------------------------------
// Stationary return-generating processes
// ---------------------------------------------------------------------------

struct IidGaussian {
    double mu = 0.0;
    double sigma = 1.0;
};

struct IidStudentT {
    double mu = 0.0;
    double scale = 1.0;
    double nu = 3.0;
};

// Finite-support i.i.d. process. Values and probabilities are kept as exact
// rationals so enumeration and closed-form fixtures stay exact.
struct IidDiscrete {
    std::vector<Rational> values;
    std::vector<Rational> probs;
};

// AR(1) with Gaussian innovations, parameterized by the *marginal* standard
// deviation: Var(R_t) = sigma^2 under stationarity, so the innovation
// variance is sigma^2 (1 - phi^2).
struct Ar1Gaussian {
    double mu = 0.0;
    double sigma = 1.0;
    double phi = 0.0;
};

class ProcessSpec {
public:
    using Variant = std::variant<IidGaussian, IidStudentT, IidDiscrete, Ar1Gaussian>;

    static ProcessSpec gaussian(double mu, double sigma);
    static ProcessSpec student_t(double mu, double scale, double nu);
    static ProcessSpec discrete(std::vector<Rational> values, std::vector<Rational> probs);
    static ProcessSpec discrete(const std::vector<double>& values,
                                const std::vector<double>& probs);
    static ProcessSpec ar1(double mu, double sigma, double phi);
    static ProcessSpec fair_die();
    static ProcessSpec coin(); // {-1, +1} with equal probability

    const Variant& value() const { return v_; }

    bool is_discrete() const { return std::holds_alternative<IidDiscrete>(v_); }
    bool is_ar1() const { return std::holds_alternative<Ar1Gaussian>(v_); }
    bool is_iid() const { return !is_ar1(); }
    bool is_gaussian_family() const {
        return std::holds_alternative<IidGaussian>(v_) || is_ar1();
    }

    const IidDiscrete& as_discrete() const;

    // Canonical "kind:key=value,..." string (stable; used in config echoes).
    std::string describe() const;

private:
    explicit ProcessSpec(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

// Closed-form per-period moments. Nonexistent moments are absent, not errors:
// Student-t loses the mean at nu <= 1, the variance at nu <= 2 and the fourth
// central moment at nu <= 4.
struct Moments {
    std::optional<double> mu;
    std::optional<double> sigma2;
    std::optional<double> fourth_central; // E[(R - mu)^4]
    std::optional<double> var_y;          // Var((R - mu)^2) = fourth_central - sigma2^2
};

Moments moments(const ProcessSpec& spec);

// Exact moments for finite-support processes (always all present).
struct MomentsExact {
    Rational mu;
    Rational sigma2;
    Rational fourth_central;
    Rational var_y;
};

MomentsExact moments_exact(const IidDiscrete& d);

// gamma(k) = Cov(R_t, R_{t+k}); gamma(0) = sigma2. Throws moment_unavailable
// when the variance does not exist.
double autocovariance(const ProcessSpec& spec, int k);

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

// Immutable sampling tables for one spec; shareable across threads, with one
// rng::Stream per concurrent path.
class PathSampler {
public:
    explicit PathSampler(const ProcessSpec& spec);

    int generator_kind() const { return kind_; }

    // Fills out[0..t) with one stationary path.
    void generate(int t, rng::Stream& stream, double* out) const;

private:
    enum Kind { kGaussian, kStudentT, kDiscrete, kAr1 };
    int kind_;
    double mu_ = 0.0;
    double sigma_ = 1.0;
    double nu_ = 0.0;
    double phi_ = 0.0;
    double innovation_sigma_ = 0.0;     // AR(1)
    std::vector<double> values_;        // discrete
    std::vector<double> cum_probs_;     // discrete
};

std::vector<double> sample_path(const ProcessSpec& spec, int t, rng::Stream& stream);

// ---------------------------------------------------------------------------
// Exact enumeration of finite-support paths
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

// Odometer over all |values|^t outcome paths of an IidDiscrete process.
//
//   PathEnumeration e(spec, t);
//   while (e.next()) { use(e.returns(), e.probability()); }
class PathEnumeration {
public:
    PathEnumeration(const ProcessSpec& spec, int t,
                    std::uint64_t cap = kDefaultEnumerationCap);

    std::uint64_t size() const { return size_; }

    bool next();

    std::span<const double> returns() const { return returns_; }
    std::span<const int> indices() const { return indices_; }

    double probability() const;          // product of per-step probs (double)
    Rational exact_probability() const;  // same, exact

private:
    const IidDiscrete* d_;
    int t_;
    std::uint64_t size_ = 0;
    std::uint64_t emitted_ = 0;
    std::vector<int> indices_;
    std::vector<double> returns_;
    std::vector<double> values_d_;
    std::vector<double> probs_d_;
};

} // namespace pathwise
