#pragma once

#include <cmath>
#include <cstdint>

namespace pathwise::rng {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// SplitMix64 step; used only to expand seeds into engine state.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman & Vigna). Small, fast, and good enough for
// verification-grade Monte Carlo.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed_state) noexcept {
        std::uint64_t sm = seed_state;
        s_[0] = splitmix64(sm);
        s_[1] = splitmix64(sm);
        s_[2] = splitmix64(sm);
        s_[3] = splitmix64(sm);
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// One independent draw stream per (seed, stream_index) pair. Streams are
// single-owner; parallel simulation hands each path its own stream so that
// results do not depend on scheduling order.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t stream_index) noexcept
        : eng_(mix_seed(seed, stream_index)) {}

    std::uint64_t next_u64() noexcept { return eng_.next(); }

    // Uniform on [0, 1).
    double uniform01() noexcept {
        return static_cast<double>(eng_.next() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() noexcept {
        return static_cast<double>((eng_.next() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via one-value Box-Muller.
    double gaussian() noexcept {
        const double u = uniform_pos();
        const double v = uniform01();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(kTwoPi * v);
    }

    // Student-t with nu degrees of freedom (Bailey's polar method, exact for
    // all nu > 0; reduces to Box-Muller as nu -> infinity).
    double student_t(double nu) noexcept {
        const double u = uniform_pos();
        const double v = uniform01();
        const double radial = nu * std::expm1(-2.0 / nu * std::log(u));
        return std::sqrt(radial) * std::cos(kTwoPi * v);
    }

private:
    static std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) noexcept {
        std::uint64_t sm = seed;
        const std::uint64_t base = splitmix64(sm);
        sm = base ^ (index * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL);
        return splitmix64(sm);
    }

    Xoshiro256pp eng_;
};

} // namespace pathwise::rng
