#pragma once

#include <cstddef>
#include <span>

namespace pathwise {

// Compensated (Kahan) accumulator. Long-horizon sums of small squares lose
// precision under plain accumulation, so all statistic sums use this.
class KahanSum {
public:
    void add(double x) noexcept {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const noexcept { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

inline double kahan_total(std::span<const double> xs) noexcept {
    KahanSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

} // namespace pathwise
