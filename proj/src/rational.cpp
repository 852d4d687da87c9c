#include "pathwise/rational.hpp"

#include "pathwise/errors.hpp"

#include <cmath>
#include <cstdint>

namespace pathwise {

double to_double(const Rational& r) {
    return r.convert_to<double>();
}

Rational rational_from_double(double x) {
    if (!std::isfinite(x)) {
        throw validation_error("cannot convert non-finite value to rational");
    }
    if (x == 0.0) return Rational(0);
    int exp = 0;
    const double mant = std::frexp(x, &exp); // |mant| in [0.5, 1)
    const auto scaled = static_cast<std::int64_t>(std::ldexp(mant, 53)); // exact
    exp -= 53;
    Rational r(scaled);
    if (exp > 0) {
        r *= Rational(BigInt(1) << exp);
    } else if (exp < 0) {
        r /= Rational(BigInt(1) << -exp);
    }
    return r;
}

Rational parse_rational(std::string_view text) {
    auto fail = [&]() -> Rational {
        throw validation_error("cannot parse rational from '" + std::string(text) + "'");
    };
    if (text.empty()) return fail();

    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '+' || text[0] == '-') {
        negative = text[0] == '-';
        pos = 1;
    }
    if (pos >= text.size()) return fail();

    const auto slash = text.find('/', pos);
    if (slash != std::string_view::npos) {
        const auto num = text.substr(0, slash);
        const auto den = text.substr(slash + 1);
        if (num.empty() || den.empty() || den[0] == '-' || den[0] == '+') return fail();
        try {
            const BigInt n{std::string(num)};
            const BigInt d{std::string(den)};
            if (d == 0) throw validation_error("zero denominator in '" + std::string(text) + "'");
            return Rational(n, d);
        } catch (const validation_error&) {
            throw;
        } catch (const std::runtime_error&) {
            return fail();
        }
    }

    BigInt int_part = 0;
    BigInt frac_num = 0;
    BigInt frac_den = 1;
    bool saw_digit = false;
    bool in_fraction = false;
    for (std::size_t i = pos; i < text.size(); ++i) {
        const char c = text[i];
        if (c == '.') {
            if (in_fraction) return fail();
            in_fraction = true;
        } else if (c >= '0' && c <= '9') {
            saw_digit = true;
            if (in_fraction) {
                frac_num = frac_num * 10 + (c - '0');
                frac_den *= 10;
            } else {
                int_part = int_part * 10 + (c - '0');
            }
        } else {
            return fail();
        }
    }
    if (!saw_digit) return fail();

    Rational r = Rational(int_part) + Rational(frac_num, frac_den);
    return negative ? -r : r;
}

std::string format_rational(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

} // namespace pathwise
