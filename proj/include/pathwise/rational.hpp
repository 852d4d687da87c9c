#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace pathwise {

// Arbitrary-precision rational, used wherever inputs are exact fractions
// (finite-support processes, built-in schedules) so closed-form fixtures can
// be reproduced without rounding.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

double to_double(const Rational& r);

// Exact binary value of a finite double as a rational.
Rational rational_from_double(double x);

// Accepts "21", "-3.5", "7/12". Throws validation_error on anything else.
Rational parse_rational(std::string_view text);

// "35/2" for proper fractions, "21" for integers.
std::string format_rational(const Rational& r);

} // namespace pathwise
