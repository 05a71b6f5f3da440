#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace cbrm {

/// Exact rational over arbitrary-precision integers. Always normalised to
/// lowest terms with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Parses `[+-]digits[/digits]`. Surrounding whitespace is not accepted.
/// Throws Error(InvalidArgument) on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Fraction form, "n" for integers and "n/d" otherwise.
std::string to_fraction(const Rational& r);

double to_double(const Rational& r);

/// Six significant digits, trailing zeros kept ("7.00000", "0.111111").
std::string to_decimal(const Rational& r, int significant_digits = 6);

}  // namespace cbrm
