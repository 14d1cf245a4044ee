#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace judge {

/// Exact scores. Normalized scoring divides by per-instance bests
/// that change over time, so nothing on the scoring path is floating point.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Fixed-point rendering, rounded half away from zero.
std::string to_decimal(const Rational& value, int fraction_digits = 6);

/// Lossless rendering: "p" for integers, "p/q" otherwise.
std::string to_exact(const Rational& value);

/// Accepts integers ("12", "-3"), decimals ("2.50", ".5") and fractions
/// ("7/3"). Throws FormatError on anything else.
Rational parse_rational(std::string_view text);

double to_double(const Rational& value);

}  // namespace judge
