#include "judge/core/rational.hpp"

#include "judge/core/error.hpp"

#include <cctype>

namespace judge {

namespace {

BigInt pow10(int exponent) {
  BigInt result = 1;
  for (int i = 0; i < exponent; ++i) result *= 10;
  return result;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

/// Decimal digit string to integer. The library constructor would read a
/// leading zero as an octal prefix.
BigInt from_digits(std::string_view s) {
  BigInt result = 0;
  for (char c : s) result = result * 10 + (c - '0');
  return result;
}

}  // namespace

std::string to_decimal(const Rational& value, int fraction_digits) {
  const bool negative = value < 0;
  const Rational magnitude = negative ? Rational(-value) : value;
  const BigInt scale = pow10(fraction_digits);
  // floor(|v| * scale + 1/2)
  const BigInt num = boost::multiprecision::numerator(magnitude) * scale * 2 +
                     boost::multiprecision::denominator(magnitude);
  const BigInt den = boost::multiprecision::denominator(magnitude) * 2;
  const BigInt scaled = num / den;

  std::string digits = scaled.str();
  if (static_cast<int>(digits.size()) <= fraction_digits) {
    digits.insert(0, static_cast<std::size_t>(fraction_digits) + 1 - digits.size(), '0');
  }
  std::string out;
  if (negative && scaled != 0) out.push_back('-');
  out += digits.substr(0, digits.size() - static_cast<std::size_t>(fraction_digits));
  if (fraction_digits > 0) {
    out.push_back('.');
    out += digits.substr(digits.size() - static_cast<std::size_t>(fraction_digits));
  }
  return out;
}

std::string to_exact(const Rational& value) {
  const BigInt& den = boost::multiprecision::denominator(value);
  if (den == 1) return boost::multiprecision::numerator(value).str();
  return boost::multiprecision::numerator(value).str() + "/" + den.str();
}

Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> FormatError {
    return FormatError("not a rational number: '" + std::string(text) + "'");
  };
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational result;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    const auto num = body.substr(0, slash);
    const auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw fail();
    const BigInt d = from_digits(den);
    if (d == 0) throw fail();
    result = Rational(from_digits(num), d);
  } else {
    const auto dot = body.find('.');
    std::string_view whole = body.substr(0, dot);
    std::string_view frac = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw fail();
    if (!whole.empty() && !all_digits(whole)) throw fail();
    if (dot != std::string_view::npos && !frac.empty() && !all_digits(frac)) throw fail();
    if (dot != std::string_view::npos && frac.empty() && whole.empty()) throw fail();
    const BigInt w = whole.empty() ? BigInt(0) : from_digits(whole);
    const BigInt f = frac.empty() ? BigInt(0) : from_digits(frac);
    result = Rational(w) + Rational(f, pow10(static_cast<int>(frac.size())));
  }
  return negative ? Rational(-result) : result;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

}  // namespace judge
