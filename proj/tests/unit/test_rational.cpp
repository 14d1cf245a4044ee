#include "doctest.h"

#include "judge/core/base64.hpp"
#include "judge/core/error.hpp"
#include "judge/core/rational.hpp"

#include <random>

using namespace judge;

namespace {

// Oracle for six-digit rendering: long division on machine integers.
std::string decimal_oracle(long long p, long long q) {
  const bool negative = (p < 0) != (q < 0) && p != 0;
  unsigned long long a = static_cast<unsigned long long>(p < 0 ? -p : p);
  unsigned long long b = static_cast<unsigned long long>(q < 0 ? -q : q);
  unsigned long long scaled_num = a * 1000000ull;
  unsigned long long whole = scaled_num / b;
  unsigned long long rem = scaled_num % b;
  if (2 * rem >= b) ++whole;
  std::string frac = std::to_string(whole % 1000000ull);
  frac.insert(0, 6 - frac.size(), '0');
  std::string out = std::to_string(whole / 1000000ull) + "." + frac;
  if (negative && whole != 0) out.insert(0, "-");
  return out;
}

}  // namespace

TEST_CASE("decimal rendering matches long division") {
  CHECK(to_decimal(Rational(1, 3)) == "0.333333");
  CHECK(to_decimal(Rational(2, 3)) == "0.666667");
  CHECK(to_decimal(Rational(100)) == "100.000000");
  CHECK(to_decimal(Rational(1, 2000000)) == "0.000001");
  CHECK(to_decimal(Rational(-1, 2000000)) == "-0.000001");
  CHECK(to_decimal(Rational(0)) == "0.000000");
  CHECK(to_decimal(Rational(7, 4), 2) == "1.75");
  CHECK(to_decimal(Rational(7, 4), 0) == "2");

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long long> num(-1000000000, 1000000000);
  std::uniform_int_distribution<long long> den(1, 1000000);
  for (int i = 0; i < 5000; ++i) {
    const long long p = num(rng), q = den(rng);
    CAPTURE(p);
    CAPTURE(q);
    REQUIRE(to_decimal(Rational(p, q)) == decimal_oracle(p, q));
  }
}

TEST_CASE("exact rendering round-trips") {
  CHECK(to_exact(Rational(6, 4)) == "3/2");
  CHECK(to_exact(Rational(-5)) == "-5");
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> num(-1000000000000, 1000000000000);
  std::uniform_int_distribution<long long> den(1, 1000000000);
  for (int i = 0; i < 2000; ++i) {
    Rational r(num(rng), den(rng));
    REQUIRE(parse_rational(to_exact(r)) == r);
  }
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("12") == 12);
  CHECK(parse_rational("-3") == -3);
  CHECK(parse_rational("2.50") == Rational(5, 2));
  CHECK(parse_rational(".5") == Rational(1, 2));
  CHECK(parse_rational("7/3") == Rational(7, 3));
  CHECK(parse_rational("0.000001") == Rational(1, 1000000));
  for (const char* bad : {"", "abc", "1/0", "1.2.3", "--1", "1/", "/2", " 1", "1e5"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_rational(bad), FormatError);
  }
}

TEST_CASE("base64 matches the RFC 4648 test vectors") {
  const std::pair<const char*, const char*> vectors[] = {
      {"", ""},         {"f", "Zg=="},         {"fo", "Zm8="},        {"foo", "Zm9v"},
      {"foob", "Zm9vYg=="}, {"fooba", "Zm9vYmE="}, {"foobar", "Zm9vYmFy"}};
  for (auto [plain, encoded] : vectors) {
    CHECK(base64_encode(plain) == encoded);
    CHECK(base64_decode(encoded) == plain);
  }
  std::string all;
  for (int c = 0; c < 256; ++c) all.push_back(static_cast<char>(c));
  CHECK(base64_decode(base64_encode(all)) == all);
  CHECK_THROWS_AS(base64_decode("Zm9v!"), FormatError);
}

TEST_CASE("leading zeros are decimal") {
  CHECK(parse_rational("127.016000") == Rational(127016, 1000));
  CHECK(parse_rational("010") == 10);
  CHECK(parse_rational("08/09") == Rational(8, 9));
  CHECK(parse_rational("0.000009") == Rational(9, 1000000));
}
