#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "hoeffding/error.hpp"

namespace hoeffding {

/// Exact rational with arbitrary-precision numerator and denominator.
/// Expression templates are disabled so `auto` always yields a value.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

inline Integer numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

/// Integer power with the convention 0^0 = 1.
inline Rational pow(const Rational& base, int exponent) {
  if (exponent < 0) return Rational(1) / pow(base, -exponent);
  Rational out = 1;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

inline Integer binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  Integer out = 1;
  for (long i = 1; i <= k; ++i) {
    out *= n - k + i;
    out /= i;
  }
  return out;
}

/// Binomial coefficient that vanishes outside 0 <= k <= n, with n allowed negative.
inline Integer binomial_star(long n, long k) { return (n >= k && k >= 0) ? binomial(n, k) : Integer(0); }

inline Integer factorial(long n) {
  Integer out = 1;
  for (long i = 2; i <= n; ++i) out *= i;
  return out;
}

/// a!/b! for a >= b.
inline Integer falling_ratio(long a, long b) {
  Integer out = 1;
  for (long i = b + 1; i <= a; ++i) out *= i;
  return out;
}

/// x (x + step) ... (x + (k-1) step); the empty product is 1.
inline Rational generalized_rising(const Rational& x, const Rational& step, int k) {
  Rational out = 1;
  for (int j = 0; j < k; ++j) out *= x + step * j;
  return out;
}

inline Rational rising(const Rational& x, int k) { return generalized_rising(x, Rational(1), k); }

/// Parses "p/q", "p", "-p/q". Whitespace is not accepted.
inline Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view s) -> Integer {
    if (s.empty()) fail(ErrorKind::ParseError, "malformed rational '" + std::string(text) + "'");
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) fail(ErrorKind::ParseError, "malformed rational '" + std::string(text) + "'");
    for (std::size_t i = start; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9') fail(ErrorKind::ParseError, "malformed rational '" + std::string(text) + "'");
    }
    std::string digits(s[0] == '+' ? s.substr(1) : s);
    return Integer(digits);
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  Integer num = parse_int(text.substr(0, slash));
  Integer den = parse_int(text.substr(slash + 1));
  if (den == 0) fail(ErrorKind::ParseError, "zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

/// Canonical "p/q" form; integers print without a denominator.
inline std::string format_rational(const Rational& q) {
  if (is_integer(q)) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

/// Advisory decimal rendering with 12 significant digits.
inline std::string format_decimal(const Rational& q) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", q.convert_to<double>());
  return buf;
}

}  // namespace hoeffding
