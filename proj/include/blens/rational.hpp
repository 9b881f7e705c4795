#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>

namespace blens {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact conversion; every finite double is a rational with a power-of-two
/// denominator.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite input");
  if (x == 0.0) return Rational(0);
  int exp2 = 0;
  const double frac = std::frexp(x, &exp2);
  const auto mantissa = std::llround(std::ldexp(frac, 53));  // |frac| in [0.5, 1)
  Rational r(mantissa);
  exp2 -= 53;
  Integer two_abs = Integer(1) << std::abs(exp2);
  if (exp2 >= 0)
    r *= Rational(two_abs);
  else
    r /= Rational(two_abs);
  return r;
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// q^e with integer e of either sign; negative e requires q != 0.
inline Rational rational_pow(const Rational& q, int e) {
  if (e == 0) return Rational(1);
  if (q == 0 && e < 0) throw std::domain_error("rational_pow: zero base, negative exponent");
  Rational base = e > 0 ? q : Rational(1) / q;
  int k = std::abs(e);
  Rational acc(1);
  while (k > 0) {
    if (k & 1) acc *= base;
    base *= base;
    k >>= 1;
  }
  return acc;
}

}  // namespace blens
