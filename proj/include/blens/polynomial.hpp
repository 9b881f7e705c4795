#pragma once

#include <array>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "blens/rational.hpp"

// Sparse exact-rational polynomials. Poly3 is a trivariate Laurent
// polynomial in the variables (N, kappa, alpha); negative exponents are
// legal, which is what the duality substitution needs. Poly1 is a dense
// univariate helper.

namespace blens {

struct Poly3 {
  using Mono = std::array<int, 3>;  // exponents of (N, kappa, alpha)
  std::map<Mono, Rational> terms;

  static Poly3 constant(const Rational& c) {
    Poly3 p;
    p.add_term({0, 0, 0}, c);
    return p;
  }
  static Poly3 monomial(Mono m, const Rational& c) {
    Poly3 p;
    p.add_term(m, c);
    return p;
  }
  static Poly3 var_n() { return monomial({1, 0, 0}, 1); }
  static Poly3 var_kappa() { return monomial({0, 1, 0}, 1); }
  static Poly3 var_alpha() { return monomial({0, 0, 1}, 1); }

  void add_term(const Mono& m, const Rational& c) {
    if (c == 0) return;
    auto [it, inserted] = terms.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms.erase(it);
    }
  }

  bool is_zero() const { return terms.empty(); }

  int degree(int var) const {
    int d = 0;
    for (const auto& [m, c] : terms) d = std::max(d, m[var]);
    return d;
  }
  int min_degree(int var) const {
    if (terms.empty()) return 0;
    int d = terms.begin()->first[var];
    for (const auto& [m, c] : terms) d = std::min(d, m[var]);
    return d;
  }

  Poly3& operator+=(const Poly3& o) {
    for (const auto& [m, c] : o.terms) add_term(m, c);
    return *this;
  }
  Poly3& operator-=(const Poly3& o) {
    for (const auto& [m, c] : o.terms) add_term(m, -c);
    return *this;
  }
  friend Poly3 operator+(Poly3 a, const Poly3& b) { return a += b; }
  friend Poly3 operator-(Poly3 a, const Poly3& b) { return a -= b; }

  friend Poly3 operator*(const Poly3& a, const Poly3& b) {
    Poly3 r;
    for (const auto& [ma, ca] : a.terms)
      for (const auto& [mb, cb] : b.terms)
        r.add_term({ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]}, ca * cb);
    return r;
  }
  Poly3& operator*=(const Poly3& o) { return *this = *this * o; }
  Poly3& operator*=(const Rational& c) {
    if (c == 0) {
      terms.clear();
      return *this;
    }
    for (auto& [m, coef] : terms) coef *= c;
    return *this;
  }
  friend Poly3 operator*(Poly3 a, const Rational& c) { return a *= c; }

  Poly3 pow(int k) const {
    if (k < 0) throw std::invalid_argument("Poly3::pow: negative exponent");
    Poly3 acc = constant(1);
    Poly3 base = *this;
    while (k > 0) {
      if (k & 1) acc *= base;
      if (k >>= 1; k > 0) base *= base;
    }
    return acc;
  }

  /// Monomial-by-monomial rewrite; fn maps (mono, coeff) to (mono', coeff').
  Poly3 transform_monomials(
      const std::function<std::pair<Mono, Rational>(const Mono&, const Rational&)>& fn) const {
    Poly3 r;
    for (const auto& [m, c] : terms) {
      auto [m2, c2] = fn(m, c);
      r.add_term(m2, c2);
    }
    return r;
  }

  /// Slice by the exponent of one variable: the coefficient polynomial of
  /// var^e with that variable removed.
  Poly3 coefficient_of(int var, int e) const {
    Poly3 r;
    for (const auto& [m, c] : terms)
      if (m[var] == e) {
        Mono m2 = m;
        m2[var] = 0;
        r.add_term(m2, c);
      }
    return r;
  }

  Rational eval(const Rational& n, const Rational& kappa, const Rational& alpha) const {
    Rational s(0);
    for (const auto& [m, c] : terms)
      s += c * rational_pow(n, m[0]) * rational_pow(kappa, m[1]) * rational_pow(alpha, m[2]);
    return s;
  }

  double eval_double(double n, double kappa, double alpha) const {
    double s = 0.0;
    for (const auto& [m, c] : terms)
      s += to_double(c) * std::pow(n, m[0]) * std::pow(kappa, m[1]) * std::pow(alpha, m[2]);
    return s;
  }

  /// Canonical text form: terms ascending lexicographically by
  /// (deg N, deg kappa, deg alpha), coefficients as "num/den".
  std::string to_canonical_string() const {
    if (terms.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms) {
      if (!first) os << " + ";
      first = false;
      os << numerator(c) << "/" << denominator(c);
      static constexpr const char* names[3] = {"N", "kappa", "alpha"};
      for (int v = 0; v < 3; ++v) {
        if (m[v] == 0) continue;
        os << "*" << names[v];
        if (m[v] != 1) os << "^" << m[v];
      }
    }
    return os.str();
  }
};

/// Dense univariate polynomial, ascending coefficients.
struct Poly1 {
  std::vector<Rational> coeffs;  // coeffs[i] * x^i

  static Poly1 constant(const Rational& c) { return Poly1{{c}}; }

  void trim() {
    while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
  }
  int degree() const { return int(coeffs.size()) - 1; }

  friend Poly1 operator*(const Poly1& a, const Poly1& b) {
    if (a.coeffs.empty() || b.coeffs.empty()) return {};
    Poly1 r;
    r.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs.size(); ++j) r.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
    r.trim();
    return r;
  }

  Rational eval(const Rational& x) const {
    Rational s(0);
    for (std::size_t i = coeffs.size(); i-- > 0;) s = s * x + coeffs[i];
    return s;
  }
  double eval_double(double x) const {
    double s = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) s = s * x + to_double(coeffs[i]);
    return s;
  }

  std::string to_string(const std::string& var = "k") const {
    if (coeffs.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      if (coeffs[i] == 0) continue;
      if (!first) os << " + ";
      first = false;
      os << numerator(coeffs[i]) << "/" << denominator(coeffs[i]);
      if (i >= 1) {
        os << "*" << var;
        if (i > 1) os << "^" << i;
      }
    }
    return first ? "0" : os.str();
  }
};

}  // namespace blens
