#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "blens/ensemble.hpp"
#include "blens/polynomial.hpp"
#include "blens/tridiag.hpp"

// Exact mean spectral moments of the scaled matrix model. The r-th moment
// m_r(N, kappa, alpha) = E[(J~_N)^r(1,1)] is assembled in three steps:
//   1. expand (J^r)(1,1) symbolically over the bidiagonal entries c_i, d_i;
//   2. take expectations monomial-wise (entries are independent, and every
//      exponent is even, so chi-squared moment products apply);
//   3. recover the polynomial dependence on the matrix size N by exact
//      Lagrange interpolation over integer sizes where no boundary is felt.

namespace blens::exact {

/// Symbolic expansion of (J^r)(1,1): monomial exponents over the variables
/// c_1..c_R, d_1..d_{R-1} (interleaved c_1, d_1, c_2, d_2, ...) mapped to
/// integer path counts.
using Expansion = std::map<std::vector<std::uint8_t>, long long>;

/// Rows beyond floor(r/2)+1 cannot be visited by a returning walk of length
/// r, so the expansion needs only that many rows (fewer if the matrix is
/// smaller).
inline Expansion moment11_expansion(int r, int n_rows = -1) {
  if (r < 0) throw std::invalid_argument("moment11_expansion: r must be >= 0");
  int rows = r / 2 + 1;
  if (n_rows > 0 && n_rows < rows) rows = n_rows;
  const std::size_t nvars = 2 * std::size_t(rows);
  const auto cvar = [](int i) { return 2 * std::size_t(i); };      // c_{i+1}
  const auto dvar = [](int i) { return 2 * std::size_t(i) + 1; };  // d_{i+1}

  std::vector<Expansion> state(rows), next(rows);
  state[0][std::vector<std::uint8_t>(nvars, 0)] = 1;

  const auto accumulate = [](Expansion& dst, const Expansion& src, std::size_t var1, int p1,
                             std::size_t var2, int p2) {
    for (const auto& [mono, coeff] : src) {
      std::vector<std::uint8_t> m = mono;
      m[var1] = std::uint8_t(m[var1] + p1);
      if (p2 > 0) m[var2] = std::uint8_t(m[var2] + p2);
      dst[m] += coeff;
    }
  };

  for (int step = 0; step < r; ++step) {
    for (auto& e : next) e.clear();
    for (int i = 0; i < rows; ++i) {
      if (state[i].empty()) continue;
      // diagonal a_i = c_i^2 (+ d_{i-1}^2 for i > 0)
      accumulate(next[i], state[i], cvar(i), 2, 0, 0);
      if (i > 0) accumulate(next[i], state[i], dvar(i - 1), 2, 0, 0);
      // offdiagonal b_i = c_i * d_i to rows i-1 and i+1
      if (i + 1 < rows) accumulate(next[i + 1], state[i], cvar(i), 1, dvar(i), 1);
      if (i > 0) accumulate(next[i - 1], state[i], cvar(i - 1), 1, dvar(i - 1), 1);
    }
    std::swap(state, next);
  }
  return state[0];
}

inline std::string expansion_to_string(const Expansion& e) {
  if (e.empty()) return "0";
  std::ostringstream os;
  bool first_term = true;
  for (const auto& [mono, coeff] : e) {
    if (!first_term) os << " + ";
    first_term = false;
    if (coeff != 1) os << coeff << " ";
    bool any = false;
    for (std::size_t v = 0; v < mono.size(); ++v) {
      if (mono[v] == 0) continue;
      if (any) os << " ";
      any = true;
      os << (v % 2 == 0 ? "c" : "d") << (v / 2 + 1);
      if (mono[v] != 1) os << "^" << int(mono[v]);
    }
    if (!any) os << "1";
  }
  return os.str();
}

/// Numeric evaluation of an expansion on given entry values (c 1-based by
/// position, d likewise); used to cross-check against banded moments.
inline double expansion_eval(const Expansion& e, const std::vector<double>& c,
                             const std::vector<double>& d) {
  double total = 0.0;
  for (const auto& [mono, coeff] : e) {
    double term = double(coeff);
    for (std::size_t v = 0; v < mono.size(); ++v) {
      if (mono[v] == 0) continue;
      const double base = (v % 2 == 0) ? c.at(v / 2) : d.at(v / 2);
      term *= std::pow(base, int(mono[v]));
    }
    total += term;
  }
  return total;
}

/// E[(chi^2_k)^m] = prod_{j=0}^{m-1} (k + 2j), as an exact polynomial in the
/// degrees of freedom k.
inline Poly1 chi_squared_moment_poly(int m) {
  if (m < 0) throw std::invalid_argument("chi_squared_moment_poly: m must be >= 0");
  Poly1 p = Poly1::constant(1);
  for (int j = 0; j < m; ++j) p = p * Poly1{{Rational(2 * j), Rational(1)}};
  return p;
}

inline constexpr int kDefaultMomentCap = 8;

/// m_r at a fixed integer matrix size: a bivariate polynomial in
/// (kappa, alpha). The scaled entries have c~_i^2 = chi^2_{2a+2+2k(N-i)} / 2
/// and d~_i^2 = chi^2_{2k(N-i)} / 2, so
///   E[(c~_i^2)^m] = prod_{j<m} (alpha + 1 + j + kappa (N-i)),
///   E[(d~_i^2)^m] = prod_{j<m} (j + kappa (N-i)).
inline Poly3 moment_poly_at(int r, int N) {
  if (N < 1) throw std::invalid_argument("moment_poly_at: N must be >= 1");
  const Expansion expansion = moment11_expansion(r, N);
  Poly3 result;
  for (const auto& [mono, coeff] : expansion) {
    Poly3 term = Poly3::constant(Rational(coeff));
    for (std::size_t v = 0; v < mono.size(); ++v) {
      if (mono[v] == 0) continue;
      if (mono[v] % 2 != 0)
        throw std::logic_error("moment_poly_at: odd exponent in a returning walk");
      const int i = int(v / 2) + 1;  // 1-based entry index
      const int m = mono[v] / 2;
      for (int j = 0; j < m; ++j) {
        Poly3 factor;
        if (v % 2 == 0) {
          factor.add_term({0, 0, 1}, 1);               // alpha
          factor.add_term({0, 0, 0}, Rational(1 + j));  // 1 + j
        } else {
          factor.add_term({0, 0, 0}, Rational(j));
        }
        factor.add_term({0, 1, 0}, Rational(N - i));  // kappa (N - i)
        term *= factor;
      }
    }
    result += term;
  }
  return result;
}

/// The exact moment polynomial m_r(N, kappa, alpha). The N-dependence is
/// reconstructed by Lagrange interpolation at N = r+1+node_offset, ...,
/// r+2 nodes in a region with no boundary effects; the result is independent
/// of node_offset (degree in N is at most r).
inline Poly3 moment_poly(int r, int cap = kDefaultMomentCap, int node_offset = 0) {
  if (r < 1) throw std::invalid_argument("moment_poly: r must be >= 1");
  if (r > cap) throw std::invalid_argument("moment_poly: r exceeds cap");
  const int n_nodes = r + 2;
  std::vector<int> nodes(n_nodes);
  for (int t = 0; t < n_nodes; ++t) nodes[t] = r + 1 + node_offset + t;

  Poly3 result;
  for (int t = 0; t < n_nodes; ++t) {
    Poly3 value = moment_poly_at(r, nodes[t]);
    Poly3 basis = Poly3::constant(1);
    Rational denom(1);
    for (int s = 0; s < n_nodes; ++s) {
      if (s == t) continue;
      Poly3 lin;
      lin.add_term({1, 0, 0}, 1);
      lin.add_term({0, 0, 0}, Rational(-nodes[s]));
      basis *= lin;
      denom *= Rational(nodes[t] - nodes[s]);
    }
    basis *= Rational(1) / denom;
    result += value * basis;
  }
  return result;
}

struct DualityReport {
  bool holds = false;
  Poly3 residual;
};

/// Checks m_r(N, kappa, alpha) = (-1)^r kappa^r m_r(-kappa N, 1/kappa,
/// -alpha/kappa) in exact arithmetic; the residual is identically zero when
/// the relation holds.
inline DualityReport verify_duality(int r, int cap = kDefaultMomentCap) {
  DualityReport rep;
  if (r == 0) {
    rep.holds = true;
    return rep;
  }
  const Poly3 m = moment_poly(r, cap);
  const Poly3 dual = m.transform_monomials([r](const Poly3::Mono& mono, const Rational& c) {
    // N^i kappa^j alpha^k -> (-kappa N)^i (1/kappa)^j (-alpha/kappa)^k,
    // then the whole sum is multiplied by (-1)^r kappa^r.
    const int i = mono[0], j = mono[1], k = mono[2];
    const Rational sign = ((i + k + r) % 2 == 0) ? Rational(1) : Rational(-1);
    return std::make_pair(Poly3::Mono{i, i - j - k + r, k}, sign * c);
  });
  rep.residual = dual - m;
  rep.holds = rep.residual.is_zero();
  return rep;
}

/// D_N(a): the kappa -> infinity limit of the rescaled bidiagonal model at
/// alpha = a kappa; lower bidiagonal with diag sqrt(a + N - i) and subdiag
/// sqrt(N - i).
struct DnMatrix {
  int n = 1;
  double a = 0.0;

  JacobiMatrix gram() const {
    std::vector<double> diag(n), sub(n - 1);
    for (int i = 1; i <= n; ++i) diag[i - 1] = std::sqrt(a + n - i);
    for (int i = 1; i < n; ++i) sub[i - 1] = std::sqrt(double(n - i));
    return to_jacobi(diag, sub);
  }
};

/// Leading kappa-coefficient of m_r(N, kappa, a kappa) against the numeric
/// (D_N(a) D_N(a)^t)^r (1,1).
inline bool kappa_limit_check(int r, double a, int N, double tol = 1e-10,
                              int cap = kDefaultMomentCap) {
  if (!(a > 0.0)) throw std::invalid_argument("kappa_limit_check: a must be > 0");
  const Poly3 m = moment_poly(r, cap);
  const Rational ra = rational_from_double(a);
  std::map<int, Rational> kappa_coeffs;  // degree in kappa after alpha = a kappa
  for (const auto& [mono, c] : m.terms)
    kappa_coeffs[mono[1] + mono[2]] +=
        c * rational_pow(Rational(N), mono[0]) * rational_pow(ra, mono[2]);
  for (const auto& [deg, coeff] : kappa_coeffs)
    if (deg > r && coeff != 0) return false;
  const double leading = kappa_coeffs.count(r) ? to_double(kappa_coeffs[r]) : 0.0;
  const double target = moment_at_11(DnMatrix{N, a}.gram(), r);
  return std::fabs(leading - target) <= tol * std::max(1.0, std::fabs(target));
}

/// Exact E[<L_N, x^r>] for the unscaled ensemble: evaluate m_r at
/// kappa = beta/2, alpha = kappa (M - N + 1) - 1 and undo the chi~ scaling,
/// J_N = (2 / (beta M)) J~_N.
inline Rational mean_unscaled_moment(int N, const Rational& M, const Rational& beta, int r,
                                     int cap = kDefaultMomentCap) {
  if (N < 1) throw std::invalid_argument("mean_unscaled_moment: N must be >= 1");
  if (!(beta > 0)) throw std::invalid_argument("mean_unscaled_moment: beta must be > 0");
  if (!(M > Rational(N - 1))) throw std::invalid_argument("mean_unscaled_moment: need M > N - 1");
  if (r == 0) return Rational(1);
  const Rational kappa = beta / 2;
  const Rational alpha = kappa * (M - N + 1) - 1;
  const Rational value = moment_poly(r, cap).eval(Rational(N), kappa, alpha);
  return value * rational_pow(Rational(2) / (beta * M), r);
}

inline Rational mean_unscaled_moment(const EnsembleParams& p, int r,
                                     int cap = kDefaultMomentCap) {
  p.validate();
  return mean_unscaled_moment(p.N, rational_from_double(p.M), rational_from_double(p.beta), r,
                              cap);
}

}  // namespace blens::exact
