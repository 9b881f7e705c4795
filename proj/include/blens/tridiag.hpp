#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

// Symmetric tridiagonal (Jacobi) matrices: eigenvalues by implicit-shift QL
// with Wilkinson shifts (EISPACK tql lineage), spectral-measure weights by
// accumulating only the first row of the rotation product, and exact banded
// evaluation of (J^r)(1,1) and tr(J^r).

namespace blens {

struct JacobiMatrix {
  std::vector<double> diag;     // a_1..a_n
  std::vector<double> offdiag;  // b_1..b_{n-1}, positive for a proper Jacobi matrix

  std::size_t size() const { return diag.size(); }
};

/// Finite point measure: atoms ascending, nonnegative weights summing to 1.
/// Covers both the empirical distribution (uniform weights) and the spectral
/// measure (squared first eigenvector components).
struct PointMeasure {
  std::vector<double> atoms;
  std::vector<double> weights;
  int near_degenerate_pairs = 0;  // diagnostics: gaps below 1e-12 * ||J||

  double integrate(const std::function<double(double)>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) s += weights[i] * f(atoms[i]);
    return s;
  }

  double moment(int r) const {
    double s = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) s += weights[i] * std::pow(atoms[i], r);
    return s;
  }
};

class EigensolverError : public std::runtime_error {
 public:
  EigensolverError(const std::string& what, std::size_t index)
      : std::runtime_error(what), index(index) {}
  std::size_t index;
};

namespace detail {

inline double hypot_stable(double a, double b) {
  const double absa = std::fabs(a), absb = std::fabs(b);
  if (absa > absb) {
    const double t = absb / absa;
    return absa * std::sqrt(1.0 + t * t);
  }
  if (absb == 0.0) return 0.0;
  const double t = absa / absb;
  return absb * std::sqrt(1.0 + t * t);
}

// Implicit-shift QL sweep on (d, e). When first_row is non-null it must have
// length n and is updated as the first row of the accumulated rotation
// product, which is all the spectral measure needs.
inline void ql_implicit(std::vector<double>& d, std::vector<double>& e,
                        std::vector<double>* first_row, int max_sweeps_per_eigenvalue = 50) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e.resize(n);  // one scratch slot past the subdiagonal
  e[n - 1] = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == max_sweeps_per_eigenvalue)
          throw EigensolverError("ql_implicit: no convergence at eigenvalue index " +
                                     std::to_string(l),
                                 l);
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = hypot_stable(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t j = m; j-- > l;) {
          double f = s * e[j];
          const double b = c * e[j];
          r = hypot_stable(f, g);
          e[j + 1] = r;
          if (r == 0.0) {
            d[j + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[j + 1] - p;
          r = (d[j] - g) * s + 2.0 * c * b;
          p = s * r;
          d[j + 1] = g + p;
          g = c * r - b;
          if (first_row) {
            f = (*first_row)[j + 1];
            (*first_row)[j + 1] = s * (*first_row)[j] + c * f;
            (*first_row)[j] = c * (*first_row)[j] - s * f;
          }
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace detail

/// All eigenvalues, ascending.
inline std::vector<double> eigenvalues(const JacobiMatrix& J) {
  std::vector<double> d = J.diag;
  std::vector<double> e = J.offdiag;
  detail::ql_implicit(d, e, nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

/// Spectral measure of J: atoms are the eigenvalues, weights the squared
/// first components of the normalized eigenvectors.
inline PointMeasure spectral_weights(const JacobiMatrix& J) {
  const std::size_t n = J.size();
  std::vector<double> d = J.diag;
  std::vector<double> e = J.offdiag;
  std::vector<double> row(n, 0.0);
  if (n > 0) row[0] = 1.0;
  detail::ql_implicit(d, e, &row);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });

  PointMeasure mu;
  mu.atoms.resize(n);
  mu.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mu.atoms[i] = d[order[i]];
    mu.weights[i] = row[order[i]] * row[order[i]];
  }
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    scale = std::max({scale, std::fabs(J.diag[i]), i + 1 < n ? std::fabs(J.offdiag[i]) : 0.0});
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (mu.atoms[i + 1] - mu.atoms[i] < 1e-12 * scale) ++mu.near_degenerate_pairs;
  return mu;
}

/// J = B B^t for a lower-bidiagonal B: a_1 = c_1^2, a_i = c_i^2 + d_{i-1}^2,
/// b_i = c_i d_i.
inline JacobiMatrix to_jacobi(const std::vector<double>& diag, const std::vector<double>& sub) {
  if (diag.empty() || sub.size() + 1 != diag.size())
    throw std::invalid_argument("to_jacobi: need |sub| = |diag| - 1, |diag| >= 1");
  JacobiMatrix J;
  const std::size_t n = diag.size();
  J.diag.resize(n);
  J.offdiag.resize(n - 1);
  J.diag[0] = diag[0] * diag[0];
  for (std::size_t i = 1; i < n; ++i) J.diag[i] = diag[i] * diag[i] + sub[i - 1] * sub[i - 1];
  for (std::size_t i = 0; i + 1 < n; ++i) J.offdiag[i] = diag[i] * sub[i];
  return J;
}

/// Uniform-weight measure on a sorted eigenvalue list (the L_N of a sample).
inline PointMeasure empirical_measure(std::vector<double> eigs) {
  std::sort(eigs.begin(), eigs.end());
  PointMeasure mu;
  const std::size_t n = eigs.size();
  mu.atoms = std::move(eigs);
  mu.weights.assign(n, 1.0 / double(n));
  return mu;
}

/// (J^r)(1,1), evaluated exactly with banded vector iteration on the leading
/// (r+1)-block; no eigendecomposition. A length-r walk from the first row
/// cannot leave that block and return.
inline double moment_at_11(const JacobiMatrix& J, int r, int cap = 30) {
  if (r < 0) throw std::invalid_argument("moment_at_11: r must be >= 0");
  if (r > cap) throw std::invalid_argument("moment_at_11: r exceeds cap");
  const std::size_t n = std::min<std::size_t>(J.size(), std::size_t(r) + 1);
  if (n == 0) throw std::invalid_argument("moment_at_11: empty matrix");
  std::vector<double> v(n, 0.0), w(n, 0.0);
  v[0] = 1.0;
  for (int k = 0; k < r; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = J.diag[i] * v[i];
      if (i > 0) s += J.offdiag[i - 1] * v[i - 1];
      if (i + 1 < n && i < J.offdiag.size()) s += J.offdiag[i] * v[i + 1];
      w[i] = s;
    }
    std::swap(v, w);
  }
  return v[0];
}

/// tr(J^r) by banded matrix powers; exact in exact arithmetic, no eigensolve.
inline double trace_power(const JacobiMatrix& J, int r, int cap = 30) {
  if (r < 0) throw std::invalid_argument("trace_power: r must be >= 0");
  if (r > cap) throw std::invalid_argument("trace_power: r exceeds cap");
  const std::size_t n = J.size();
  if (r == 0) return double(n);
  // P holds J^k as a band, P[i][r + (j - i)] = (J^k)(i,j), |j - i| <= k.
  std::vector<std::vector<double>> P(n, std::vector<double>(2 * r + 1, 0.0)),
      Q(n, std::vector<double>(2 * r + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) P[i][r] = 1.0;
  for (int k = 0; k < r; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, std::ptrdiff_t(i) - (k + 1));
      const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, std::ptrdiff_t(i) + (k + 1));
      for (std::ptrdiff_t j = lo; j <= hi; ++j) {
        // (P J)(i,j) = P(i,j-1) b_{j-1} + P(i,j) a_j + P(i,j+1) b_j
        double s = P[i][r + (j - std::ptrdiff_t(i))] * J.diag[j];
        if (j > 0 && std::abs(j - 1 - std::ptrdiff_t(i)) <= r)
          s += P[i][r + (j - 1 - std::ptrdiff_t(i))] * J.offdiag[j - 1];
        if (j + 1 < std::ptrdiff_t(n) && std::abs(j + 1 - std::ptrdiff_t(i)) <= r)
          s += P[i][r + (j + 1 - std::ptrdiff_t(i))] * J.offdiag[j];
        Q[i][r + (j - std::ptrdiff_t(i))] = s;
      }
    }
    std::swap(P, Q);
  }
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) tr += P[i][r];
  return tr;
}

/// Partial sums of sum(1/b_n) with a divergence heuristic for the
/// moment-problem uniqueness condition. The flag is heuristic: divergent when
/// the tail terms decay no faster than ~1/n.
struct CarlemanReport {
  double partial_sum = 0.0;
  bool divergent = false;
  double min_tail_ratio = 0.0;  // min of n/b_n over the upper half of the range
};

inline CarlemanReport check_carleman(const std::function<double(int)>& offdiag_gen, int n_max) {
  if (n_max < 1) throw std::invalid_argument("check_carleman: n_max must be >= 1");
  CarlemanReport rep;
  rep.min_tail_ratio = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= n_max; ++n) {
    const double b = offdiag_gen(n);
    if (!(b > 0.0)) throw std::invalid_argument("check_carleman: offdiagonal must be positive");
    rep.partial_sum += 1.0 / b;
    if (n >= (n_max + 1) / 2) rep.min_tail_ratio = std::min(rep.min_tail_ratio, double(n) / b);
  }
  rep.divergent = rep.min_tail_ratio >= 0.01;
  return rep;
}

}  // namespace blens
