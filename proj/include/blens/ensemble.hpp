#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "blens/random.hpp"
#include "blens/tridiag.hpp"

// The bidiagonal matrix model: B has independent chi entries, diag
// c_i ~ chi_{beta(M-i+1)} / sqrt(beta M) and subdiag d_i ~ chi_{beta(N-i)} /
// sqrt(beta M); the eigenvalues of J = B B^t follow the beta-Laguerre law.

namespace blens {

struct EnsembleParams {
  int N = 1;          // particle count
  double M = 1.0;     // second parameter, must exceed N - 1
  double beta = 2.0;  // inverse-temperature-like parameter, > 0

  double gamma() const { return double(N) / M; }

  void validate() const {
    if (N < 1) throw std::invalid_argument("EnsembleParams: N must be >= 1");
    if (!(M > double(N) - 1.0)) throw std::invalid_argument("EnsembleParams: need M > N - 1");
    if (!(beta > 0.0)) throw std::invalid_argument("EnsembleParams: beta must be > 0");
  }
};

struct BidiagonalSample {
  std::vector<double> diag;  // c_1..c_N
  std::vector<double> sub;   // d_1..d_{N-1}
};

struct BidiagonalDofs {
  std::vector<double> diag;  // beta(M - i + 1)
  std::vector<double> sub;   // beta(N - i)
};

inline BidiagonalDofs bidiagonal_dofs(const EnsembleParams& p) {
  p.validate();
  BidiagonalDofs dofs;
  dofs.diag.resize(p.N);
  dofs.sub.resize(p.N - 1);
  for (int i = 1; i <= p.N; ++i) dofs.diag[i - 1] = p.beta * (p.M - i + 1);
  for (int i = 1; i < p.N; ++i) dofs.sub[i - 1] = p.beta * (p.N - i);
  return dofs;
}

inline BidiagonalSample sample_bidiagonal(const EnsembleParams& p, RandomStream& rng) {
  const BidiagonalDofs dofs = bidiagonal_dofs(p);
  const double scale = 1.0 / std::sqrt(p.beta * p.M);
  BidiagonalSample b;
  b.diag.resize(p.N);
  b.sub.resize(p.N - 1);
  for (int i = 0; i < p.N; ++i) b.diag[i] = scale * sample_chi(dofs.diag[i], rng);
  for (int i = 0; i + 1 < p.N; ++i) b.sub[i] = scale * sample_chi(dofs.sub[i], rng);
  return b;
}

/// The scaled model: entries chi~_k = chi_k / sqrt(2) with dofs
/// 2*alpha + 2 + 2*kappa*(N-i) on the diagonal and 2*kappa*(N-i) below.
/// Its eigenvalue density is |Delta|^(2 kappa) * prod x^alpha e^-x.
inline BidiagonalSample sample_bidiagonal_scaled(int N, double kappa, double alpha,
                                                 RandomStream& rng) {
  if (N < 1) throw std::invalid_argument("sample_bidiagonal_scaled: N must be >= 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("sample_bidiagonal_scaled: kappa must be > 0");
  if (!(alpha > -1.0)) throw std::invalid_argument("sample_bidiagonal_scaled: alpha must be > -1");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  BidiagonalSample b;
  b.diag.resize(N);
  b.sub.resize(N - 1);
  for (int i = 1; i <= N; ++i)
    b.diag[i - 1] = inv_sqrt2 * sample_chi(2.0 * alpha + 2.0 + 2.0 * kappa * (N - i), rng);
  for (int i = 1; i < N; ++i) b.sub[i - 1] = inv_sqrt2 * sample_chi(2.0 * kappa * (N - i), rng);
  return b;
}

inline JacobiMatrix to_jacobi(const BidiagonalSample& b) { return to_jacobi(b.diag, b.sub); }

inline JacobiMatrix sample_jacobi(const EnsembleParams& p, RandomStream& rng) {
  return to_jacobi(sample_bidiagonal(p, rng));
}

}  // namespace blens
