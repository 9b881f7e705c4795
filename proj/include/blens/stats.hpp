#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace blens {

/// Pairwise summation; the reduction order is fixed by the data layout, so
/// results do not depend on thread count.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double m4 = 0.0;        // central fourth moment

  double se_mean() const { return n > 1 ? std::sqrt(variance / double(n)) : 0.0; }
  /// Delta-method standard error of the sample variance.
  double se_variance() const {
    if (n < 2) return 0.0;
    const double v = std::max(0.0, m4 - variance * variance);
    return std::sqrt(v / double(n));
  }
};

inline Summary summarize(std::span<const double> v) {
  Summary s;
  s.n = v.size();
  if (s.n == 0) return s;
  s.mean = pairwise_sum(v) / double(s.n);
  std::vector<double> c2(s.n), c4(s.n);
  for (std::size_t i = 0; i < s.n; ++i) {
    const double d = v[i] - s.mean;
    c2[i] = d * d;
    c4[i] = d * d * d * d;
  }
  const double ss = pairwise_sum(c2);
  s.variance = s.n > 1 ? ss / double(s.n - 1) : 0.0;
  s.m4 = pairwise_sum(c4) / double(s.n);
  return s;
}

/// Standard error of an arbitrary statistic by batch means: the replica list
/// is split into `batches` contiguous blocks and the statistic recomputed on
/// each block.
inline double batch_se(std::span<const double> v,
                       const std::function<double(std::span<const double>)>& statistic,
                       int batches = 20) {
  const std::size_t n = v.size();
  if (n < std::size_t(2 * batches)) batches = std::max<int>(2, int(n / 2));
  std::vector<double> vals;
  vals.reserve(batches);
  for (int b = 0; b < batches; ++b) {
    const std::size_t lo = n * b / batches, hi = n * (b + 1) / batches;
    vals.push_back(statistic(v.subspan(lo, hi - lo)));
  }
  const Summary s = summarize(vals);
  return std::sqrt(std::max(0.0, s.variance) / double(batches));
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
inline double ks_statistic(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = double(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    d = std::max(d, std::max(F - double(i) / n, double(i + 1) / n - F));
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::fabs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

/// Asymptotic Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{k-1}
/// exp(-2 k^2 lambda^2), with the usual finite-sample adjustment.
inline double ks_p_value(double d, std::size_t n) {
  const double sn = std::sqrt(double(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    p += term;
    if (std::fabs(term) < 1e-12) break;
    sign = -sign;
  }
  return std::clamp(2.0 * p, 0.0, 1.0);
}

/// Critical value of the two-sample KS statistic at significance level a
/// (c(0.01) = 1.628 in the classical table).
inline double ks_two_sample_critical(double c_alpha, std::size_t n, std::size_t m) {
  return c_alpha * std::sqrt((double(n) + double(m)) / (double(n) * double(m)));
}

}  // namespace blens
