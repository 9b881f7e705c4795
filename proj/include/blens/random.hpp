#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

// Counter-based random streams (Philox4x32-10, cf. Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3", SC'11) plus the handful
// of samplers the matrix model needs: gamma, chi and Dirichlet.
//
// A stream is addressed by (master_seed, replica_index, stream_tag).
// Streams are value types; identical addresses reproduce identical draw
// sequences on any machine and thread count.

namespace blens {

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint32_t replica_index = 0;
  std::uint32_t stream_tag = 0;
};

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    const std::uint64_t p0 = std::uint64_t(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(kPhiloxM1) * ctr[2];
    const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

}  // namespace detail

/// One independent random stream. Draws are produced by encrypting an
/// incrementing 64-bit block counter; (replica_index, stream_tag) live in
/// the high counter words, the master seed is the cipher key.
class RandomStream {
 public:
  explicit RandomStream(const SeedSpec& s)
      : key_{std::uint32_t(s.master_seed), std::uint32_t(s.master_seed >> 32)},
        prefix_{s.replica_index, s.stream_tag} {}

  RandomStream(std::uint64_t master_seed, std::uint32_t replica_index = 0,
               std::uint32_t stream_tag = 0)
      : RandomStream(SeedSpec{master_seed, replica_index, stream_tag}) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) {
      block_ = detail::philox4x32_10(
          {std::uint32_t(counter_), std::uint32_t(counter_ >> 32), prefix_[0], prefix_[1]},
          key_);
      ++counter_;
      pos_ = 0;
    }
    return block_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  /// Uniform on the open interval (0,1); never returns an endpoint.
  double uniform() { return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 2> prefix_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int pos_ = 4;
};

/// Gamma(shape, scale 1), Marsaglia-Tsang squeeze method for shape >= 1;
/// shape < 1 is boosted through Gamma(a) = Gamma(a+1) * U^(1/a).
/// Values whose true magnitude falls below the smallest normal double are
/// flushed to it so that downstream chi entries stay strictly positive.
inline double sample_gamma(double shape, RandomStream& rng) {
  if (!(shape > 0.0)) throw std::invalid_argument("sample_gamma: shape must be > 0");
  if (shape < 1.0) {
    const double boosted = sample_gamma(shape + 1.0, rng);
    const double g = boosted * std::exp(std::log(rng.uniform()) / shape);
    return std::max(g, std::numeric_limits<double>::min());
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.normal();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

struct ChiParams {
  double dof;  // k > 0, fractional values allowed
};

/// Chi with k degrees of freedom, exactly sqrt(2 * Gamma(k/2)).
inline double sample_chi(ChiParams p, RandomStream& rng) {
  if (!(p.dof > 0.0)) throw std::invalid_argument("sample_chi: dof must be > 0");
  return std::sqrt(2.0 * sample_gamma(0.5 * p.dof, rng));
}

inline double sample_chi(double dof, RandomStream& rng) { return sample_chi(ChiParams{dof}, rng); }

/// Symmetric Dirichlet weights: n gamma draws renormalized to sum 1.
inline std::vector<double> sample_dirichlet(std::size_t n, double concentration,
                                            RandomStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_dirichlet: n must be >= 1");
  if (!(concentration > 0.0))
    throw std::invalid_argument("sample_dirichlet: concentration must be > 0");
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& wi : w) {
    wi = sample_gamma(concentration, rng);
    total += wi;
  }
  for (auto& wi : w) wi /= total;
  return w;
}

}  // namespace blens
