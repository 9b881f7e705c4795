#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "blens/random.hpp"
#include "blens/stats.hpp"

using namespace blens;

namespace {

std::vector<double> draw_many(const std::function<double(RandomStream&)>& sampler, int count,
                              std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<double> out(count);
  for (auto& x : out) x = sampler(rng);
  return out;
}

}  // namespace

TEST_CASE("philox matches the published known-answer vectors") {
  // Random123 kat_vectors, philox4x32 with 10 rounds.
  const auto z = detail::philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(z == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const auto f = detail::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                       {0xffffffffu, 0xffffffffu});
  CHECK(f == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  const auto pi = detail::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                        {0xa4093822u, 0x299f31d0u});
  CHECK(pi == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("identical seed spec reproduces identical sequences") {
  RandomStream a(SeedSpec{0xDEADBEEFu, 3, 7});
  RandomStream b(SeedSpec{0xDEADBEEFu, 3, 7});
  for (int i = 0; i < 1000; ++i) REQUIRE(a.next_u64() == b.next_u64());

  RandomStream c(SeedSpec{0xDEADBEEFu, 4, 7});
  RandomStream d(SeedSpec{0xDEADBEEFu, 3, 8});
  bool all_equal_c = true, all_equal_d = true;
  RandomStream a2(SeedSpec{0xDEADBEEFu, 3, 7});
  for (int i = 0; i < 100; ++i) {
    const auto ref = a2.next_u64();
    all_equal_c &= (c.next_u64() == ref);
    all_equal_d &= (d.next_u64() == ref);
  }
  CHECK_FALSE(all_equal_c);
  CHECK_FALSE(all_equal_d);
}

TEST_CASE("uniform stays strictly inside (0,1)") {
  RandomStream rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("gamma sampler first two moments match analytic values") {
  // mean = shape, variance = shape, at unit scale
  for (double shape : {0.3, 1.0, 2.5, 7.0}) {
    const int n = 100000;
    const auto x =
        draw_many([&](RandomStream& r) { return sample_gamma(shape, r); }, n, 101);
    const Summary s = summarize(x);
    CHECK(std::fabs(s.mean - shape) < 5.0 * std::sqrt(shape / n));
    CHECK(std::fabs(s.variance - shape) < 5.0 * s.se_variance());
  }
}

TEST_CASE("gamma mean over 1e6 draws at shape 1 within 4 standard errors") {
  const int n = 1000000;
  const auto x = draw_many([](RandomStream& r) { return sample_gamma(1.0, r); }, n, 102);
  const Summary s = summarize(x);
  CHECK(std::fabs(s.mean - 1.0) < 4.0 * std::sqrt(1.0 / n));
  CHECK(std::fabs(s.variance - 1.0) < 4.0 * s.se_variance());
}

TEST_CASE("tiny-shape gamma draws stay finite and positive") {
  // the beta = 0.01 regime needs shape 0.005
  const int n = 1000000;
  RandomStream rng(103);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = sample_gamma(0.005, rng);
    REQUIRE(std::isfinite(g));
    REQUIRE(g > 0.0);
    sum += g;
  }
  const double mean = sum / n;
  CHECK(std::fabs(mean - 0.005) < 4.0 * std::sqrt(0.005 / n));
}

TEST_CASE("chi moments") {
  const int n = 100000;
  SECTION("second moment at k = 2") {
    const auto x = draw_many([](RandomStream& r) { return sample_chi(2.0, r); }, n, 104);
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = x[i] * x[i];
    const Summary s = summarize(sq);
    CHECK(std::fabs(s.mean - 2.0) < 4.0 * s.se_mean());
  }
  SECTION("chi_k / sqrt(k) concentrates at 1 for huge k") {
    const auto x = draw_many(
        [](RandomStream& r) { return sample_chi(1e6, r) / std::sqrt(1e6); }, 20000, 105);
    const Summary s = summarize(x);
    CHECK(std::sqrt(s.variance) < 0.01);
    CHECK(std::fabs(s.mean - 1.0) < 0.001);
  }
  SECTION("first two moments across a dof grid with sub-unit values") {
    for (double k : {0.5, 3.0}) {
      const auto x = draw_many([&](RandomStream& r) { return sample_chi(k, r); }, n, 120);
      const Summary s = summarize(x);
      const double mean = std::sqrt(2.0) * std::tgamma(0.5 * (k + 1.0)) / std::tgamma(0.5 * k);
      CHECK(std::fabs(s.mean - mean) < 5.0 * s.se_mean());
      CHECK(std::fabs(s.variance - (k - mean * mean)) < 5.0 * s.se_variance());
    }
  }
  SECTION("half-normal variance at k = 1") {
    const auto x = draw_many([](RandomStream& r) { return sample_chi(1.0, r); }, n, 106);
    const Summary s = summarize(x);
    const double target = 1.0 - 2.0 / std::numbers::pi;
    CHECK(std::fabs(s.variance - target) < 4.0 * s.se_variance());
  }
}

TEST_CASE("chi squared and doubled gamma agree in distribution") {
  const int n = 10000;
  std::vector<double> chi2(n), two_gamma(n);
  RandomStream ra(107), rb(108);
  for (int i = 0; i < n; ++i) {
    const double c = sample_chi(3.0, ra);
    chi2[i] = c * c;
    two_gamma[i] = 2.0 * sample_gamma(1.5, rb);
  }
  const double d = ks_statistic_two_sample(chi2, two_gamma);
  CHECK(d < ks_two_sample_critical(1.628, n, n));  // 1% level
}

TEST_CASE("dirichlet weights") {
  SECTION("single weight is exactly one") {
    RandomStream rng(109);
    const auto w = sample_dirichlet(1, 0.7, rng);
    REQUIRE(w.size() == 1);
    CHECK(w[0] == 1.0);
  }
  SECTION("symmetric marginals have mean 1/n") {
    const int n = 100000;
    RandomStream rng(110);
    std::vector<double> first(n);
    for (int i = 0; i < n; ++i) {
      const auto w = sample_dirichlet(4, 0.5, rng);
      double total = 0.0;
      for (double wi : w) {
        REQUIRE(wi >= 0.0);
        total += wi;
      }
      CHECK(std::fabs(total - 1.0) < 1e-12);
      first[i] = w[0];
    }
    // w_1 ~ Beta(1/2, 3/2): var = (1/2)(3/2) / (4 * 3) = 1/16
    const Summary s = summarize(first);
    CHECK(std::fabs(s.mean - 0.25) < 4.0 * std::sqrt(1.0 / 16.0 / n));
  }
  SECTION("uniform simplex marginal is Beta(1,2)") {
    const int n = 100000;
    RandomStream rng(111);
    std::vector<double> first(n);
    for (int i = 0; i < n; ++i) first[i] = sample_dirichlet(3, 1.0, rng)[0];
    const double d =
        ks_statistic(first, [](double x) { return std::clamp(2.0 * x - x * x, 0.0, 1.0); });
    CHECK(d < 0.01);
  }
}

TEST_CASE("sampler parameter validation") {
  RandomStream rng(112);
  CHECK_THROWS_AS(sample_gamma(0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_gamma(-1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_chi(0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_dirichlet(0, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_dirichlet(3, 0.0, rng), std::invalid_argument);
}
