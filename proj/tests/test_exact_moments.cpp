#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "blens/exact_moments.hpp"
#include "blens/limit_laws.hpp"
#include "blens/stats.hpp"

using namespace blens;

namespace {

// Expansion monomial helper: interleaved exponents (c1, d1, c2, d2, ...).
std::vector<std::uint8_t> mono(std::initializer_list<std::pair<int, int>> cs,
                               std::initializer_list<std::pair<int, int>> ds, int r) {
  std::vector<std::uint8_t> m(2 * (std::size_t(r) / 2 + 1), 0);
  for (auto [i, e] : cs) m[2 * (i - 1)] = std::uint8_t(e);
  for (auto [i, e] : ds) m[2 * (i - 1) + 1] = std::uint8_t(e);
  return m;
}

}  // namespace

TEST_CASE("chi-squared moment polynomial") {
  CHECK(exact::chi_squared_moment_poly(0).to_string() == "1/1");
  CHECK(exact::chi_squared_moment_poly(1).to_string() == "1/1*k");
  // k (k+2) (k+4) = 8k + 6k^2 + k^3
  const Poly1 p3 = exact::chi_squared_moment_poly(3);
  REQUIRE(p3.coeffs.size() == 4);
  CHECK(p3.coeffs[0] == 0);
  CHECK(p3.coeffs[1] == 8);
  CHECK(p3.coeffs[2] == 6);
  CHECK(p3.coeffs[3] == 1);

  // Monte Carlo cross-check at k = 5
  RandomStream rng(7);
  const int n = 200000;
  std::vector<double> cubes(n);
  for (auto& v : cubes) {
    const double x = 2.0 * sample_gamma(2.5, rng);  // chi-squared with 5 dof
    v = x * x * x;
  }
  const Summary s = summarize(cubes);
  CHECK(std::fabs(s.mean - p3.eval_double(5.0)) < 5.0 * s.se_mean());
}

TEST_CASE("symbolic expansions match the displayed formulas term for term") {
  using E = exact::Expansion;
  const E e1 = exact::moment11_expansion(1);
  CHECK(e1 == E{{mono({{1, 2}}, {}, 1), 1}});

  const E e2 = exact::moment11_expansion(2);
  CHECK(e2 == E{{mono({{1, 4}}, {}, 2), 1}, {mono({{1, 2}}, {{1, 2}}, 2), 1}});

  const E e3 = exact::moment11_expansion(3);
  CHECK(e3 == E{{mono({{1, 6}}, {}, 3), 1},
                {mono({{1, 4}}, {{1, 2}}, 3), 2},
                {mono({{1, 2}, {2, 2}}, {{1, 2}}, 3), 1},
                {mono({{1, 2}}, {{1, 4}}, 3), 1}});
}

TEST_CASE("expansion evaluates to the banded moment on numeric entries") {
  RandomStream rng(11);
  std::vector<double> c(6), d(5);
  for (auto& x : c) x = 0.3 + rng.uniform();
  for (auto& x : d) x = 0.3 + rng.uniform();
  const JacobiMatrix J = to_jacobi(c, d);
  for (int r = 1; r <= 6; ++r) {
    const double sym = exact::expansion_eval(exact::moment11_expansion(r), c, d);
    const double banded = moment_at_11(J, r);
    CHECK(std::fabs(sym - banded) <= 1e-12 * std::max(1.0, std::fabs(banded)));
  }
}

TEST_CASE("first moment polynomial is alpha + 1 + kappa (N - 1)") {
  const Poly3 m1 = exact::moment_poly(1);
  Poly3 expected;
  expected.add_term({0, 0, 0}, 1);
  expected.add_term({0, 0, 1}, 1);
  expected.add_term({0, 1, 0}, -1);
  expected.add_term({1, 1, 0}, 1);
  CHECK((m1 - expected).is_zero());
  CHECK(m1.to_canonical_string() == "1/1 + 1/1*alpha + -1/1*kappa + 1/1*N*kappa");
}

TEST_CASE("moment polynomial matches scaled-model monte carlo") {
  // m_1 at (N=2, kappa=1, alpha=0) is 2; sample the scaled model directly
  const Poly3 m1 = exact::moment_poly(1);
  CHECK(m1.eval(Rational(2), Rational(1), Rational(0)) == Rational(2));

  RandomStream rng(13);
  const int reps = 40000;
  std::vector<double> vals(reps);
  for (auto& v : vals) {
    const auto b = sample_bidiagonal_scaled(2, 1.0, 0.0, rng);
    v = moment_at_11(to_jacobi(b), 1);
  }
  const Summary s = summarize(vals);
  CHECK(std::fabs(s.mean - 2.0) < 5.0 * s.se_mean());
}

TEST_CASE("moment polynomial agrees with monte carlo at random admissible points") {
  RandomStream pick(17);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int r = 1 + int(pick.uniform() * 4.0);
    const int N = 2 + int(pick.uniform() * 6.0);
    const double kappa = 0.25 + 2.0 * pick.uniform();
    const double alpha = -0.5 + 3.0 * pick.uniform();
    const Poly3 m = exact::moment_poly(r);
    const double exact_mean = m.eval_double(N, kappa, alpha);

    RandomStream rng(900 + trial);
    const int reps = 20000;
    std::vector<double> vals(reps);
    for (auto& v : vals) {
      const auto b = sample_bidiagonal_scaled(N, kappa, alpha, rng);
      v = moment_at_11(to_jacobi(b), r);
    }
    const Summary s = summarize(vals);
    CHECK(std::fabs(s.mean - exact_mean) < 5.0 * s.se_mean());
    ++checked;
  }
  REQUIRE(checked == 20);
}

TEST_CASE("duality relation holds exactly") {
  CHECK(exact::verify_duality(0).holds);
  for (int r = 1; r <= 4; ++r) {
    const auto rep = exact::verify_duality(r);
    INFO("r = " << r << " residual = " << rep.residual.to_canonical_string());
    CHECK(rep.holds);
  }
}

TEST_CASE("moment polynomial degree stays within r in every variable") {
  for (int r = 1; r <= 4; ++r) {
    const Poly3 m = exact::moment_poly(r);
    for (int var : {0, 1, 2}) CHECK(m.degree(var) <= r);
    CHECK(m.min_degree(1) >= 0);
    CHECK(m.min_degree(2) >= 0);
  }
}

TEST_CASE("interpolation nodes do not affect the result") {
  for (int r : {2, 3}) {
    const Poly3 a = exact::moment_poly(r, exact::kDefaultMomentCap, 0);
    const Poly3 b = exact::moment_poly(r, exact::kDefaultMomentCap, 3);
    CHECK((a - b).is_zero());
  }
}

TEST_CASE("moment poly degree caps and argument validation") {
  CHECK_THROWS_AS(exact::moment_poly(9), std::invalid_argument);
  CHECK_THROWS_AS(exact::moment_poly(0), std::invalid_argument);
  CHECK_NOTHROW(exact::moment_poly(9, 10));
  CHECK_THROWS_AS(exact::mean_unscaled_moment(2, Rational(1), Rational(1), 1),
                  std::invalid_argument);
}

TEST_CASE("kappa limit against the D_N(a) gram matrix") {
  CHECK(exact::kappa_limit_check(1, 2.0, 3));  // leading coeff a + N - 1 = 4
  CHECK(exact::kappa_limit_check(2, 1.0, 4));
  CHECK(exact::kappa_limit_check(1, 0.7, 1));  // a on both sides
  CHECK(exact::kappa_limit_check(3, 1.5, 5));
}

TEST_CASE("unscaled mean moments") {
  SECTION("first moment is exactly one") {
    RandomStream pick(23);
    for (int trial = 0; trial < 10; ++trial) {
      const int N = 2 + int(pick.uniform() * 20.0);
      const Rational M = Rational(4 * N + 1 + int(pick.uniform() * 40.0), 4);
      const Rational beta = Rational(1 + int(pick.uniform() * 16.0), 8);
      CHECK(exact::mean_unscaled_moment(N, M, beta, 1) == Rational(1));
    }
  }
  SECTION("second moment closed form") {
    const int N = 7;
    const Rational M(31, 2), beta(3, 4);
    const Rational expected = Rational(1) + Rational(2) / (beta * M) + Rational(N - 1) / M;
    CHECK(exact::mean_unscaled_moment(N, M, beta, 2) == expected);
  }
  SECTION("second moment approaches 1 + gamma") {
    const int N = 1000;
    const Rational M(2 * N);  // gamma = 1/2
    const Rational beta(1);
    const double m2 = to_double(exact::mean_unscaled_moment(N, M, beta, 2));
    CHECK(std::fabs(m2 - 1.5) < 1e-3);
  }
  SECTION("high-temperature limit matches the nu moments") {
    const int N = 10000;
    const double c = 1.0, gamma = 0.5;
    const Rational M(2 * N);
    const Rational beta = Rational(2) * rational_from_double(c) / N;
    const NuLaw nu(gamma, c);
    for (int r = 1; r <= 4; ++r) {
      const double mean = to_double(exact::mean_unscaled_moment(N, M, beta, r));
      CHECK(std::fabs(mean - nu.moment(r)) < 1e-2);
    }
  }
}

TEST_CASE("unscaled mean expands in 1/(beta N) with controlled beta degree") {
  // with M = N / gamma, E[<mu_N, x^r>] = sum_k R_k(beta) / (beta N)^k and
  // deg R_k <= k; checked symbolically at gamma = 1/2 (2 gamma = 1).
  for (int r : {2, 3}) {
    const Poly3 m = exact::moment_poly(r);
    // reinterpret slots as (N, beta, unused): substitute kappa = beta/2,
    // alpha = (beta/2)(N + 1) - 1, then multiply by (2 gamma / (beta N))^r.
    Poly3 alpha_poly;
    alpha_poly.add_term({1, 1, 0}, Rational(1, 2));
    alpha_poly.add_term({0, 1, 0}, Rational(1, 2));
    alpha_poly.add_term({0, 0, 0}, Rational(-1));
    Poly3 total;
    for (const auto& [mm, coeff] : m.terms) {
      Poly3 term = Poly3::monomial({mm[0], mm[1], 0}, coeff * rational_pow(Rational(1, 2), mm[1]));
      term *= alpha_poly.pow(mm[2]);
      total += term;
    }
    total *= Poly3::monomial({-r, -r, 0}, Rational(1));  // (2 gamma)^r = 1 at gamma = 1/2
    const int lowest_n = total.min_degree(0);
    CHECK(total.degree(0) <= 0);
    for (int k = 0; k <= -lowest_n; ++k) {
      Poly3 rk = total.coefficient_of(0, -k);
      rk = rk.transform_monomials([k](const Poly3::Mono& mo, const Rational& c) {
        return std::make_pair(Poly3::Mono{mo[0], mo[1] + k, mo[2]}, c);
      });
      if (rk.is_zero()) continue;
      CHECK(rk.min_degree(1) >= 0);  // R_k is a polynomial in beta
      CHECK(rk.degree(1) <= k);      // of degree at most k
    }
  }
}

TEST_CASE("canonical polynomial text round trip properties") {
  const Poly3 zero;
  CHECK(zero.to_canonical_string() == "0");
  Poly3 p;
  p.add_term({2, 1, 0}, Rational(-3, 2));
  p.add_term({0, 0, 3}, Rational(5));
  CHECK(p.to_canonical_string() == "5/1*alpha^3 + -3/2*N^2*kappa");
}
