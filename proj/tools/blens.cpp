// Command-line front end: sampling, limit-law tabulation, exact moments,
// duality checks, and the Monte Carlo experiment battery.
//
// Exit codes: 0 all enabled assertions passed, 1 assertion failures (a
// machine-readable failures.csv is written next to the reports), 2 usage or
// runtime error.

#include <CLI11.hpp>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "blens/ensemble.hpp"
#include "blens/exact_moments.hpp"
#include "blens/experiments.hpp"
#include "blens/io.hpp"
#include "blens/limit_laws.hpp"

namespace fs = std::filesystem;
using namespace blens;

namespace {

struct RunConfig {
  int n = 100;
  double m = 0.0;  // 0 -> derived as n / gamma
  double beta = 2.0;
  double gamma = 0.5;
  double c = 1.0;
  double alpha = 0.5;
  std::string regime = "fixed_beta";
  int replicas = 200;
  int rmax = 4;
  std::uint64_t seed = 12345;
  std::string out = ".";
  int threads = 0;
  bool svg = false;

  double derived_m() const { return m > 0.0 ? m : n / gamma; }

  EnsembleParams ensemble() const {
    EnsembleParams p{n, derived_m(), beta};
    p.validate();
    return p;
  }

  std::vector<int> schedule() const {
    std::vector<int> sizes;
    for (int d = 4; d >= 1; d /= 2) {
      const int nn = std::max(8, n / d);
      if (sizes.empty() || sizes.back() != nn) sizes.push_back(nn);
    }
    return sizes;
  }

  RegimeSpec make_regime() const {
    if (regime == "fixed_beta") return RegimeSpec::fixed_beta(gamma, beta, schedule());
    if (regime == "beta_n_to_infinity")
      return RegimeSpec::beta_n_to_infinity(gamma, beta, 0.5, schedule());
    if (regime == "high_temperature") return RegimeSpec::high_temperature(gamma, c, schedule());
    throw std::invalid_argument("unknown regime: " + regime);
  }
};

int report_failures(const std::vector<ExperimentReport>& reports, const fs::path& outdir) {
  std::size_t failures = 0;
  for (const auto& r : reports) failures += r.failures().size();
  if (failures == 0) return 0;
  io::CsvWriter w(outdir / "failures.csv", io::kReportHeader);
  for (const auto& r : reports)
    for (const auto& row : r.failures())
      w.row({row.step, (long long)row.N, row.M, row.beta, row.statistic, row.estimate,
             row.std_error, row.target, row.slack, row.tolerance, std::string("0"),
             (long long)r.master_seed});
  std::cerr << failures << " assertion(s) failed; see " << (outdir / "failures.csv") << "\n";
  return 1;
}

int cmd_sample(const RunConfig& cfg) {
  const EnsembleParams p = cfg.ensemble();
  const fs::path outdir(cfg.out);
  io::CsvWriter eig(outdir / "eigenvalues.csv", "replica,index,lambda");
  io::CsvWriter wts(outdir / "weights.csv", "replica,index,q_squared");
  for (int j = 0; j < cfg.replicas; ++j) {
    RandomStream rng(SeedSpec{cfg.seed, std::uint32_t(j), 0});
    const PointMeasure mu = spectral_weights(sample_jacobi(p, rng));
    for (int i = 0; i < p.N; ++i) {
      eig.row({(long long)j, (long long)i, mu.atoms[i]});
      wts.row({(long long)j, (long long)i, mu.weights[i]});
    }
  }
  std::cout << "wrote " << (outdir / "eigenvalues.csv") << " and " << (outdir / "weights.csv")
            << "\n";
  return 0;
}

int cmd_limit(const RunConfig& cfg) {
  const fs::path outdir(cfg.out);
  const MpLaw mp(cfg.gamma);
  {
    io::CsvWriter w(outdir / "mp_density.csv", "x,density");
    const double hi = mp.lambda_plus() * 1.05;
    for (int i = 0; i <= 512; ++i) {
      const double x = hi * i / 512.0;
      w.row({x, mp.density(x)});
    }
  }
  {
    io::CsvWriter w(outdir / "mp_stieltjes.csv", "re_z,im_z,re_s,im_s");
    for (int i = 0; i <= 64; ++i) {
      const std::complex<double> z(-1.0 + 6.0 * i / 64.0, 0.5);
      const auto s = mp.stieltjes(z);
      w.row({z.real(), z.imag(), s.real(), s.imag()});
    }
  }
  if (cfg.c > 0.0) {
    const NuLaw nu(cfg.gamma, cfg.c);
    io::CsvWriter w(outdir / "nu_density.csv", "x,density");
    const double hi = std::max(4.0 * nu.moment(1), nu.moment(1) + 6.0 * std::sqrt(std::max(
                                                       nu.moment(2) - 1.0, 0.25)));
    for (int i = 0; i <= 512; ++i) {
      const double x = hi * i / 512.0;
      w.row({x, nu.density(x)});
    }
    const AssocLaguerreLaw assoc(nu.alpha(), cfg.c);
    io::CsvWriter sw(outdir / "assoc_stieltjes.csv", "re_z,im_z,re_s,im_s");
    for (int i = 0; i <= 64; ++i) {
      const std::complex<double> z(-1.0 + 6.0 * i / 64.0, 0.5);
      const auto s = assoc.stieltjes(z);
      sw.row({z.real(), z.imag(), s.real(), s.imag()});
    }
  } else {
    // c = 0 degenerates to the Gamma(alpha+1, 1) law.
    const GammaLaw g(cfg.alpha + 1.0);
    io::CsvWriter w(outdir / "nu_density.csv", "x,density");
    const double hi = cfg.alpha + 1.0 + 8.0 * std::sqrt(cfg.alpha + 1.0);
    for (int i = 0; i <= 512; ++i) {
      const double x = hi * i / 512.0;
      w.row({x, g.density(x)});
    }
    std::cout << "c=0: tabulated Gamma(alpha+1,1) density\n";
  }
  if (cfg.svg) {
    const EnsembleParams p = cfg.ensemble();
    std::vector<double> pooled;
    for (int j = 0; j < cfg.replicas; ++j) {
      RandomStream rng(SeedSpec{cfg.seed, std::uint32_t(j), 0});
      const auto ev = eigenvalues(sample_jacobi(p, rng));
      pooled.insert(pooled.end(), ev.begin(), ev.end());
    }
    const std::string svg = io::svg_histogram(
        pooled, [&](double x) { return mp.density(x); }, 0.0, mp.lambda_plus() * 1.1, 60,
        "pooled eigenvalues vs mp density, gamma=" + io::fmt(cfg.gamma));
    io::write_text_file(outdir / "limit_overlay.svg", svg);
    std::cout << "wrote " << (outdir / "limit_overlay.svg") << "\n";
  }
  std::cout << "wrote density/transform tables to " << outdir << "\n";
  return 0;
}

int cmd_moments(const RunConfig& cfg) {
  const EnsembleParams p = cfg.ensemble();
  const fs::path outdir(cfg.out);
  std::ostringstream txt;
  io::CsvWriter w(outdir / "moments.csv", "r,mean_exact,mean_double");
  for (int r = 1; r <= cfg.rmax; ++r) {
    const Poly3 mp_r = exact::moment_poly(r);
    txt << "m_" << r << "(N, kappa, alpha) = " << mp_r.to_canonical_string() << "\n";
    const Rational mean = exact::mean_unscaled_moment(p, r);
    std::ostringstream frac;
    frac << numerator(mean) << "/" << denominator(mean);
    w.row({(long long)r, frac.str(), to_double(mean)});
  }
  io::write_text_file(outdir / "moments.txt", txt.str());
  std::cout << txt.str() << "wrote " << (outdir / "moments.csv") << "\n";
  return 0;
}

int cmd_duality(const RunConfig& cfg) {
  const fs::path outdir(cfg.out);
  std::ostringstream txt;
  int failures = 0;
  for (int r = 1; r <= cfg.rmax; ++r) {
    const auto rep = exact::verify_duality(r);
    txt << "duality r=" << r
        << " residual: " << (rep.holds ? "0" : rep.residual.to_canonical_string()) << "\n";
    if (!rep.holds) ++failures;
  }
  io::write_text_file(outdir / "duality.txt", txt.str());
  std::cout << txt.str();
  return failures == 0 ? 0 : 1;
}

int cmd_lln(const RunConfig& cfg) {
  const fs::path outdir(cfg.out);
  const auto report =
      run_lln(cfg.make_regime(), cfg.rmax, cfg.replicas, cfg.seed, LlnOptions{}, cfg.threads);
  io::write_report_csv(report, outdir / "lln.csv");
  std::cout << io::report_summary(report, "LLN " + cfg.regime);
  return report_failures({report}, outdir);
}

int cmd_clt(const RunConfig& cfg) {
  const fs::path outdir(cfg.out);
  const RegimeSpec regime = cfg.make_regime();
  std::vector<ExperimentReport> reports;
  ExperimentReport merged;
  merged.master_seed = cfg.seed;
  int tag = 0;
  for (int k : {1, 2}) {
    auto rep = run_clt(TestFunction::monomial(k), regime, cfg.replicas, cfg.seed + tag++,
                       CltOptions{}, cfg.threads);
    std::cout << io::report_summary(rep, "CLT f=x^" + std::to_string(k));
    merged.rows.insert(merged.rows.end(), rep.rows.begin(), rep.rows.end());
    reports.push_back(std::move(rep));
  }
  io::write_report_csv(merged, outdir / "clt.csv");
  return report_failures(reports, outdir);
}

int cmd_check(const RunConfig& cfg) {
  const fs::path outdir(cfg.out);
  const EnsembleParams p = cfg.ensemble();
  std::vector<ExperimentReport> reports;

  TestFunction fx = TestFunction::monomial(1);
  TestFunction fx2 = TestFunction::monomial(2);
  TestFunction flog{"log1p", [](double x) { return std::log1p(x); },
                    [](double x) { return 1.0 / (1.0 + x); }, -1};
  TestFunction fsin{"sin", [](double x) { return std::sin(x); },
                    [](double x) { return std::cos(x); }, -1};

  for (const auto& tf : {fx, fx2})
    reports.push_back(check_variance_relation(p, tf, cfg.replicas, cfg.seed, cfg.threads));
  for (const auto& tf : {fx, fx2, flog})
    reports.push_back(check_poincare_matrix(p, tf, cfg.replicas, cfg.seed + 1, cfg.threads));
  reports.push_back(check_poincare_alpha(p, fx, cfg.replicas, cfg.seed + 2, cfg.threads));
  for (double k : {0.3, 1.0, 4.0}) {
    reports.push_back(check_chi_poincare(k, fx, cfg.replicas, cfg.seed + 3, cfg.threads));
    reports.push_back(check_chi_poincare(k, fsin, cfg.replicas, cfg.seed + 4, cfg.threads));
  }

  ExperimentReport merged;
  merged.master_seed = cfg.seed;
  for (const auto& r : reports) {
    std::cout << io::report_summary(r, "check");
    merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
  }
  io::write_report_csv(merged, outdir / "check.csv");
  return report_failures(reports, outdir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"beta-Laguerre ensemble simulation and verification toolkit"};
  app.fallthrough(true);
  app.set_config("--config", "", "flat key=value config file; command line overrides");

  RunConfig cfg;
  app.add_option("--n", cfg.n, "matrix size N")->check(CLI::PositiveNumber);
  app.add_option("--m", cfg.m, "parameter M (> N-1); 0 derives M = N/gamma");
  app.add_option("--beta", cfg.beta, "beta parameter")->check(CLI::PositiveNumber);
  app.add_option("--gamma", cfg.gamma, "aspect ratio target N/M in (0,1)");
  app.add_option("--c", cfg.c, "high-temperature target (beta N -> 2c)");
  app.add_option("--alpha", cfg.alpha, "alpha parameter for c=0 Gamma tabulation");
  app.add_option("--regime", cfg.regime,
                 "fixed_beta | beta_n_to_infinity | high_temperature");
  app.add_option("--replicas", cfg.replicas, "Monte Carlo replicas")->check(CLI::PositiveNumber);
  app.add_option("--rmax", cfg.rmax, "largest moment/duality order")
      ->check(CLI::Range(1, 8));
  app.add_option("--seed", cfg.seed, "master seed");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--threads", cfg.threads, "worker threads (0 = auto)");
  app.add_flag("--svg", cfg.svg, "emit SVG overlays where supported");

  auto* sample = app.add_subcommand("sample", "write eigenvalues.csv and weights.csv");
  auto* limit = app.add_subcommand("limit", "tabulate limiting densities and transforms");
  auto* moments = app.add_subcommand("moments", "exact moment polynomials and means");
  auto* duality = app.add_subcommand("duality", "verify the duality relation symbolically");
  auto* lln = app.add_subcommand("lln", "law-of-large-numbers experiment");
  auto* clt = app.add_subcommand("clt", "central-limit-theorem experiment");
  auto* check = app.add_subcommand("check", "identity and inequality battery");
  app.require_subcommand(1);

  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(cfg.out);
    if (sample->parsed()) return cmd_sample(cfg);
    if (limit->parsed()) return cmd_limit(cfg);
    if (moments->parsed()) return cmd_moments(cfg);
    if (duality->parsed()) return cmd_duality(cfg);
    if (lln->parsed()) return cmd_lln(cfg);
    if (clt->parsed()) return cmd_clt(cfg);
    if (check->parsed()) return cmd_check(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
