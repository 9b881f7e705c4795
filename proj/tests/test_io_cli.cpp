#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include "blens/io.hpp"
#include "blens/random.hpp"

using namespace blens;
namespace fs = std::filesystem;

TEST_CASE("numeric formatting round-trips every double") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e300, 12345.678901234567, 0.0,
                   std::numeric_limits<double>::min(), 5e-324, -0.0}) {
    const double back = io::parse_double(io::fmt(x));
    CHECK(back == x);
  }
  CHECK(std::isnan(io::parse_double(io::fmt(std::numeric_limits<double>::quiet_NaN()))));
}

TEST_CASE("csv write and read round trip") {
  const fs::path tmp = fs::temp_directory_path() / "blens_io_test.csv";
  {
    io::CsvWriter w(tmp, "name,count,value");
    w.row({std::string("a"), (long long)3, 1.0 / 3.0});
    w.row({std::string("b"), (long long)-1, 2.5e-17});
  }
  const io::CsvTable t = io::read_csv(tmp);
  REQUIRE(t.header == std::vector<std::string>{"name", "count", "value"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "a");
  CHECK(io::parse_double(t.rows[0][2]) == 1.0 / 3.0);
  CHECK(io::parse_double(t.rows[1][2]) == 2.5e-17);
  CHECK_THROWS(io::parse_double("1.5x"));
  fs::remove(tmp);
}

TEST_CASE("report csv carries all columns and reparses") {
  ExperimentReport rep;
  rep.master_seed = 42;
  ReportRow row;
  row.step = "N=8";
  row.N = 8;
  row.M = 16.0;
  row.beta = 0.5;
  row.statistic = "moment_1";
  row.estimate = 1.0000001;
  row.std_error = 1e-4;
  row.target = 1.0;
  row.slack = 1e-7;
  row.tolerance = "test";
  row.has_assertion = true;
  row.passed = true;
  rep.rows.push_back(row);

  const fs::path tmp = fs::temp_directory_path() / "blens_report_test.csv";
  io::write_report_csv(rep, tmp);
  const io::CsvTable t = io::read_csv(tmp);
  REQUIRE(t.rows.size() == 1);
  CHECK(t.header.size() == 12);
  CHECK(t.rows[0][4] == "moment_1");
  CHECK(io::parse_double(t.rows[0][5]) == 1.0000001);
  CHECK(t.rows[0][10] == "1");
  CHECK(t.rows[0][11] == "42");
  fs::remove(tmp);
}

TEST_CASE("svg histogram contains geometry and the sup caption") {
  std::vector<double> samples;
  RandomStream rng(5);
  for (int i = 0; i < 5000; ++i) samples.push_back(rng.uniform());
  const auto svg = io::svg_histogram(
      samples, [](double) { return 1.0; }, 0.0, 1.0, 20, "uniform check");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("uniform check") != std::string::npos);
  CHECK(svg.find("sup|hist - density|") != std::string::npos);
}

#ifdef BLENS_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BLENS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("cli sample writes the documented schemas") {
  const fs::path dir = fs::temp_directory_path() / "blens_cli_sample";
  fs::remove_all(dir);
  REQUIRE(run_cli("sample --n 4 --m 8 --beta 2 --replicas 2 --seed 9 --out " + dir.string()) == 0);

  const io::CsvTable eig = io::read_csv(dir / "eigenvalues.csv");
  CHECK(eig.header == std::vector<std::string>{"replica", "index", "lambda"});
  REQUIRE(eig.rows.size() == 8);
  double prev = -1.0;
  for (const auto& row : eig.rows) {
    const double lambda = io::parse_double(row[2]);
    if (row[1] != "0") CHECK(lambda >= prev);  // sorted within replica
    prev = lambda;
  }

  const io::CsvTable wts = io::read_csv(dir / "weights.csv");
  CHECK(wts.header == std::vector<std::string>{"replica", "index", "q_squared"});
  double sum0 = 0.0, sum1 = 0.0;
  for (const auto& row : wts.rows)
    (row[0] == "0" ? sum0 : sum1) += io::parse_double(row[2]);
  CHECK(std::fabs(sum0 - 1.0) < 1e-12);
  CHECK(std::fabs(sum1 - 1.0) < 1e-12);
  fs::remove_all(dir);
}

TEST_CASE("cli reads flat key=value config files with flag overrides") {
  const fs::path dir = fs::temp_directory_path() / "blens_cli_config";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "n=4\nm=8\nbeta=2\nreplicas=3\nseed=9\n";
  }
  REQUIRE(run_cli("sample --config " + (dir / "run.cfg").string() + " --replicas 2 --out " +
                  dir.string()) == 0);
  const io::CsvTable eig = io::read_csv(dir / "eigenvalues.csv");
  CHECK(eig.rows.size() == 8);  // n=4 from config, replicas=2 from the override
  fs::remove_all(dir);
}

TEST_CASE("cli duality prints zero residuals") {
  const fs::path dir = fs::temp_directory_path() / "blens_cli_duality";
  fs::remove_all(dir);
  REQUIRE(run_cli("duality --rmax 2 --out " + dir.string()) == 0);
  std::ifstream in(dir / "duality.txt");
  std::string line;
  int zero_lines = 0;
  while (std::getline(in, line))
    if (line.find("residual: 0") != std::string::npos) ++zero_lines;
  CHECK(zero_lines == 2);
  fs::remove_all(dir);
}

TEST_CASE("cli limit tabulates supports and the c=0 gamma route") {
  const fs::path dir = fs::temp_directory_path() / "blens_cli_limit";
  fs::remove_all(dir);
  REQUIRE(run_cli("limit --gamma 0.5 --c 1 --svg --n 24 --replicas 10 --out " + dir.string()) ==
          0);
  const io::CsvTable mp = io::read_csv(dir / "mp_density.csv");
  const double lm = (1.0 - std::sqrt(0.5)) * (1.0 - std::sqrt(0.5));
  const double lp = (1.0 + std::sqrt(0.5)) * (1.0 + std::sqrt(0.5));
  for (const auto& row : mp.rows) {
    const double x = io::parse_double(row[0]);
    if (x < lm || x > lp) CHECK(io::parse_double(row[1]) == 0.0);
  }
  CHECK(fs::exists(dir / "nu_density.csv"));
  CHECK(fs::exists(dir / "mp_stieltjes.csv"));
  CHECK(fs::exists(dir / "limit_overlay.svg"));

  // c = 0 routes to the Gamma(alpha+1, 1) density
  REQUIRE(run_cli("limit --gamma 0.5 --c 0 --alpha 1 --out " + dir.string()) == 0);
  const io::CsvTable nu = io::read_csv(dir / "nu_density.csv");
  bool checked = false;
  for (const auto& row : nu.rows) {
    const double x = io::parse_double(row[0]);
    if (x > 0.0) {
      CHECK_THAT(io::parse_double(row[1]),
                 Catch::Matchers::WithinRel(x * std::exp(-x), 1e-12));  // Gamma(2,1)
      checked = true;
      break;
    }
  }
  CHECK(checked);
  fs::remove_all(dir);
}
#endif
