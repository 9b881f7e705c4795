#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "blens/experiments.hpp"

// CSV with lossless numeric round-trip (17 significant digits) and a small
// static-SVG renderer for histogram/density overlays.

namespace blens::io {

/// Shortest-round-trip-adjacent formatting: %.17g always reparses to the
/// same double.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using Cell = std::variant<std::string, long long, double>;

inline std::string cell_to_string(const Cell& c) {
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  if (std::holds_alternative<long long>(c)) return std::to_string(std::get<long long>(c));
  return fmt(std::get<double>(c));
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
    out_ << header << "\n";
  }

  void row(const std::vector<Cell>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cell_to_string(cells[i]);
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else if (!cells.empty()) {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

inline double parse_double(const std::string& s) {
  if (s.empty()) throw std::runtime_error("empty numeric cell");
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);  // strtod keeps subnormals
  if (end != begin + s.size()) throw std::runtime_error("trailing characters in numeric cell: " + s);
  return v;
}

inline const std::string kReportHeader =
    "step,N,M,beta,statistic,estimate,std_error,target,slack,tolerance,passed,master_seed";

inline void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path) {
  CsvWriter w(path, kReportHeader);
  for (const auto& r : report.rows)
    w.row({r.step, (long long)r.N, r.M, r.beta, r.statistic, r.estimate, r.std_error, r.target,
           r.slack, r.tolerance, std::string(r.has_assertion ? (r.passed ? "1" : "0") : ""),
           (long long)report.master_seed});
}

/// Human-readable summary (includes wall clock, which deliberately stays out
/// of the CSV so files are byte-identical across reruns).
inline std::string report_summary(const ExperimentReport& report, const std::string& title) {
  std::ostringstream os;
  os << "== " << title << " ==\n";
  for (const auto& r : report.rows) {
    os << "  " << r.step << "  " << r.statistic << "  estimate=" << fmt(r.estimate);
    if (std::isfinite(r.std_error)) os << " se=" << fmt(r.std_error);
    if (std::isfinite(r.target)) os << " target=" << fmt(r.target);
    if (r.has_assertion) os << (r.passed ? "  [ok]" : "  [FAIL]");
    os << "\n";
  }
  os << "  seed=" << report.master_seed << "  wall=" << fmt(report.wall_seconds) << "s\n";
  return os.str();
}

/// Histogram with a density polyline overlay; static SVG, no dependencies.
inline std::string svg_histogram(const std::vector<double>& samples,
                                 const std::function<double(double)>& density, double lo,
                                 double hi, int bins, const std::string& caption) {
  const int width = 720, height = 420, mleft = 50, mbot = 40, mtop = 30, mright = 20;
  std::vector<double> counts(bins, 0.0);
  std::size_t inside = 0;
  for (double s : samples) {
    if (s < lo || s >= hi) continue;
    ++inside;
    counts[std::size_t((s - lo) / (hi - lo) * bins)] += 1.0;
  }
  const double binw = (hi - lo) / bins;
  for (auto& c : counts) c /= std::max<std::size_t>(inside, 1) * binw;  // normalized height

  double ymax = 0.0, sup_gap = 0.0;
  std::vector<double> dens(bins);
  for (int b = 0; b < bins; ++b) {
    dens[b] = density(lo + (b + 0.5) * binw);
    ymax = std::max({ymax, counts[b], dens[b]});
    sup_gap = std::max(sup_gap, std::fabs(dens[b] - counts[b]));
  }
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.08;

  const auto X = [&](double x) { return mleft + (x - lo) / (hi - lo) * (width - mleft - mright); };
  const auto Y = [&](double y) { return height - mbot - y / ymax * (height - mbot - mtop); };

  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
     << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  for (int b = 0; b < bins; ++b) {
    const double x0 = X(lo + b * binw), x1 = X(lo + (b + 1) * binw);
    os << "<rect x='" << fmt(x0) << "' y='" << fmt(Y(counts[b])) << "' width='" << fmt(x1 - x0)
       << "' height='" << fmt(Y(0) - Y(counts[b])) << "' fill='#9ecae1' stroke='#6baed6'/>\n";
  }
  os << "<polyline fill='none' stroke='#d62728' stroke-width='2' points='";
  for (int b = 0; b < bins; ++b)
    os << fmt(X(lo + (b + 0.5) * binw)) << "," << fmt(Y(dens[b])) << " ";
  os << "'/>\n";
  os << "<line x1='" << mleft << "' y1='" << Y(0) << "' x2='" << width - mright << "' y2='"
     << Y(0) << "' stroke='black'/>\n";
  os << "<line x1='" << mleft << "' y1='" << Y(0) << "' x2='" << mleft << "' y2='" << mtop
     << "' stroke='black'/>\n";
  os << "<text x='" << mleft << "' y='" << height - 10 << "' font-size='13'>" << caption
     << " | sup|hist - density| = " << fmt(sup_gap) << "</text>\n</svg>\n";
  return os.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << content;
}

}  // namespace blens::io
