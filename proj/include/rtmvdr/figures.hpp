#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rtmvdr/errors.hpp"
#include "rtmvdr/harness.hpp"
#include "rtmvdr/stats.hpp"

namespace rtmvdr {

namespace detail {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // sorted by x
};

/// Minimal deterministic SVG line chart.
inline std::string line_chart_svg(const std::string& title,
                                  const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<Series>& series) {
  constexpr int kW = 640, kH = 440;
  constexpr double kL = 70, kR = 20, kT = 40, kB = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  auto px = [&](double x) {
    return kL + (x - xmin) / (xmax - xmin) * (kW - kL - kR);
  };
  auto py = [&](double y) {
    return kH - kB - (y - ymin) / (ymax - ymin) * (kH - kT - kB);
  };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        "font-size=\"15\">" << title << "</text>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR
     << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL
     << "\" y2=\"" << kH - kB << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12
     << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << kH / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << kH / 2 << ")\">" << y_label << "</text>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    double xv = xmin + (xmax - xmin) * tick / 4.0;
    double yv = ymin + (ymax - ymin) * tick / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << kH - kB + 16
       << "\" text-anchor=\"middle\" font-size=\"10\">"
       << detail::fmt_double(xv) << "</text>\n";
    os << "<text x=\"" << kL - 6 << "\" y=\"" << py(yv) + 3
       << "\" text-anchor=\"end\" font-size=\"10\">" << detail::fmt_double(yv)
       << "</text>\n";
  }
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kColors[si % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : series[si].points)
      os << px(x) << ',' << py(y) << ' ';
    os << "\"/>\n";
    for (auto [x, y] : series[si].points)
      os << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
         << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    os << "<text x=\"" << kW - kR - 8 << "\" y=\"" << kT + 16 + 16 * si
       << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">"
       << series[si].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << content;
}

}  // namespace detail

/// Distance-vs-n/N charts from sweep rows: one SVG per (metric, rho), with a
/// series per regime. Returns the written paths.
inline std::vector<std::string> emit_figures(const std::vector<SweepRow>& rows,
                                             const std::string& output_dir) {
  if (rows.empty()) throw IoError("no sweep rows to render");
  struct Key {
    std::string metric;
    double rho;
    bool operator<(const Key& o) const {
      return metric < o.metric || (metric == o.metric && rho < o.rho);
    }
  };
  std::map<Key, std::map<std::string, detail::Series>> charts;
  auto add = [&](const std::string& metric, const SweepRow& row, double value) {
    auto& series = charts[{metric, row.rho}][row.regime];
    series.label = row.regime;
    series.points.emplace_back(static_cast<double>(row.n) / row.n_sensors,
                               value);
  };
  for (const auto& row : rows) {
    if (!row.report) continue;
    add("ks", row, row.report->ks);
    add("hellinger", row, row.report->hellinger);
    add("tv", row, row.report->total_variation);
    add("sym_kl", row, row.report->sym_kl);
  }
  if (charts.empty()) throw IoError("sweep rows carry no successful cells");

  std::vector<std::string> written;
  for (auto& [key, by_regime] : charts) {
    std::vector<detail::Series> series;
    for (auto& [_, s] : by_regime) {
      std::sort(s.points.begin(), s.points.end());
      series.push_back(s);
    }
    std::string path = output_dir + "/fig_" + key.metric + "_rho" +
                       detail::fmt_double(key.rho) + ".svg";
    detail::write_file(
        path, detail::line_chart_svg("distance vs n/N (rho = " +
                                         detail::fmt_double(key.rho) + ")",
                                     "n/N", key.metric, series));
    written.push_back(path);
  }
  return written;
}

/// ECDF of a standardized sample set overlaid on the standard normal CDF.
inline std::string emit_cdf_overlay(const SampleSet& set,
                                    const std::string& path) {
  if (set.values.empty()) throw IoError("empty sample set");
  std::vector<double> sorted = set.values;
  std::sort(sorted.begin(), sorted.end());
  detail::Series emp{"empirical", {}};
  detail::Series ref{"N(0,1)", {}};
  const int kPoints = 200;
  for (int i = 0; i <= kPoints; ++i) {
    double x = sorted.front() +
               (sorted.back() - sorted.front()) * i / static_cast<double>(kPoints);
    emp.points.emplace_back(x, ecdf(sorted, x));
    ref.points.emplace_back(x, standard_normal_cdf(x));
  }
  detail::write_file(
      path, detail::line_chart_svg(
                std::string("CDF of ") +
                    (set.regime == Regime::LargeN ? "Q_n" : "Q_{N,n}") +
                    " (n = " + std::to_string(set.n) + ")",
                "x", "CDF", {emp, ref}));
  return path;
}

}  // namespace rtmvdr
