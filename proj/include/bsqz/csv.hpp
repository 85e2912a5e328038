#pragma once

// CSV output for sweep results: a '#'-prefixed metadata block, a header row,
// then one data row per grid point. Numbers use 12 significant digits; missing
// metrics (unstable points) are empty fields.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bsqz/sweep.hpp"

namespace bsqz {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::vector<std::string> csv_columns(const SweepConfig& cfg) {
  std::vector<std::string> cols;
  if (!cfg.series.empty()) cols.emplace_back("series");
  for (const Axis& a : cfg.axes) cols.push_back(a.name);
  cols.emplace_back("stable");
  for (Metric m : cfg.outputs) {
    if (m != Metric::Stable) cols.emplace_back(metric_name(m));
  }
  return cols;
}

inline void write_csv_metadata(std::ostream& os, const SweepConfig& cfg,
                               const std::string& timestamp) {
  os << "# tool: bsqz " << kVersion << '\n';
  os << "# timestamp: " << timestamp << '\n';
  if (!cfg.name.empty()) os << "# preset: " << cfg.name << '\n';
  os << "# resonance_lock: " << (cfg.resonance_lock ? "true" : "false") << '\n';
  for (const auto& f : kParamFields) {
    os << "# base." << f.name << ": " << format_number(cfg.base.*f.member) << '\n';
  }
  for (const Axis& a : cfg.axes) {
    os << "# axis: " << a.name << ' ' << (a.scale == AxisScale::Log ? "log" : "linear") << ' '
       << format_number(a.min) << ' ' << format_number(a.max) << ' ' << a.count << '\n';
  }
  for (const Series& s : cfg.series) {
    os << "# series: " << s.label;
    for (const auto& [name, value] : s.overrides) os << ' ' << name << '=' << format_number(value);
    os << '\n';
  }
}

inline void write_csv_data(std::ostream& os, const SweepResult& result) {
  const SweepConfig& cfg = result.config;
  const auto cols = csv_columns(cfg);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';

  for (const SweepRow& row : result.rows) {
    std::string line;
    if (!cfg.series.empty()) line += cfg.series[row.series].label + ",";
    for (double v : row.axis_values) line += format_number(v) + ",";
    line += row.report.stable ? "true" : "false";
    for (Metric m : cfg.outputs) {
      double v = std::nan("");
      switch (m) {
        case Metric::Stable:
          continue;
        case Metric::Variance:
          v = row.report.variance;
          break;
        case Metric::VarianceDb:
          v = row.report.variance_db;
          break;
        case Metric::NEff:
          v = row.report.n_eff;
          break;
        case Metric::SpectralAbscissa:
          v = row.report.spectral_abscissa;
          break;
        case Metric::AnalyticVarianceDb:
          v = row.analytic_variance_db;
          break;
      }
      if (!row.report.stable && m != Metric::SpectralAbscissa) v = std::nan("");
      line += "," + format_number(v);
    }
    os << line << '\n';
  }
}

inline void write_csv(std::ostream& os, const SweepResult& result,
                      const std::string& timestamp = utc_timestamp()) {
  write_csv_metadata(os, result.config, timestamp);
  write_csv_data(os, result);
}

/// The CSV text without its '#' metadata lines.
inline std::string csv_data_section(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') continue;
    out += line;
    out += '\n';
  }
  return out;
}

}  // namespace bsqz
