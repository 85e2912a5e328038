#pragma once

// Parameter sweeps over one or two SystemParams fields, the figure presets,
// and a deterministic grid-refinement optimizer for the squeezing degree.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "bsqz/analytic_oracle.hpp"
#include "bsqz/effective_model.hpp"
#include "bsqz/errors.hpp"
#include "bsqz/observables.hpp"

namespace bsqz {

inline constexpr std::string_view kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Parameter names

struct ParamField {
  std::string_view name;
  double SystemParams::*member;
};

inline constexpr ParamField kParamFields[] = {
    {"omega_m", &SystemParams::omega_m}, {"g_c1", &SystemParams::g_c1},
    {"kappa_1", &SystemParams::kappa_1}, {"gamma_b", &SystemParams::gamma_b},
    {"gamma_m", &SystemParams::gamma_m}, {"eta", &SystemParams::eta},
    {"n_m", &SystemParams::n_m},         {"G_c", &SystemParams::G_c},
    {"G_b", &SystemParams::G_b},         {"Delta_1", &SystemParams::Delta_1},
    {"Delta_b", &SystemParams::Delta_b}};

inline std::optional<double SystemParams::*> find_param(std::string_view name) {
  for (const auto& f : kParamFields) {
    if (f.name == name) return f.member;
  }
  return std::nullopt;
}

inline std::string param_names_list() {
  std::string out;
  for (const auto& f : kParamFields) {
    if (!out.empty()) out += ", ";
    out += f.name;
  }
  return out;
}

inline void set_param(SystemParams& p, std::string_view name, double value) {
  const auto member = find_param(name);
  if (!member) {
    throw ConfigError("unknown parameter '" + std::string(name) +
                      "' (valid: " + param_names_list() + ")");
  }
  p.*(*member) = value;
}

inline double get_param(const SystemParams& p, std::string_view name) {
  const auto member = find_param(name);
  if (!member) throw ConfigError("unknown parameter '" + std::string(name) + "'");
  return p.*(*member);
}

// ---------------------------------------------------------------------------
// Configuration

enum class Metric { Variance, VarianceDb, NEff, Stable, SpectralAbscissa, AnalyticVarianceDb };

inline constexpr std::pair<Metric, std::string_view> kMetricNames[] = {
    {Metric::Variance, "variance"},
    {Metric::VarianceDb, "variance_db"},
    {Metric::NEff, "n_eff"},
    {Metric::Stable, "stable"},
    {Metric::SpectralAbscissa, "spectral_abscissa"},
    {Metric::AnalyticVarianceDb, "analytic_variance_db"}};

inline std::string_view metric_name(Metric m) {
  for (const auto& [metric, name] : kMetricNames) {
    if (metric == m) return name;
  }
  return "?";
}

inline Metric parse_metric(std::string_view name) {
  for (const auto& [metric, n] : kMetricNames) {
    if (n == name) return metric;
  }
  std::string valid;
  for (const auto& [metric, n] : kMetricNames) {
    if (!valid.empty()) valid += ", ";
    valid += n;
  }
  throw ConfigError("unknown output metric '" + std::string(name) + "' (valid: " + valid + ")");
}

enum class AxisScale { Linear, Log };

struct Axis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int count = 1;
  AxisScale scale = AxisScale::Linear;

  /// Grid values, endpoints included. A single-point axis yields `min`.
  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(count));
    if (count == 1) {
      v[0] = min;
      return v;
    }
    for (int i = 0; i < count; ++i) {
      const double f = static_cast<double>(i) / (count - 1);
      if (scale == AxisScale::Log) {
        v[i] = std::exp(std::log(min) + f * (std::log(max) - std::log(min)));
      } else {
        v[i] = min + f * (max - min);
      }
    }
    v.back() = max;
    return v;
  }
};

/// Named set of parameter overrides applied on top of the base point. A sweep
/// repeats its grid once per series (e.g. with and without Brillouin coupling).
struct Series {
  std::string label;
  std::vector<std::pair<std::string, double>> overrides;
};

struct SweepConfig {
  std::string name;  ///< preset name, empty for user configs
  SystemParams base;
  std::vector<Axis> axes;
  std::vector<Series> series;  ///< empty means a single unnamed series
  std::vector<Metric> outputs{Metric::VarianceDb};
  /// Recompute Delta_1 and Delta_b as omega'_m at every grid point, except
  /// for a detuning that is itself swept or set by the series.
  bool resonance_lock = true;
};

inline void validate_config(const SweepConfig& cfg) {
  if (cfg.axes.empty() || cfg.axes.size() > 2) {
    throw ConfigError("a sweep needs one or two axes");
  }
  for (const Axis& a : cfg.axes) {
    if (!find_param(a.name)) {
      throw ConfigError("unknown axis parameter '" + a.name + "' (valid: " + param_names_list() +
                        ")");
    }
    if (a.count < 1) throw ConfigError("axis '" + a.name + "' needs count >= 1");
    if (!std::isfinite(a.min) || !std::isfinite(a.max)) {
      throw ConfigError("axis '" + a.name + "' bounds must be finite");
    }
    if (a.min > a.max) throw ConfigError("axis '" + a.name + "' needs min <= max");
    if (a.scale == AxisScale::Log && a.min <= 0.0) {
      throw ConfigError("log-scaled axis '" + a.name + "' needs min > 0");
    }
  }
  if (cfg.axes.size() == 2 && cfg.axes[0].name == cfg.axes[1].name) {
    throw ConfigError("the two axes must sweep different parameters");
  }
  for (const Series& s : cfg.series) {
    for (const auto& [name, value] : s.overrides) {
      if (!find_param(name)) {
        throw ConfigError("unknown parameter '" + name + "' in series '" + s.label + "'");
      }
      if (!std::isfinite(value)) throw ConfigError("series '" + s.label + "' has a non-finite value");
    }
  }
  if (cfg.outputs.empty()) throw ConfigError("at least one output metric is required");
}

// ---------------------------------------------------------------------------
// Results

struct SweepRow {
  std::size_t series = 0;
  std::vector<double> axis_values;
  SystemParams params;  ///< the evaluated point, after resonance locking
  SqueezingReport report;
  double analytic_variance_db = std::numeric_limits<double>::quiet_NaN();
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;  ///< series-major, then row-major over the axes
};

struct RunOptions {
  unsigned threads = 0;  ///< 0: hardware concurrency
};

namespace detail {

inline bool needs_covariance(const std::vector<Metric>& outputs) {
  return std::any_of(outputs.begin(), outputs.end(), [](Metric m) {
    return m == Metric::Variance || m == Metric::VarianceDb || m == Metric::NEff ||
           m == Metric::AnalyticVarianceDb;
  });
}

inline bool wants(const std::vector<Metric>& outputs, Metric m) {
  return std::find(outputs.begin(), outputs.end(), m) != outputs.end();
}

/// Runs `task(i)` for i in [0, n) on a bounded pool. Each index is written by
/// exactly one worker; the exception of the lowest failing index is rethrown.
template <typename Task>
void parallel_for(std::size_t n, unsigned threads, Task&& task) {
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));

  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

/// The parameter point for one grid cell of `cfg`.
inline SystemParams grid_point(const SweepConfig& cfg, std::size_t series,
                               const std::vector<double>& axis_values) {
  SystemParams p = cfg.base;
  bool lock_d1 = cfg.resonance_lock;
  bool lock_db = cfg.resonance_lock;
  auto mark = [&](std::string_view name) {
    if (name == "Delta_1") lock_d1 = false;
    if (name == "Delta_b") lock_db = false;
  };
  if (series < cfg.series.size()) {
    for (const auto& [name, value] : cfg.series[series].overrides) {
      set_param(p, name, value);
      mark(name);
    }
  }
  for (std::size_t a = 0; a < cfg.axes.size(); ++a) {
    set_param(p, cfg.axes[a].name, axis_values[a]);
    mark(cfg.axes[a].name);
  }
  if (lock_d1 || lock_db) {
    const double w = derive_effective_params(p).omega_m_eff;
    if (lock_d1) p.Delta_1 = w;
    if (lock_db) p.Delta_b = w;
  }
  return p;
}

/// Evaluates one point with the metrics requested in `outputs`.
inline SweepRow evaluate_row(const SystemParams& p, const std::vector<Metric>& outputs) {
  SweepRow row;
  row.params = p;
  if (detail::needs_covariance(outputs)) {
    row.report = evaluate_point(p);
  } else {
    const EffectiveParams e = derive_effective_params(p);
    const StabilityReport s = check_stability(build_drift_matrix(e, p));
    row.report.stable = s.stable;
    row.report.spectral_abscissa = s.spectral_abscissa;
  }
  if (row.report.stable && detail::wants(outputs, Metric::AnalyticVarianceDb)) {
    try {
      row.analytic_variance_db = variance_db(analytic_prediction(p).variance);
    } catch (const HeatingRegimeError&) {
      // rate model not applicable here; left blank
    }
  }
  return row;
}

/// Evaluates the full grid. Unstable points produce rows with stable = false
/// and no metrics. Row order is independent of the thread count.
inline SweepResult run_sweep(const SweepConfig& cfg, const RunOptions& opts = {}) {
  validate_config(cfg);

  std::vector<std::vector<double>> axis_grids;
  for (const Axis& a : cfg.axes) axis_grids.push_back(a.values());
  const std::size_t n_series = std::max<std::size_t>(1, cfg.series.size());
  std::size_t cells = 1;
  for (const auto& g : axis_grids) cells *= g.size();

  SweepResult result;
  result.config = cfg;
  result.rows.resize(n_series * cells);

  detail::parallel_for(result.rows.size(), opts.threads, [&](std::size_t i) {
    const std::size_t series = i / cells;
    std::size_t rem = i % cells;
    std::vector<double> values(axis_grids.size());
    for (std::size_t a = axis_grids.size(); a-- > 0;) {
      values[a] = axis_grids[a][rem % axis_grids[a].size()];
      rem /= axis_grids[a].size();
    }
    SweepRow row = evaluate_row(grid_point(cfg, series, values), cfg.outputs);
    row.series = series;
    row.axis_values = std::move(values);
    result.rows[i] = std::move(row);
  });
  return result;
}

// ---------------------------------------------------------------------------
// Optimizer

struct OptimizeOptions {
  int levels = 4;          ///< refinement levels after the coarse scan
  double shrink = 4.0;     ///< span reduction per level
  unsigned threads = 0;
};

struct Optimum {
  std::vector<std::pair<std::string, double>> point;  ///< axis name -> value
  SystemParams params;
  SqueezingReport report;
  double variance_db = 0.0;
  std::vector<double> cell_size;  ///< grid spacing of the last level per axis
};

/// Maximizes variance_db over the box spanned by the config axes: a coarse
/// scan with each axis' `count` points, then `levels` rescans of a window
/// `shrink` times narrower around the incumbent, clamped to the box. Ties
/// go to the earlier point in row-major order, so the result is deterministic.
inline Optimum optimize_squeezing(const SweepConfig& cfg, const OptimizeOptions& opts = {}) {
  validate_config(cfg);
  if (cfg.series.size() > 1) throw ConfigError("optimize accepts at most one series");

  SweepConfig work = cfg;
  work.outputs = {Metric::VarianceDb};
  for (Axis& a : work.axes) {
    if (a.scale == AxisScale::Log) throw ConfigError("optimize needs linear axes");
    if (a.count < 3 && a.min < a.max) a.count = 3;
  }

  std::optional<SweepRow> best;
  auto scan = [&](const SweepConfig& c) {
    const SweepResult r = run_sweep(c, {opts.threads});
    for (const SweepRow& row : r.rows) {
      if (!row.report.stable) continue;
      if (!best || row.report.variance_db > best->report.variance_db) best = row;
    }
  };

  scan(work);
  if (!best) throw InfeasibleError("no stable parameter point inside the optimization bounds");

  for (int level = 0; level < opts.levels; ++level) {
    SweepConfig refined = work;
    for (std::size_t a = 0; a < refined.axes.size(); ++a) {
      const Axis& bounds = cfg.axes[a];
      Axis& ax = refined.axes[a];
      const double span = (work.axes[a].max - work.axes[a].min) / opts.shrink;
      double lo = best->axis_values[a] - span / 2.0;
      double hi = best->axis_values[a] + span / 2.0;
      if (lo < bounds.min) {
        hi += bounds.min - lo;
        lo = bounds.min;
      }
      if (hi > bounds.max) {
        lo -= hi - bounds.max;
        hi = bounds.max;
      }
      ax.min = std::max(lo, bounds.min);
      ax.max = std::min(hi, bounds.max);
    }
    work = refined;
    scan(work);
  }

  Optimum out;
  for (std::size_t a = 0; a < cfg.axes.size(); ++a) {
    out.point.emplace_back(cfg.axes[a].name, best->axis_values[a]);
    const Axis& ax = work.axes[a];
    out.cell_size.push_back(ax.count > 1 ? (ax.max - ax.min) / (ax.count - 1) : 0.0);
  }
  out.params = best->params;
  out.report = best->report;
  out.variance_db = best->report.variance_db;
  return out;
}

// ---------------------------------------------------------------------------
// Figure presets

inline constexpr std::string_view kPresetNames[] = {"fig2a", "fig2b", "fig3a",
                                                    "fig3b", "fig4",  "fig5"};

/// Base point shared by every figure: omega_m = 1, g_c1 = 1e-4, kappa_1 = 0.02,
/// gamma_b = 0.4, gamma_m = 1e-4, eta = 1e-4, n_m = 100, G_c = 0.15, and
/// G_b = 0.124 (the optimum for G_c = 0.15).
inline SystemParams figure_base() {
  SystemParams p;
  p.omega_m = 1.0;
  p.g_c1 = 1e-4;
  p.kappa_1 = 0.02;
  p.gamma_b = 0.4;
  p.gamma_m = 1e-4;
  p.eta = 1e-4;
  p.n_m = 100.0;
  p.G_c = 0.15;
  p.G_b = 0.124;
  return lock_to_resonance(p);
}

inline SweepConfig figure_preset(std::string_view name) {
  SweepConfig cfg;
  cfg.name = std::string(name);
  cfg.base = figure_base();
  cfg.resonance_lock = true;

  const Series no_bsbs{"G_b=0", {{"G_b", 0.0}}};
  const Series with_bsbs{"G_b=0.124", {{"G_b", 0.124}}};

  if (name == "fig2a" || name == "fig2b") {
    cfg.axes = {{"Delta_b", 2.5, 4.5, 201, AxisScale::Linear},
                {"G_b", 0.0, 0.3, 201, AxisScale::Linear}};
    cfg.outputs = {name == "fig2a" ? Metric::VarianceDb : Metric::NEff};
  } else if (name == "fig3a") {
    cfg.axes = {{"G_c", 0.0, 0.3, 61, AxisScale::Linear},
                {"G_b", 0.0, 0.3, 61, AxisScale::Linear}};
    cfg.outputs = {Metric::VarianceDb};
  } else if (name == "fig3b") {
    cfg.axes = {{"gamma_b", 1e-3, 10.0, 81, AxisScale::Log}};
    cfg.series = {{"C", {{"G_c", 0.050}, {"G_b", 0.008}}},
                  {"D", {{"G_c", 0.150}, {"G_b", 0.124}}},
                  {"E", {{"G_c", 0.250}, {"G_b", 0.154}}}};
    cfg.outputs = {Metric::Variance, Metric::VarianceDb};
  } else if (name == "fig4") {
    cfg.axes = {{"n_m", 0.0, 1000.0, 101, AxisScale::Linear}};
    cfg.series = {no_bsbs, with_bsbs};
    cfg.outputs = {Metric::Variance, Metric::VarianceDb};
  } else if (name == "fig5") {
    cfg.axes = {{"eta", 0.0, 1e-4, 101, AxisScale::Linear}};
    cfg.series = {no_bsbs, with_bsbs};
    cfg.outputs = {Metric::Variance, Metric::VarianceDb};
  } else {
    std::string valid;
    for (auto n : kPresetNames) {
      if (!valid.empty()) valid += ", ";
      valid += n;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (valid: " + valid + ")");
  }
  return cfg;
}

}  // namespace bsqz
