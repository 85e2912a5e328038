// bsqz: steady-state mechanical squeezing in the Brillouin-assisted
// three-mode optomechanical model.
//
//   bsqz point [--config FILE] [--set NAME=VALUE]... [--no-lock]
//   bsqz sweep --config FILE [--out FILE] [--threads N]
//   bsqz preset NAME [--out FILE] [--threads N]
//   bsqz optimize --config FILE [--threads N]
//   bsqz stability --config FILE [--out FILE] [--threads N]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bsqz/bsqz.hpp"
#include "bsqz/config.hpp"
#include "bsqz/csv.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

bsqz::Series parse_overrides(const std::vector<std::string>& assignments) {
  bsqz::Series s{"cli", {}};
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw bsqz::ConfigError("--set expects NAME=VALUE, got '" + a + "'");
    const std::string name = a.substr(0, eq);
    if (!bsqz::find_param(name)) {
      throw bsqz::ConfigError("unknown parameter '" + name + "' (valid: " + bsqz::param_names_list() +
                              ")");
    }
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(a.substr(eq + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != a.size() - eq - 1) {
      throw bsqz::ConfigError("cannot parse value in '" + a + "'");
    }
    s.overrides.emplace_back(name, value);
  }
  return s;
}

void write_result(const bsqz::SweepResult& result, const std::string& out_path) {
  if (out_path.empty()) {
    bsqz::write_csv(std::cout, result);
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw bsqz::ConfigError("cannot open output file '" + out_path + "'");
  bsqz::write_csv(out, result);
}

void print_point(const bsqz::SystemParams& p) {
  for (const auto& w : bsqz::validate(p)) std::cerr << "warning: " << w << '\n';
  const bsqz::PointEvaluation ev = bsqz::evaluate_point_detailed(p);
  const double lin = bsqz::linearization_ratio(p, ev.effective);
  if (lin > 0.1) {
    std::cerr << "warning: linearization ratio max(g_c1, eta*beta)/min(Lambda, G_c) = "
              << bsqz::format_number(lin) << '\n';
  }

  auto line = [](const char* key, double v) {
    std::cout << key << ": " << (std::isnan(v) ? "nan" : bsqz::format_number(v)) << '\n';
  };
  for (const auto& f : bsqz::kParamFields) {
    std::cout << f.name << ": " << bsqz::format_number(p.*f.member) << '\n';
  }
  line("beta", ev.effective.beta);
  line("Lambda", ev.effective.Lambda);
  line("r", ev.effective.r);
  line("omega_m_eff", ev.effective.omega_m_eff);
  line("G_c_eff", ev.effective.G_c_eff);
  line("N_eff", ev.effective.N_eff);
  line("M_eff", ev.effective.M_eff);
  std::cout << "stable: " << (ev.report.stable ? "true" : "false") << '\n';
  line("spectral_abscissa", ev.report.spectral_abscissa);
  line("variance", ev.report.variance);
  line("variance_db", ev.report.variance_db);
  line("n_eff", ev.report.n_eff);
  if (ev.report.stable) {
    try {
      line("analytic_variance_db", bsqz::variance_db(bsqz::analytic_prediction(p).variance));
    } catch (const bsqz::HeatingRegimeError&) {
      std::cout << "analytic_variance_db: n/a (heating regime)\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady-state mechanical squeezing with Brillouin-assisted cooling"};
  app.require_subcommand(1);

  std::string config_path, out_path, preset_name;
  std::vector<std::string> assignments;
  bool no_lock = false;
  unsigned threads = 0;

  auto* point = app.add_subcommand("point", "Evaluate a single parameter point");
  point->add_option("--config", config_path, "YAML config supplying base parameters");
  point->add_option("--set", assignments, "Override a parameter, NAME=VALUE (repeatable)");
  point->add_flag("--no-lock", no_lock, "Do not set Delta_1 = Delta_b = omega'_m");

  auto* sweep = app.add_subcommand("sweep", "Run a grid sweep and write CSV");
  sweep->add_option("--config", config_path, "YAML sweep config")->required();
  sweep->add_option("--out", out_path, "Output CSV file (default stdout)");
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* preset = app.add_subcommand("preset", "Run a figure preset and write CSV");
  preset->add_option("name", preset_name, "fig2a, fig2b, fig3a, fig3b, fig4 or fig5")->required();
  preset->add_option("--out", out_path, "Output CSV file (default stdout)");
  preset->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* optimize = app.add_subcommand("optimize", "Maximize the squeezing degree over the axes");
  optimize->add_option("--config", config_path, "YAML sweep config; axes give the bounds")
      ->required();
  optimize->add_option("--threads", threads, "Worker threads (0 = all cores)");

  auto* stability = app.add_subcommand("stability", "Map the stability region of a grid");
  stability->add_option("--config", config_path, "YAML sweep config")->required();
  stability->add_option("--out", out_path, "Output CSV file (default stdout)");
  stability->add_option("--threads", threads, "Worker threads (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (point->parsed()) {
      bsqz::SweepConfig cfg;
      cfg.base = bsqz::figure_base();
      if (!config_path.empty()) cfg = bsqz::load_config(config_path, /*require_axes=*/false);
      cfg.axes.clear();
      cfg.series = {parse_overrides(assignments)};
      if (no_lock) cfg.resonance_lock = false;
      print_point(bsqz::grid_point(cfg, 0, {}));
    } else if (sweep->parsed()) {
      write_result(bsqz::run_sweep(bsqz::load_config(config_path), {threads}), out_path);
    } else if (preset->parsed()) {
      write_result(bsqz::run_sweep(bsqz::figure_preset(preset_name), {threads}), out_path);
    } else if (optimize->parsed()) {
      const bsqz::Optimum opt =
          bsqz::optimize_squeezing(bsqz::load_config(config_path), {.threads = threads});
      for (std::size_t i = 0; i < opt.point.size(); ++i) {
        std::cout << opt.point[i].first << ": " << bsqz::format_number(opt.point[i].second)
                  << " (cell " << bsqz::format_number(opt.cell_size[i]) << ")\n";
      }
      std::cout << "variance: " << bsqz::format_number(opt.report.variance) << '\n';
      std::cout << "variance_db: " << bsqz::format_number(opt.variance_db) << '\n';
      std::cout << "n_eff: " << bsqz::format_number(opt.report.n_eff) << '\n';
      std::cout << "spectral_abscissa: " << bsqz::format_number(opt.report.spectral_abscissa)
                << '\n';
    } else if (stability->parsed()) {
      bsqz::SweepConfig cfg = bsqz::load_config(config_path);
      cfg.outputs = {bsqz::Metric::Stable, bsqz::Metric::SpectralAbscissa};
      write_result(bsqz::run_sweep(cfg, {threads}), out_path);
    }
  } catch (const bsqz::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bsqz::InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bsqz::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
