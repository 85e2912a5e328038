#pragma once

// YAML sweep configuration. Schema (every top-level key optional except
// `axes`, which `parse_config` requires unless `require_axes` is false):
//
//   name: my-run
//   base:                 # any SystemParams field; defaults to figure_base()
//     G_c: 0.15
//     G_b: 0.124
//   axes:                 # one or two entries
//     - {name: G_b, min: 0, max: 0.3, count: 31, scale: linear}
//   series:               # optional parameter overrides, one grid per entry
//     - {label: D, set: {G_c: 0.15, G_b: 0.124}}
//   outputs: [variance_db, n_eff]
//   resonance_lock: true
//
// Unknown keys at any level are rejected.

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include <yaml-cpp/yaml.h>

#include "bsqz/errors.hpp"
#include "bsqz/sweep.hpp"

namespace bsqz {

namespace detail {

inline void reject_unknown_keys(const YAML::Node& node, std::string_view where,
                                std::initializer_list<std::string_view> allowed) {
  if (!node.IsMap()) throw ConfigError(std::string(where) + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
T scalar_as(const YAML::Node& node, std::string_view what) {
  if (!node.IsScalar()) throw ConfigError(std::string(what) + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("cannot parse " + std::string(what) + " from '" + node.Scalar() + "'");
  }
}

inline void apply_params(SystemParams& p, const YAML::Node& node, std::string_view where) {
  if (!node.IsMap()) throw ConfigError(std::string(where) + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!find_param(key)) {
      throw ConfigError("unknown parameter '" + key + "' in " + std::string(where) +
                        " (valid: " + param_names_list() + ")");
    }
    set_param(p, key, scalar_as<double>(kv.second, key));
  }
}

}  // namespace detail

inline SweepConfig parse_config(const std::string& text, bool require_axes = true) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  detail::reject_unknown_keys(root, "config",
                              {"name", "base", "axes", "series", "outputs", "resonance_lock"});

  SweepConfig cfg;
  cfg.base = figure_base();
  if (root["name"]) cfg.name = detail::scalar_as<std::string>(root["name"], "name");
  if (root["base"]) detail::apply_params(cfg.base, root["base"], "base");
  if (root["resonance_lock"]) {
    cfg.resonance_lock = detail::scalar_as<bool>(root["resonance_lock"], "resonance_lock");
  }

  if (const YAML::Node axes = root["axes"]) {
    if (!axes.IsSequence()) throw ConfigError("axes must be a list");
    for (const auto& node : axes) {
      detail::reject_unknown_keys(node, "axis", {"name", "min", "max", "count", "scale"});
      for (auto key : {"name", "min", "max", "count"}) {
        if (!node[key]) throw ConfigError(std::string("axis is missing '") + key + "'");
      }
      Axis a;
      a.name = detail::scalar_as<std::string>(node["name"], "axis name");
      a.min = detail::scalar_as<double>(node["min"], "axis min");
      a.max = detail::scalar_as<double>(node["max"], "axis max");
      a.count = detail::scalar_as<int>(node["count"], "axis count");
      if (node["scale"]) {
        const auto s = detail::scalar_as<std::string>(node["scale"], "axis scale");
        if (s == "linear") {
          a.scale = AxisScale::Linear;
        } else if (s == "log") {
          a.scale = AxisScale::Log;
        } else {
          throw ConfigError("axis scale must be 'linear' or 'log', got '" + s + "'");
        }
      }
      cfg.axes.push_back(a);
    }
  }

  if (const YAML::Node series = root["series"]) {
    if (!series.IsSequence()) throw ConfigError("series must be a list");
    for (const auto& node : series) {
      detail::reject_unknown_keys(node, "series entry", {"label", "set"});
      Series s;
      s.label = node["label"] ? detail::scalar_as<std::string>(node["label"], "series label")
                              : "series" + std::to_string(cfg.series.size());
      if (node["set"]) {
        if (!node["set"].IsMap()) throw ConfigError("series 'set' must be a mapping");
        for (const auto& kv : node["set"]) {
          const auto key = kv.first.as<std::string>();
          s.overrides.emplace_back(key, detail::scalar_as<double>(kv.second, key));
        }
      }
      cfg.series.push_back(std::move(s));
    }
  }

  if (const YAML::Node outputs = root["outputs"]) {
    if (!outputs.IsSequence()) throw ConfigError("outputs must be a list");
    cfg.outputs.clear();
    for (const auto& node : outputs) {
      cfg.outputs.push_back(parse_metric(detail::scalar_as<std::string>(node, "output")));
    }
  }

  if (require_axes || !cfg.axes.empty()) validate_config(cfg);
  return cfg;
}

inline SweepConfig load_config(const std::string& path, bool require_axes = true) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), require_axes);
}

}  // namespace bsqz
