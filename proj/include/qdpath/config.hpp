// Copyright 2026 The qdpath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdpath/adm.hpp"
#include "qdpath/errors.hpp"
#include "qdpath/io.hpp"
#include "qdpath/models.hpp"

/// @file config.hpp
/// Run configuration: a nested JSON document with unit-suffixed keys
/// (detuning_mev, dt_ps, ...), its validation, the named presets, and the
/// driver that turns a configuration into a finished trajectory.

namespace qdpath {

/// Numerical knobs of a run.
struct NumericsConfig {
  double dt_ps = 0.5;
  int n_steps = 100;
  int memory_depth = 1;
  std::string trace_policy = "monitor_only";  // or "renormalize_each_step"
  double memory_budget_mb = 2048.0;
  double kernel_abs_tol = 1e-12;
};

/// Optional parameter sweep attached to a configuration.
struct SweepConfig {
  std::string parameter;  // field_strength | detuning | temperature | rate
  std::vector<double> values;
};

/// A fully parsed run configuration.
struct RunConfig {
  std::string model_type;  // "driven_dot" | "dot_cavity"
  DrivenDotModel dot;
  DotCavityModel cavity;
  std::string initial_state;  // ground | exciton | photon | mixed
  NumericsConfig numerics;
  std::optional<SweepConfig> sweep;
  std::string preset_name;  // non-empty when loaded from a preset
};

namespace detail {

inline const nlohmann::json& need_field(const nlohmann::json& j,
                                        const std::string& key,
                                        const std::string& ctx) {
  if (!j.contains(key)) {
    throw ConfigError("config: missing field '" + ctx + key + "'");
  }
  return j.at(key);
}

inline double need_number(const nlohmann::json& j, const std::string& key,
                          const std::string& ctx) {
  const auto& v = need_field(j, key, ctx);
  if (!v.is_number()) {
    throw ConfigError("config: field '" + ctx + key + "' must be a number");
  }
  return v.get<double>();
}

inline double opt_number(const nlohmann::json& j, const std::string& key,
                         double fallback, const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) {
    throw ConfigError("config: field '" + ctx + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

inline std::string opt_string(const nlohmann::json& j, const std::string& key,
                              const std::string& fallback,
                              const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) {
    throw ConfigError("config: field '" + ctx + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

inline PulseEnvelope parse_field(const nlohmann::json& j) {
  const std::string shape = opt_string(j, "shape", "constant", "model.field.");
  if (shape == "constant") {
    return PulseEnvelope::constant(
        need_number(j, "amplitude_ps_inv", "model.field."));
  }
  if (shape == "gaussian") {
    return PulseEnvelope::gaussian(
        need_number(j, "amplitude_ps_inv", "model.field."),
        need_number(j, "center_ps", "model.field."),
        need_number(j, "fwhm_ps", "model.field."));
  }
  throw ConfigError("config: model.field.shape must be constant or gaussian");
}

inline GaAsDeformationParams parse_gaas(const nlohmann::json& j) {
  GaAsDeformationParams p;
  p.mass_density_kg_m3 =
      opt_number(j, "mass_density_kg_m3", p.mass_density_kg_m3, "model.gaas.");
  p.sound_velocity_m_s =
      opt_number(j, "sound_velocity_m_s", p.sound_velocity_m_s, "model.gaas.");
  p.deformation_e_eV =
      opt_number(j, "deformation_e_ev", p.deformation_e_eV, "model.gaas.");
  p.deformation_h_eV =
      opt_number(j, "deformation_h_ev", p.deformation_h_eV, "model.gaas.");
  p.localization_e_nm =
      opt_number(j, "localization_e_nm", p.localization_e_nm, "model.gaas.");
  p.localization_h_nm =
      opt_number(j, "localization_h_nm", p.localization_h_nm, "model.gaas.");
  return p;
}

}  // namespace detail

/// Parses and validates a configuration document.  Error messages name the
/// offending field.
inline RunConfig parse_run_config(const nlohmann::json& j) {
  RunConfig cfg;
  const auto& model = detail::need_field(j, "model", "");
  cfg.model_type = detail::opt_string(model, "type", "", "model.");
  if (cfg.model_type == "driven_dot") {
    cfg.dot.field = detail::parse_field(
        detail::need_field(model, "field", "model."));
    cfg.dot.detuning_meV = detail::opt_number(model, "detuning_mev", 0.0,
                                              "model.");
    cfg.dot.radiative_rate_ps_inv =
        detail::opt_number(model, "radiative_rate_ps_inv", 0.0, "model.");
    cfg.dot.temperature_K =
        detail::opt_number(model, "temperature_k", 4.0, "model.");
    cfg.dot.phonons = model.value("phonons", true);
    if (model.contains("gaas")) cfg.dot.gaas = detail::parse_gaas(model["gaas"]);
    cfg.initial_state = detail::opt_string(model, "initial_state", "ground",
                                           "model.");
    if (cfg.initial_state != "ground" && cfg.initial_state != "exciton" &&
        cfg.initial_state != "mixed") {
      throw ConfigError(
          "config: model.initial_state must be ground, exciton or mixed "
          "for driven_dot");
    }
    if (cfg.dot.radiative_rate_ps_inv < 0.0) {
      throw ConfigError("config: model.radiative_rate_ps_inv must be >= 0");
    }
    if (cfg.dot.temperature_K < 0.0) {
      throw ConfigError("config: model.temperature_k must be >= 0");
    }
  } else if (cfg.model_type == "dot_cavity") {
    cfg.cavity.hbar_g_meV =
        detail::need_number(model, "coupling_hbar_g_mev", "model.");
    cfg.cavity.detuning_meV =
        detail::opt_number(model, "detuning_mev", 0.0, "model.");
    cfg.cavity.cavity_loss_ps_inv =
        detail::opt_number(model, "cavity_loss_ps_inv", 0.0, "model.");
    cfg.cavity.temperature_K =
        detail::opt_number(model, "temperature_k", 1.0, "model.");
    cfg.cavity.phonons = model.value("phonons", true);
    if (model.contains("gaas")) {
      cfg.cavity.gaas = detail::parse_gaas(model["gaas"]);
    }
    cfg.initial_state = detail::opt_string(model, "initial_state", "exciton",
                                           "model.");
    if (cfg.initial_state != "ground" && cfg.initial_state != "exciton" &&
        cfg.initial_state != "photon") {
      throw ConfigError(
          "config: model.initial_state must be ground, photon or exciton "
          "for dot_cavity");
    }
    if (cfg.cavity.cavity_loss_ps_inv < 0.0) {
      throw ConfigError("config: model.cavity_loss_ps_inv must be >= 0");
    }
    if (cfg.cavity.temperature_K < 0.0) {
      throw ConfigError("config: model.temperature_k must be >= 0");
    }
  } else {
    throw ConfigError(
        "config: model.type must be 'driven_dot' or 'dot_cavity'");
  }

  if (j.contains("numerics")) {
    const auto& num = j.at("numerics");
    cfg.numerics.dt_ps = detail::opt_number(num, "dt_ps", 0.5, "numerics.");
    cfg.numerics.n_steps = static_cast<int>(
        detail::opt_number(num, "n_steps", 100, "numerics."));
    cfg.numerics.memory_depth = static_cast<int>(
        detail::opt_number(num, "memory_depth", 1, "numerics."));
    cfg.numerics.trace_policy = detail::opt_string(
        num, "trace_policy", "monitor_only", "numerics.");
    cfg.numerics.memory_budget_mb =
        detail::opt_number(num, "memory_budget_mb", 2048.0, "numerics.");
    cfg.numerics.kernel_abs_tol =
        detail::opt_number(num, "kernel_abs_tol", 1e-12, "numerics.");
  }
  if (cfg.numerics.dt_ps <= 0.0) {
    throw ConfigError("config: numerics.dt_ps must be > 0");
  }
  if (cfg.numerics.n_steps < 0) {
    throw ConfigError("config: numerics.n_steps must be >= 0");
  }
  if (cfg.numerics.memory_depth < 1 ||
      cfg.numerics.memory_depth > kMaxMemoryDepth) {
    throw ConfigError("config: numerics.memory_depth must be in [1, 14]");
  }
  if (cfg.numerics.trace_policy != "monitor_only" &&
      cfg.numerics.trace_policy != "renormalize_each_step") {
    throw ConfigError(
        "config: numerics.trace_policy must be monitor_only or "
        "renormalize_each_step");
  }
  if (cfg.numerics.memory_budget_mb <= 0.0) {
    throw ConfigError("config: numerics.memory_budget_mb must be > 0");
  }

  if (j.contains("sweep")) {
    SweepConfig sw;
    const auto& s = j.at("sweep");
    sw.parameter = detail::opt_string(s, "parameter", "", "sweep.");
    if (sw.parameter != "field_strength" && sw.parameter != "detuning" &&
        sw.parameter != "temperature" && sw.parameter != "rate") {
      throw ConfigError(
          "config: sweep.parameter must be one of field_strength, detuning, "
          "temperature, rate");
    }
    const auto& vals = detail::need_field(s, "values", "sweep.");
    if (!vals.is_array() || vals.empty()) {
      throw ConfigError("config: sweep.values must be a non-empty array");
    }
    for (const auto& v : vals) {
      if (!v.is_number()) {
        throw ConfigError("config: sweep.values entries must be numbers");
      }
      sw.values.push_back(v.get<double>());
    }
    cfg.sweep = sw;
  }
  return cfg;
}

/// Serializes a configuration back to a JSON document (used for meta.json;
/// reparsing it reproduces the run).
inline nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json model;
  model["type"] = cfg.model_type;
  if (cfg.model_type == "driven_dot") {
    nlohmann::json field;
    field["shape"] = cfg.dot.field.shape == PulseEnvelope::Shape::constant
                         ? "constant"
                         : "gaussian";
    field["amplitude_ps_inv"] = cfg.dot.field.amplitude_ps_inv;
    if (cfg.dot.field.shape == PulseEnvelope::Shape::gaussian) {
      field["center_ps"] = cfg.dot.field.center_ps;
      field["fwhm_ps"] = cfg.dot.field.fwhm_ps;
    }
    model["field"] = field;
    model["detuning_mev"] = cfg.dot.detuning_meV;
    model["radiative_rate_ps_inv"] = cfg.dot.radiative_rate_ps_inv;
    model["temperature_k"] = cfg.dot.temperature_K;
    model["phonons"] = cfg.dot.phonons;
  } else {
    model["coupling_hbar_g_mev"] = cfg.cavity.hbar_g_meV;
    model["detuning_mev"] = cfg.cavity.detuning_meV;
    model["cavity_loss_ps_inv"] = cfg.cavity.cavity_loss_ps_inv;
    model["temperature_k"] = cfg.cavity.temperature_K;
    model["phonons"] = cfg.cavity.phonons;
  }
  model["initial_state"] = cfg.initial_state;

  nlohmann::json num;
  num["dt_ps"] = cfg.numerics.dt_ps;
  num["n_steps"] = cfg.numerics.n_steps;
  num["memory_depth"] = cfg.numerics.memory_depth;
  num["trace_policy"] = cfg.numerics.trace_policy;
  num["memory_budget_mb"] = cfg.numerics.memory_budget_mb;
  num["kernel_abs_tol"] = cfg.numerics.kernel_abs_tol;

  nlohmann::json j;
  j["model"] = model;
  j["numerics"] = num;
  if (cfg.sweep) {
    j["sweep"] = {{"parameter", cfg.sweep->parameter},
                  {"values", cfg.sweep->values}};
  }
  if (!cfg.preset_name.empty()) j["preset"] = cfg.preset_name;
  return j;
}

/// Returns a copy of the configuration with one swept parameter replaced.
inline RunConfig with_sweep_value(RunConfig cfg, const std::string& parameter,
                                  double value) {
  const bool dot = cfg.model_type == "driven_dot";
  if (parameter == "field_strength") {
    detail::require_config(dot,
                           "sweep: field_strength applies to driven_dot only");
    cfg.dot.field.amplitude_ps_inv = value;
  } else if (parameter == "detuning") {
    (dot ? cfg.dot.detuning_meV : cfg.cavity.detuning_meV) = value;
  } else if (parameter == "temperature") {
    (dot ? cfg.dot.temperature_K : cfg.cavity.temperature_K) = value;
  } else if (parameter == "rate") {
    (dot ? cfg.dot.radiative_rate_ps_inv : cfg.cavity.cavity_loss_ps_inv) =
        value;
  } else {
    throw ConfigError("sweep: unknown parameter '" + parameter + "'");
  }
  cfg.sweep.reset();
  return cfg;
}

/// Model + engine inputs assembled from a configuration.
struct AssembledRun {
  AssembledModel model;
  SimulationConfig sim;
  InfluenceTable influence;
  std::string kernel_hash;  // empty when the run has no bath memory
  double temperature_K = 0.0;
};

/// Index of the exciton state for observable extraction.
inline int exciton_index(const RunConfig& cfg) {
  return cfg.model_type == "driven_dot" ? kDotExcitonIndex
                                        : kCavityExcitonIndex;
}

/// Builds the model, kernel/influence tables (through the cache when
/// cache_dir is non-empty) and the engine configuration.
inline AssembledRun assemble_run(const RunConfig& cfg,
                                 const std::string& cache_dir = "") {
  AssembledRun out;
  if (cfg.model_type == "driven_dot") {
    out.model = build_driven_dot(cfg.dot);
    out.temperature_K = cfg.dot.temperature_K;
  } else {
    out.model = build_dot_cavity(cfg.cavity);
    out.temperature_K = cfg.cavity.temperature_K;
  }

  const int dim = out.model.dim;
  DensityMatrix rho0 = DensityMatrix::Zero(dim, dim);
  if (cfg.initial_state == "ground") {
    rho0(0, 0) = 1.0;
  } else if (cfg.initial_state == "exciton") {
    rho0(exciton_index(cfg), exciton_index(cfg)) = 1.0;
  } else if (cfg.initial_state == "photon") {
    rho0(kCavityPhotonIndex, kCavityPhotonIndex) = 1.0;
  } else {  // mixed
    rho0 = DensityMatrix::Identity(dim, dim) / static_cast<double>(dim);
  }

  out.sim.dt = cfg.numerics.dt_ps;
  out.sim.n_steps = cfg.numerics.n_steps;
  out.sim.memory_depth = cfg.numerics.memory_depth;
  out.sim.initial_state = rho0;
  detail::require_config(
      cfg.numerics.trace_policy == "monitor_only" ||
          cfg.numerics.trace_policy == "renormalize_each_step",
      "config: numerics.trace_policy must be monitor_only or "
      "renormalize_each_step");
  out.sim.trace_policy = cfg.numerics.trace_policy == "renormalize_each_step"
                             ? TracePolicy::renormalize_each_step
                             : TracePolicy::monitor_only;
  out.sim.memory_budget_bytes =
      static_cast<std::size_t>(cfg.numerics.memory_budget_mb * 1024.0 * 1024.0);

  // Validate the tensor budget before any kernel work so oversized requests
  // fail fast (and before allocation).
  detail::require_config(
      adm_bytes_estimate(dim, out.sim.memory_depth) <=
          out.sim.memory_budget_bytes,
      "config: memory_depth " + std::to_string(out.sim.memory_depth) +
          " exceeds numerics.memory_budget_mb for this model");

  if (!out.model.sd.active_pairs.empty()) {
    const MemoryKernelTable table = load_or_compute_kernel_table(
        out.model.sd, out.sim.dt, out.sim.memory_depth, out.temperature_K,
        cache_dir, cfg.numerics.kernel_abs_tol);
    out.influence = build_influence_table(table);
    out.kernel_hash = kernel_cache_key(out.model.sd, out.sim.dt,
                                       out.sim.memory_depth, out.temperature_K);
  } else {
    out.influence = trivial_influence_table(dim, out.sim.memory_depth);
  }
  return out;
}

/// Runs one configuration end to end.
inline TimeSeries execute_run(const RunConfig& cfg,
                              const std::string& cache_dir = "",
                              int threads = 1) {
  AssembledRun a = assemble_run(cfg, cache_dir);
  a.sim.threads = threads;
  return run_path_integral(a.sim, a.model.h, a.model.channels, a.influence);
}

/// Mean exciton occupation over the final 10% of a trajectory (the
/// "long-time observable" reported by sweeps).
inline double long_time_occupation(const TimeSeries& ts, int state_index) {
  const std::size_t n = ts.states.size();
  detail::require_config(n > 0, "long_time_occupation: empty trajectory");
  const std::size_t start = n - std::max<std::size_t>(1, n / 10);
  double sum = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    sum += ts.states[i](state_index, state_index).real();
  }
  return sum / static_cast<double>(n - start);
}

/// Named presets for the shipped scenarios.
struct PresetInfo {
  std::string name;
  std::string description;
};

inline std::vector<PresetInfo> preset_catalog() {
  return {
      {"fig1a",
       "cw-driven dot, f = 1.0 1/ps, resonant, radiative decay 0.05 1/ps, "
       "phonons off; 0-50 ps at dt = 0.01 ps"},
      {"fig1d",
       "cw-driven dot, f = 1.0 1/ps, detuning +1 meV, decay 0.05 1/ps, "
       "GaAs phonons at 100 K; 200 ps at dt = 0.5 ps, depth 7"},
      {"fig2c-sweep",
       "field-strength sweep 0.5-8 1/ps, detuning +1 meV, decay 0.05 1/ps, "
       "phonons at 1 K; long-time occupation per field value, depth 10"},
      {"fig4-T1K",
       "dot-cavity, hbar g = 0.05 meV (estimate, not a published value), "
       "loss 0.1 1/ps, detuning sweep +/-1 meV, phonons at 1 K, start in "
       "the exciton; 300 ps at dt = 0.5 ps, depth 7"},
      {"fig4-T100K", "same as fig4-T1K at 100 K"},
  };
}

/// Materializes a preset configuration by name.
inline RunConfig preset_config(const std::string& name) {
  RunConfig cfg;
  cfg.preset_name = name;
  if (name == "fig1a") {
    cfg.model_type = "driven_dot";
    cfg.dot.field = PulseEnvelope::constant(1.0);
    cfg.dot.detuning_meV = 0.0;
    cfg.dot.radiative_rate_ps_inv = 0.05;
    cfg.dot.phonons = false;
    cfg.initial_state = "ground";
    cfg.numerics.dt_ps = 0.01;
    cfg.numerics.n_steps = 5000;
    cfg.numerics.memory_depth = 1;
    cfg.numerics.trace_policy = "monitor_only";
    return cfg;
  }
  if (name == "fig1d") {
    cfg.model_type = "driven_dot";
    cfg.dot.field = PulseEnvelope::constant(1.0);
    cfg.dot.detuning_meV = 1.0;
    cfg.dot.radiative_rate_ps_inv = 0.05;
    cfg.dot.temperature_K = 100.0;
    cfg.dot.phonons = true;
    cfg.initial_state = "ground";
    cfg.numerics.dt_ps = 0.5;
    cfg.numerics.n_steps = 400;
    cfg.numerics.memory_depth = 7;
    cfg.numerics.trace_policy = "renormalize_each_step";
    return cfg;
  }
  if (name == "fig2c-sweep") {
    cfg.model_type = "driven_dot";
    cfg.dot.field = PulseEnvelope::constant(1.0);
    cfg.dot.detuning_meV = 1.0;
    cfg.dot.radiative_rate_ps_inv = 0.05;
    cfg.dot.temperature_K = 1.0;
    cfg.dot.phonons = true;
    cfg.initial_state = "ground";
    cfg.numerics.dt_ps = 0.5;
    cfg.numerics.n_steps = 400;
    cfg.numerics.memory_depth = 10;
    cfg.numerics.trace_policy = "renormalize_each_step";
    cfg.sweep = SweepConfig{"field_strength",
                            {0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0}};
    return cfg;
  }
  if (name == "fig4-T1K" || name == "fig4-T100K") {
    cfg.model_type = "dot_cavity";
    cfg.cavity.hbar_g_meV = 0.05;
    cfg.cavity.detuning_meV = 1.0;
    cfg.cavity.cavity_loss_ps_inv = 0.1;
    cfg.cavity.temperature_K = name == "fig4-T1K" ? 1.0 : 100.0;
    cfg.cavity.phonons = true;
    cfg.initial_state = "exciton";
    cfg.numerics.dt_ps = 0.5;
    cfg.numerics.n_steps = 600;
    cfg.numerics.memory_depth = 7;
    cfg.numerics.trace_policy = "renormalize_each_step";
    cfg.sweep = SweepConfig{"detuning", {1.0, -1.0}};
    return cfg;
  }
  throw ConfigError("unknown preset '" + name + "' (see the presets command)");
}

}  // namespace qdpath
