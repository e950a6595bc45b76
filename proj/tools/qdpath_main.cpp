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

/// qdpath: config-driven front end for the combined relaxation + path-sum
/// engine.
///
/// Subcommands:
///   run       one trajectory  -> trajectory.csv + meta.json
///   sweep     one trajectory per swept value -> traj_NNN.csv + sweep_summary.csv
///   converge  dt-halving x memory-depth ladder -> converge_summary.csv
///   verify    internal oracle cross-checks -> pass/fail report
///   presets   list shipped presets (or print one as JSON)
///
/// Exit codes: 0 success, 2 configuration/validation error, 3 numerical error.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdpath/config.hpp"
#include "qdpath/oracles.hpp"

using namespace qdpath;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir = ".";
  std::string cache_dir;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs* args, bool needs_input) {
  auto* config_opt =
      cmd->add_option("--config", args->config_path,
                      "Path to a JSON run configuration");
  auto* preset_opt = cmd->add_option("--preset", args->preset,
                                     "Name of a shipped preset (see: presets)");
  config_opt->excludes(preset_opt);
  if (needs_input) {
    // Exactly one source of configuration.
    cmd->callback([args]() {
      if (args->config_path.empty() && args->preset.empty()) {
        throw CLI::ValidationError(
            "either --config or --preset is required");
      }
    });
  }
  cmd->add_option("--out", args->out_dir, "Output directory (created)");
  cmd->add_option("--threads", args->threads,
                  "Contraction worker threads per step")
      ->check(CLI::Range(1, 256));
  cmd->add_option("--cache-dir", args->cache_dir,
                  "Kernel cache directory (default: $QDPATH_CACHE_DIR)");
}

RunConfig load_config(const CommonArgs& args) {
  if (!args.preset.empty()) return preset_config(args.preset);
  std::ifstream f(args.config_path);
  detail::require_config(f.good(),
                         "cannot read config file: " + args.config_path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

std::string effective_cache_dir(const CommonArgs& args) {
  if (!args.cache_dir.empty()) return args.cache_dir;
  if (const char* env = std::getenv("QDPATH_CACHE_DIR")) return env;
  return "";
}

nlohmann::json run_metadata(const RunConfig& cfg, const AssembledRun& a,
                            const TimeSeries& ts) {
  nlohmann::json meta;
  meta["tool"] = "qdpath";
  meta["format_version"] = 1;
  meta["config"] = to_json(cfg);
  meta["kernel_hash"] = a.kernel_hash;
  meta["state_labels"] = a.model.state_labels;
  meta["polaron_shift_mev"] = a.model.polaron_shift_meV;
  meta["diagnostics"] = {
      {"max_trace_drift",
       *std::max_element(ts.trace_drift.begin(), ts.trace_drift.end())},
      {"max_hermiticity_defect", ts.max_hermiticity_defect},
      {"wall_ms_per_step", ts.wall_ms_per_step},
      {"peak_tensor_bytes", ts.peak_bytes},
  };
  return meta;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  detail::require_config(f.good(), "cannot write: " + path.string());
  f << j.dump(2) << "\n";
}

int cmd_run(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  detail::require_config(!cfg.sweep.has_value(),
                         "config contains a sweep block; use the sweep "
                         "subcommand for it");
  std::filesystem::create_directories(args.out_dir);

  AssembledRun a = assemble_run(cfg, effective_cache_dir(args));
  a.sim.threads = args.threads;
  const TimeSeries ts =
      run_path_integral(a.sim, a.model.h, a.model.channels, a.influence);

  const std::filesystem::path out(args.out_dir);
  write_trajectory_csv((out / "trajectory.csv").string(), ts, a.model.dim);
  write_json(out / "meta.json", run_metadata(cfg, a, ts));
  std::printf("wrote %s and meta.json (%d steps, %.3f ms/step)\n",
              (out / "trajectory.csv").string().c_str(), a.sim.n_steps,
              ts.wall_ms_per_step);
  return 0;
}

int cmd_sweep(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  detail::require_config(cfg.sweep.has_value(),
                         "config has no sweep block (parameter + values)");
  std::filesystem::create_directories(args.out_dir);
  const std::filesystem::path out(args.out_dir);
  const std::string cache = effective_cache_dir(args);

  std::ofstream summary(out / "sweep_summary.csv");
  detail::require_config(summary.good(), "cannot write sweep_summary.csv");
  summary << "parameter,value,long_time_occupation,trajectory\n";

  nlohmann::json meta;
  meta["tool"] = "qdpath";
  meta["format_version"] = 1;
  meta["config"] = to_json(cfg);
  meta["points"] = nlohmann::json::array();

  for (std::size_t i = 0; i < cfg.sweep->values.size(); ++i) {
    const double value = cfg.sweep->values[i];
    const RunConfig point =
        with_sweep_value(cfg, cfg.sweep->parameter, value);
    AssembledRun a = assemble_run(point, cache);
    a.sim.threads = args.threads;
    const TimeSeries ts =
        run_path_integral(a.sim, a.model.h, a.model.channels, a.influence);
    const double occupation = long_time_occupation(ts, exciton_index(point));

    char name[32];
    std::snprintf(name, sizeof(name), "traj_%03zu.csv", i);
    write_trajectory_csv((out / name).string(), ts, a.model.dim);
    summary << cfg.sweep->parameter << "," << format_double(value) << ","
            << format_double(occupation) << "," << name << "\n";
    meta["points"].push_back({{"value", value},
                              {"trajectory", name},
                              {"long_time_occupation", occupation},
                              {"kernel_hash", a.kernel_hash}});
    std::printf("%s = %-10s -> occupation %.6f\n",
                cfg.sweep->parameter.c_str(), format_double(value).c_str(),
                occupation);
  }
  detail::require_numeric(summary.good(), "sweep_summary.csv write failed");
  summary.close();
  write_json(out / "meta.json", meta);
  std::printf("wrote %s\n", (out / "sweep_summary.csv").string().c_str());
  return 0;
}

int cmd_converge(const CommonArgs& args) {
  const RunConfig base = load_config(args);
  detail::require_config(!base.sweep.has_value(),
                         "convergence studies take a single scenario, not a "
                         "sweep");
  std::filesystem::create_directories(args.out_dir);
  const std::filesystem::path out(args.out_dir);
  const std::string cache = effective_cache_dir(args);

  struct Row {
    double dt;
    int depth;
    double occupation;
    double deviation;
  };
  std::vector<Row> rows;

  const int base_depth = base.numerics.memory_depth;
  const double duration = base.numerics.dt_ps * base.numerics.n_steps;
  for (int halvings = 0; halvings <= 1; ++halvings) {
    const double dt = base.numerics.dt_ps / (halvings + 1.0);
    for (int depth = std::max(1, base_depth - 2);
         depth <= std::min(kMaxMemoryDepth, base_depth + 2); ++depth) {
      RunConfig point = base;
      point.numerics.dt_ps = dt;
      point.numerics.n_steps =
          static_cast<int>(std::lround(duration / dt));
      point.numerics.memory_depth = depth;
      AssembledRun a = assemble_run(point, cache);
      a.sim.threads = args.threads;
      const TimeSeries ts =
          run_path_integral(a.sim, a.model.h, a.model.channels, a.influence);
      rows.push_back(
          {dt, depth, long_time_occupation(ts, exciton_index(point)), 0.0});
      std::printf("dt = %-8s depth = %2d -> occupation %.8f\n",
                  format_double(dt).c_str(), depth, rows.back().occupation);
    }
  }

  // Deviations are measured against the most refined run (smallest dt,
  // largest depth); the recommendation is the cheapest setting within 1e-3.
  const double reference = rows.back().occupation;
  double max_dev = 0.0;
  const Row* recommended = &rows.back();
  for (auto& r : rows) {
    r.deviation = std::abs(r.occupation - reference);
    max_dev = std::max(max_dev, r.deviation);
  }
  for (const auto& r : rows) {
    const bool cheaper = r.dt > recommended->dt ||
                         (r.dt == recommended->dt &&
                          r.depth < recommended->depth);
    if (r.deviation < 1e-3 && cheaper) recommended = &r;
  }

  std::ofstream csv(out / "converge_summary.csv");
  detail::require_config(csv.good(), "cannot write converge_summary.csv");
  csv << "dt_ps,memory_depth,long_time_occupation,deviation_from_reference\n";
  for (const auto& r : rows) {
    csv << format_double(r.dt) << "," << r.depth << ","
        << format_double(r.occupation) << "," << format_double(r.deviation)
        << "\n";
  }
  detail::require_numeric(csv.good(), "converge_summary.csv write failed");
  csv.close();

  nlohmann::json meta;
  meta["tool"] = "qdpath";
  meta["config"] = to_json(base);
  meta["max_pairwise_deviation"] = max_dev;
  meta["recommended"] = {{"dt_ps", recommended->dt},
                         {"memory_depth", recommended->depth}};
  write_json(out / "meta.json", meta);
  std::printf(
      "max deviation %.2e; recommended dt = %s ps, memory depth = %d\n",
      max_dev, format_double(recommended->dt).c_str(), recommended->depth);
  return 0;
}

int cmd_verify() {
  bool all_ok = true;
  const auto report = [&all_ok](const char* name, bool ok, double dev,
                                double gate) {
    std::printf("%-44s %s  (max deviation %.2e, gate %.0e)\n", name,
                ok ? "PASS" : "FAIL", dev, gate);
    all_ok = all_ok && ok;
  };

  // 1. Path enumeration order must not matter.
  {
    std::mt19937_64 rng(2027);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix h(2, 2);
    h(0, 0) = u(rng);
    h(1, 1) = u(rng);
    const Complex z(u(rng), u(rng));
    h(0, 1) = z;
    h(1, 0) = std::conj(z);
    Matrix a = Matrix::Zero(2, 2);
    a(0, 1) = 1.0;
    const HamiltonianSpec hs = HamiltonianSpec::constant(h);
    const std::vector<LindbladChannel> ch = {
        LindbladChannel::constant(a, 0.2)};
    const SpectralDensity sd =
        SpectralDensity::gaas(2, 1, GaAsDeformationParams{});
    const InfluenceTable influence =
        build_influence_table(compute_kernel_table(sd, 0.5, 4, 100.0));
    DensityMatrix rho0(2, 2);
    rho0 << 0.6, Complex(0.2, 0.1), Complex(0.2, -0.1), 0.4;
    std::vector<Superoperator> props;
    for (int k = 0; k < 4; ++k) {
      props.push_back(build_step_propagator(hs, ch, k * 0.5, 0.5));
    }
    const DensityMatrix fwd = full_path_sum(4, props, influence, rho0, false);
    const DensityMatrix rev = full_path_sum(4, props, influence, rho0, true);
    const double dev = (fwd - rev).cwiseAbs().maxCoeff();
    report("path-sum enumeration-order invariance", dev <= 1e-13, dev, 1e-13);
  }

  // 2. The iterated tensor equals the literal path sum at full memory.
  {
    const AssembledModel am = [] {
      DrivenDotModel m;
      m.field = PulseEnvelope::constant(1.0);
      m.detuning_meV = 1.0;
      m.radiative_rate_ps_inv = 0.05;
      m.temperature_K = 100.0;
      m.phonons = true;
      return build_driven_dot(m);
    }();
    const MemoryKernelTable kt = compute_kernel_table(am.sd, 0.5, 4, 100.0);
    const InfluenceTable influence = build_influence_table(kt);
    SimulationConfig cfg;
    cfg.dt = 0.5;
    cfg.n_steps = 4;
    cfg.memory_depth = 4;
    cfg.initial_state = DensityMatrix::Zero(2, 2);
    cfg.initial_state(0, 0) = 1.0;
    const TimeSeries ts =
        run_path_integral(cfg, am.h, am.channels, influence);
    std::vector<Superoperator> props;
    for (int k = 0; k < 4; ++k) {
      props.push_back(build_step_propagator(am.h, am.channels, k * 0.5, 0.5));
    }
    const DensityMatrix ref =
        full_path_sum(4, props, influence, cfg.initial_state);
    const double dev = (ts.states.back() - ref).cwiseAbs().maxCoeff();
    report("iterated tensor vs literal path sum", dev <= 1e-12, dev, 1e-12);
  }

  // 3. Splitting error order for a pulsed, relaxing, phonon-free scenario.
  {
    DrivenDotModel m;
    m.field = PulseEnvelope::gaussian(1.5, 5.0, 2.0);
    m.detuning_meV = 0.5;
    m.radiative_rate_ps_inv = 0.05;
    m.phonons = false;
    const AssembledModel am = build_driven_dot(m);
    DensityMatrix rho0 = DensityMatrix::Zero(2, 2);
    rho0(0, 0) = 1.0;
    const double dt_ref = 0.00125;
    std::vector<double> grid;
    for (int k = 0; k <= 8000; ++k) grid.push_back(k * dt_ref);
    const TimeSeries ref = lindblad_ode_solve(am.h, am.channels, rho0, grid);

    const std::vector<double> steps = {0.2, 0.1, 0.05};
    std::vector<double> errs;
    for (double dt : steps) {
      SimulationConfig cfg;
      cfg.dt = dt;
      cfg.n_steps = static_cast<int>(std::lround(10.0 / dt));
      cfg.memory_depth = 1;
      cfg.initial_state = rho0;
      const TimeSeries ts = run_path_integral(cfg, am.h, am.channels,
                                              trivial_influence_table(2, 1));
      double err = 0.0;
      const int stride = static_cast<int>(std::lround(dt / dt_ref));
      for (std::size_t k = 0; k < ts.states.size(); ++k) {
        err = std::max(err, std::abs(ts.states[k](1, 1).real() -
                                     ref.states[k * stride](1, 1).real()));
      }
      errs.push_back(err);
    }
    const double slope = fit_power_law_slope(steps, errs);
    report("splitting error order (slope vs 2.0)", std::abs(slope - 2.0) <= 0.3,
           std::abs(slope - 2.0), 0.3);
  }

  if (!all_ok) throw NumericalError("verification failed");
  return 0;
}

int cmd_presets(const std::string& selected) {
  if (!selected.empty()) {
    std::cout << to_json(preset_config(selected)).dump(2) << "\n";
    return 0;
  }
  for (const auto& info : preset_catalog()) {
    std::printf("%-12s %s\n", info.name.c_str(), info.description.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "qdpath: open-system dynamics with exact per-step relaxation folded "
      "into an iterated real-time path sum"};
  app.require_subcommand(1);

  CommonArgs run_args, sweep_args, conv_args;
  std::string preset_name;

  auto* run = app.add_subcommand("run", "Propagate one configuration");
  add_common(run, &run_args, true);
  auto* sweep = app.add_subcommand("sweep",
                                   "Propagate every value of a parameter "
                                   "sweep");
  add_common(sweep, &sweep_args, true);
  auto* conv = app.add_subcommand("converge",
                                  "Map convergence over dt halving and "
                                  "memory depth");
  add_common(conv, &conv_args, true);
  app.add_subcommand("verify", "Run internal oracle cross-checks");
  auto* presets = app.add_subcommand("presets", "List shipped presets");
  presets->add_option("--preset", preset_name,
                      "Print this preset's configuration as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (conv->parsed()) return cmd_converge(conv_args);
    if (app.get_subcommand("verify")->parsed()) return cmd_verify();
    return cmd_presets(preset_name);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
