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

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qdpath/adm.hpp"
#include "qdpath/bath.hpp"
#include "qdpath/errors.hpp"

/// @file io.hpp
/// Trajectory CSV output and the kernel-table disk cache.
///
/// All floating-point values are printed with %.17g, which round-trips IEEE
/// doubles exactly: a cache hit reproduces the computed table bit for bit,
/// and identical runs produce byte-identical CSV files.

namespace qdpath {

/// FNV-1a 64-bit hash; keys the kernel cache by canonical parameter strings.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

/// Shortest exact decimal representation we rely on: 17 significant digits.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Cache key: hex FNV-1a of the density parameters plus (dt, depth, T).
inline std::string kernel_cache_key(const SpectralDensity& sd, double dt,
                                    int n_c, double temperature_K) {
  std::ostringstream canon;
  canon << sd.cache_token() << ";dt=" << format_double(dt) << ";nc=" << n_c
        << ";T=" << format_double(temperature_K);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canon.str())));
  return buf;
}

/// Writes a trajectory as CSV: t_ps, re/im of every upper-triangle element
/// (i <= j), then the per-step trace drift.
inline void write_trajectory_csv(const std::string& path, const TimeSeries& ts,
                                 int dim) {
  std::ofstream f(path);
  detail::require_config(f.good(), "cannot open for writing: " + path);
  f << "t_ps";
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      f << ",re_rho_" << i << j << ",im_rho_" << i << j;
    }
  }
  f << ",trace_drift\n";
  for (std::size_t n = 0; n < ts.t_ps.size(); ++n) {
    f << format_double(ts.t_ps[n]);
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j) {
        const Complex z = ts.states[n](i, j);
        f << "," << format_double(z.real()) << "," << format_double(z.imag());
      }
    }
    f << "," << format_double(ts.trace_drift[n]) << "\n";
  }
  detail::require_numeric(f.good(), "write failed: " + path);
}

/// Kernel cache file layout (versioned CSV):
///   qdpath-kernel-cache,1
///   key,<hex>
///   dim,<N> / depth,<n_c> / dt,<ps> / temperature,<K> / residual,<est>
///   shift,<state>,<meV>            (one line per state)
///   entry,<lag>,<nu>,<mu>,<re>,<im> (active pairs only)
inline void save_kernel_table(const MemoryKernelTable& table,
                              const std::string& cache_dir,
                              const std::string& key) {
  std::filesystem::create_directories(cache_dir);
  const std::string path = cache_dir + "/kernel_" + key + ".csv";
  std::ofstream f(path);
  detail::require_config(f.good(), "cannot open cache file: " + path);
  f << "qdpath-kernel-cache,1\n";
  f << "key," << key << "\n";
  f << "dim," << table.dim << "\n";
  f << "depth," << table.depth << "\n";
  f << "dt," << format_double(table.dt) << "\n";
  f << "temperature," << format_double(table.temperature) << "\n";
  f << "residual," << format_double(table.worst_residual) << "\n";
  for (int s = 0; s < table.dim; ++s) {
    f << "shift," << s << "," << format_double(table.polaron_shift_meV(s))
      << "\n";
  }
  for (int lag = 0; lag < table.depth; ++lag) {
    for (int nu = 0; nu < table.dim; ++nu) {
      for (int mu = 0; mu < table.dim; ++mu) {
        const Complex k = table.entries[lag](nu, mu);
        if (k == Complex{}) continue;
        f << "entry," << lag << "," << nu << "," << mu << ","
          << format_double(k.real()) << "," << format_double(k.imag()) << "\n";
      }
    }
  }
  detail::require_numeric(f.good(), "cache write failed: " + path);
}

/// Loads a cached table if present and structurally consistent with the
/// request; returns nullopt otherwise (caller recomputes).
inline std::optional<MemoryKernelTable> load_kernel_table(
    const std::string& cache_dir, const std::string& key) {
  const std::string path = cache_dir + "/kernel_" + key + ".csv";
  std::ifstream f(path);
  if (!f.good()) return std::nullopt;

  MemoryKernelTable table;
  std::string line;
  if (!std::getline(f, line) || line != "qdpath-kernel-cache,1") {
    return std::nullopt;  // unknown version
  }
  bool have_key = false;
  std::vector<std::array<double, 5>> entries;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tag;
    std::getline(ss, tag, ',');
    std::string rest;
    std::getline(ss, rest);
    if (tag == "key") {
      if (rest != key) return std::nullopt;
      have_key = true;
    } else if (tag == "dim") {
      table.dim = std::stoi(rest);
    } else if (tag == "depth") {
      table.depth = std::stoi(rest);
    } else if (tag == "dt") {
      table.dt = std::strtod(rest.c_str(), nullptr);
    } else if (tag == "temperature") {
      table.temperature = std::strtod(rest.c_str(), nullptr);
    } else if (tag == "residual") {
      table.worst_residual = std::strtod(rest.c_str(), nullptr);
    } else if (tag == "shift") {
      if (table.polaron_shift_meV.size() == 0) {
        if (table.dim <= 0) return std::nullopt;
        table.polaron_shift_meV = Eigen::VectorXd::Zero(table.dim);
      }
      std::istringstream rs(rest);
      std::string a, b;
      std::getline(rs, a, ',');
      std::getline(rs, b);
      table.polaron_shift_meV(std::stoi(a)) = std::strtod(b.c_str(), nullptr);
    } else if (tag == "entry") {
      std::istringstream rs(rest);
      std::array<double, 5> e{};
      std::string tok;
      for (int i = 0; i < 5 && std::getline(rs, tok, ','); ++i) {
        e[i] = std::strtod(tok.c_str(), nullptr);
      }
      entries.push_back(e);
    }
  }
  if (!have_key || table.dim <= 0 || table.depth <= 0) return std::nullopt;
  if (table.polaron_shift_meV.size() == 0) {
    table.polaron_shift_meV = Eigen::VectorXd::Zero(table.dim);
  }
  table.entries.assign(table.depth, Matrix::Zero(table.dim, table.dim));
  for (const auto& e : entries) {
    const int lag = static_cast<int>(e[0]);
    const int nu = static_cast<int>(e[1]);
    const int mu = static_cast<int>(e[2]);
    if (lag < 0 || lag >= table.depth || nu < 0 || nu >= table.dim || mu < 0 ||
        mu >= table.dim) {
      return std::nullopt;
    }
    table.entries[lag](nu, mu) = Complex{e[3], e[4]};
  }
  return table;
}

/// Cache-aware table construction.  Empty cache_dir disables caching.
inline MemoryKernelTable load_or_compute_kernel_table(
    const SpectralDensity& sd, double dt, int n_c, double temperature_K,
    const std::string& cache_dir, double abs_tol = 1e-12) {
  if (cache_dir.empty()) {
    return compute_kernel_table(sd, dt, n_c, temperature_K, abs_tol);
  }
  const std::string key = kernel_cache_key(sd, dt, n_c, temperature_K);
  if (auto cached = load_kernel_table(cache_dir, key)) {
    if (cached->dim == sd.dim && cached->depth == n_c && cached->dt == dt &&
        cached->temperature == temperature_K) {
      return *cached;
    }
  }
  MemoryKernelTable table = compute_kernel_table(sd, dt, n_c, temperature_K,
                                                 abs_tol);
  save_kernel_table(table, cache_dir, key);
  return table;
}

}  // namespace qdpath
