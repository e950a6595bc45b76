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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qdpath/detail/quadrature.hpp"
#include "qdpath/errors.hpp"
#include "qdpath/liouville.hpp"
#include "qdpath/units.hpp"

/// @file bath.hpp
/// Harmonic-continuum spectral densities J(omega) and the discretized
/// two-time memory kernels K(l*dt) they generate, including the GaAs
/// LA-phonon deformation-potential form and the polaron shift.
///
/// Conventions: omega in ps^-1, J(omega) in ps^-1, kernels dimensionless,
/// temperatures in K (T = 0 uses the coth -> 1 limit).  The kernel at lag
/// l >= 1 (time separation tau = l*dt between two step windows) is
///
///   K(tau) = 2 * int_0^inf dw J(w)/w^2 (1 - cos w*dt)
///            * [coth(hbar*w / 2 kB T) cos(w*tau) - i sin(w*tau)],
///
/// and the equal-time (lag 0) kernel for one step window is
///
///   K(0) = int_0^inf dw J(w)/w^2
///          * [coth(hbar*w / 2 kB T)(1 - cos w*dt) + i (sin w*dt - w*dt)].
///
/// The -i*w*dt piece of the lag-0 kernel carries the polaronic level shift
/// -hbar * int J(w)/w dw per coupled state; it is reported separately so
/// model builders can define detunings from the shifted resonance.

namespace qdpath {

/// High-frequency cutoff shape for the power-law spectral density.
enum class CutoffShape { gaussian, exponential };

/// GaAs LA-phonon deformation-potential parameters (SI where noted).
/// Defaults are the standard bulk-GaAs set with a 4.0 nm electron
/// localization length and hole length a_e / 1.15.
struct GaAsDeformationParams {
  double mass_density_kg_m3 = 5370.0;
  double sound_velocity_m_s = 5110.0;
  double deformation_e_eV = 7.0;
  double deformation_h_eV = -3.5;
  double localization_e_nm = 4.0;
  double localization_h_nm = 4.0 / 1.15;
};

/// J(omega) = prefactor * omega^exponent * cutoff(omega / cutoff_freq),
/// cutoff(x) = exp(-x^2) (gaussian) or exp(-x) (exponential).
struct PowerLawParams {
  double prefactor = 0.0;       // ps^(exponent-2), so that J is ps^-1
  double exponent = 3.0;        // super-Ohmic for > 1
  double cutoff_ps_inv = 1.0;
  CutoffShape shape = CutoffShape::gaussian;
};

/// Piecewise-linear tabulated density on an ascending grid starting at
/// omega = 0 with J(0) = 0.  Queries beyond the grid are an error
/// (no extrapolation).
struct TabulatedParams {
  std::vector<double> omega_ps_inv;
  std::vector<double> j_ps_inv;
};

/// A spectral density together with the set of state pairs it acts on.
/// For the pure-dephasing coupling treated here, active_pairs lists the
/// (nu, mu) state-index pairs with nonvanishing J_{nu mu}; all active pairs
/// share the single functional form (real couplings, so the kernel matrix
/// is symmetric).  Pure-dephasing models of a single coupled state |X> use
/// the one-element set {(X, X)}.
struct SpectralDensity {
  std::variant<GaAsDeformationParams, PowerLawParams, TabulatedParams> form =
      PowerLawParams{};
  int dim = 2;
  std::vector<std::pair<int, int>> active_pairs;

  /// GaAs density coupled to a single state index of an N-level system.
  static SpectralDensity gaas(int dim, int coupled_state,
                              GaAsDeformationParams p = {}) {
    detail::require_config(coupled_state >= 0 && coupled_state < dim,
                           "SpectralDensity::gaas: coupled state out of range");
    SpectralDensity sd;
    sd.form = p;
    sd.dim = dim;
    sd.active_pairs = {{coupled_state, coupled_state}};
    return sd;
  }

  /// No bath coupling at all (J = 0, empty active set).
  static SpectralDensity none(int dim) {
    SpectralDensity sd;
    sd.form = PowerLawParams{};  // prefactor 0 -> J = 0
    sd.dim = dim;
    sd.active_pairs = {};
    return sd;
  }

  bool pair_active(int nu, int mu) const {
    return std::find(active_pairs.begin(), active_pairs.end(),
                     std::make_pair(nu, mu)) != active_pairs.end();
  }

  /// Canonical parameter string, input to cache-key hashing.  All doubles
  /// printed with 17 significant digits so distinct parameters never collide.
  std::string cache_token() const {
    char buf[512];
    std::string out;
    if (const auto* g = std::get_if<GaAsDeformationParams>(&form)) {
      std::snprintf(buf, sizeof(buf),
                    "gaas;%.17g;%.17g;%.17g;%.17g;%.17g;%.17g",
                    g->mass_density_kg_m3, g->sound_velocity_m_s,
                    g->deformation_e_eV, g->deformation_h_eV,
                    g->localization_e_nm, g->localization_h_nm);
      out = buf;
    } else if (const auto* p = std::get_if<PowerLawParams>(&form)) {
      std::snprintf(buf, sizeof(buf), "powerlaw;%.17g;%.17g;%.17g;%d",
                    p->prefactor, p->exponent, p->cutoff_ps_inv,
                    p->shape == CutoffShape::gaussian ? 0 : 1);
      out = buf;
    } else {
      const auto& t = std::get<TabulatedParams>(form);
      out = "tab";
      for (std::size_t i = 0; i < t.omega_ps_inv.size(); ++i) {
        std::snprintf(buf, sizeof(buf), ";%.17g:%.17g", t.omega_ps_inv[i],
                      t.j_ps_inv[i]);
        out += buf;
      }
    }
    out += ";dim=" + std::to_string(dim) + ";pairs=";
    for (const auto& [a, b] : active_pairs) {
      out += std::to_string(a) + "," + std::to_string(b) + ";";
    }
    return out;
  }
};

/// Evaluates J(omega) in ps^-1 for omega >= 0 (ps^-1).
///
/// The GaAs branch works in SI internally: with w = omega * 1e12 in s^-1,
///
///   J_SI(w) = w^3 / (4 pi^2 rho hbar c_s^5)
///             * (D_e e^{-w^2 a_e^2 / 4 c_s^2} - D_h e^{-w^2 a_h^2 / 4 c_s^2})^2
///
/// in s^-1, and the returned value is J_SI * 1e-12.  Conversion constants
/// (hbar = 1.054571817e-34 J s, 1 eV = 1.602176634e-19 J, 1 ps^-1 = 1e12 s^-1)
/// are the named constants in units.hpp.
inline double evaluate_spectral_density(const SpectralDensity& sd,
                                        double omega) {
  detail::require_config(omega >= 0.0,
                         "evaluate_spectral_density: omega must be >= 0");
  if (const auto* g = std::get_if<GaAsDeformationParams>(&sd.form)) {
    if (omega == 0.0) return 0.0;
    const double w = omega * per_ps_in_per_s;
    const double cs = g->sound_velocity_m_s;
    const double pref =
        w * w * w /
        (4.0 * M_PI * M_PI * g->mass_density_kg_m3 * hbar_J_s * std::pow(cs, 5));
    const double ae = g->localization_e_nm * 1e-9;
    const double ah = g->localization_h_nm * 1e-9;
    const double fe = g->deformation_e_eV * eV_J *
                      std::exp(-w * w * ae * ae / (4.0 * cs * cs));
    const double fh = g->deformation_h_eV * eV_J *
                      std::exp(-w * w * ah * ah / (4.0 * cs * cs));
    const double diff = fe - fh;
    return pref * diff * diff / per_ps_in_per_s;
  }
  if (const auto* p = std::get_if<PowerLawParams>(&sd.form)) {
    if (omega == 0.0) return 0.0;
    const double x = omega / p->cutoff_ps_inv;
    const double cut =
        p->shape == CutoffShape::gaussian ? std::exp(-x * x) : std::exp(-x);
    return p->prefactor * std::pow(omega, p->exponent) * cut;
  }
  const auto& t = std::get<TabulatedParams>(sd.form);
  detail::require_config(t.omega_ps_inv.size() >= 2 &&
                             t.omega_ps_inv.size() == t.j_ps_inv.size(),
                         "tabulated spectral density needs >= 2 samples");
  detail::require_config(t.omega_ps_inv.front() == 0.0 && t.j_ps_inv.front() == 0.0,
                         "tabulated spectral density must start at J(0) = 0");
  detail::require_config(omega <= t.omega_ps_inv.back(),
                         "tabulated spectral density queried beyond its grid "
                         "(no extrapolation)");
  const auto it = std::upper_bound(t.omega_ps_inv.begin(), t.omega_ps_inv.end(),
                                   omega);
  const std::size_t hi = std::min<std::size_t>(
      t.omega_ps_inv.size() - 1,
      static_cast<std::size_t>(it - t.omega_ps_inv.begin()));
  const std::size_t lo = hi - (hi > 0 ? 1 : 0);
  if (hi == lo) return t.j_ps_inv[lo];
  const double f = (omega - t.omega_ps_inv[lo]) /
                   (t.omega_ps_inv[hi] - t.omega_ps_inv[lo]);
  return (1.0 - f) * t.j_ps_inv[lo] + f * t.j_ps_inv[hi];
}

namespace detail {

/// Upper integration limit: past the spectral peak, first frequency where
/// J drops below tail_rel * J_peak (with a 20% safety margin).  The scan is
/// deterministic; tabulated densities integrate over their full grid.
inline double integration_upper_limit(const SpectralDensity& sd,
                                      double tail_rel = 1e-22) {
  if (const auto* t = std::get_if<TabulatedParams>(&sd.form)) {
    return t->omega_ps_inv.back();
  }
  double j_peak = 0.0;
  const double step = 0.05;
  double w = step;
  double w_end = step;
  for (int i = 0; i < 400000; ++i, w += step) {
    const double j = evaluate_spectral_density(sd, w);
    if (j > j_peak) j_peak = j;
    if (j_peak > 0.0 && j <= tail_rel * j_peak) {
      w_end = w;
      break;
    }
    w_end = w;
  }
  return 1.2 * w_end;
}

/// coth(x) with a series guard for small arguments (1/x + x/3 - x^3/45).
inline double coth(double x) {
  if (std::abs(x) < 1e-6) {
    return 1.0 / x + x / 3.0 - x * x * x / 45.0;
  }
  return 1.0 / std::tanh(x);
}

}  // namespace detail

/// Discretized memory kernels K_{nu mu}(l*dt) for lags l = 0..depth-1 plus
/// the per-state polaron shift.  Pairs outside the spectral density's active
/// set hold exact zeros.  entries[l] is the N x N state-pair matrix at lag l;
/// it is symmetric because couplings are real.
struct MemoryKernelTable {
  int dim = 0;
  int depth = 0;           // number of stored lags (= memory depth n_c)
  double dt = 0.0;         // step length (ps)
  double temperature = 0;  // K
  std::vector<Matrix> entries;
  Eigen::VectorXd polaron_shift_meV;  // per state; <= 0 for coupled states
  double worst_residual = 0.0;        // largest per-entry quadrature estimate

  Complex at(int lag, int nu, int mu) const { return entries.at(lag)(nu, mu); }
};

namespace detail {

/// Scalar kernel entry at one lag for a given density/step/temperature.
/// Splits the semi-infinite integral into half-period panels of the fastest
/// oscillation present (cos w*tau against the 1 - cos w*dt window factor).
inline Complex kernel_entry(const SpectralDensity& sd, double dt,
                            double temperature, int lag, double upper,
                            double* err_out) {
  const double beta_scale =
      temperature > 0.0 ? hbar_meV_ps / (2.0 * kB_meV_per_K * temperature) : 0.0;
  const auto coth_factor = [beta_scale](double w) {
    return beta_scale > 0.0 ? coth(beta_scale * w) : 1.0;
  };
  // J(w)/w^2 * (1 - cos w dt) with the cancellation-free half-angle form.
  const auto window = [&sd, dt](double w) {
    const double s = std::sin(0.5 * w * dt);
    return evaluate_spectral_density(sd, w) / (w * w) * 2.0 * s * s;
  };

  const double tau = lag * dt;
  const double panel = M_PI / std::max({tau, dt, 1.0});
  double e_re = 0.0, e_im = 0.0;
  double re, im;
  if (lag == 0) {
    re = integrate_panels(
        [&](double w) {
          if (w <= 0.0) return 0.0;
          return window(w) * coth_factor(w);
        },
        upper, panel, &e_re);
    im = integrate_panels(
        [&](double w) {
          if (w <= 0.0) return 0.0;
          return evaluate_spectral_density(sd, w) / (w * w) *
                 (std::sin(w * dt) - w * dt);
        },
        upper, panel, &e_im);
  } else {
    re = 2.0 * integrate_panels(
                   [&](double w) {
                     if (w <= 0.0) return 0.0;
                     return window(w) * coth_factor(w) * std::cos(w * tau);
                   },
                   upper, panel, &e_re);
    im = -2.0 * integrate_panels(
                    [&](double w) {
                      if (w <= 0.0) return 0.0;
                      return window(w) * std::sin(w * tau);
                    },
                    upper, panel, &e_im);
  }
  if (err_out != nullptr) *err_out = std::max(e_re, e_im);
  return {re, im};
}

}  // namespace detail

/// Reorganization frequency int_0^inf J(w)/w dw in ps^-1; the polaron shift
/// per coupled state is -hbar times this value (in meV, negative).
inline double reorganization_frequency(const SpectralDensity& sd) {
  const double upper = detail::integration_upper_limit(sd);
  return detail::integrate_panels(
      [&sd](double w) {
        if (w <= 0.0) return 0.0;
        return evaluate_spectral_density(sd, w) / w;
      },
      upper, M_PI, nullptr);
}

/// Builds the full kernel table for lags 0..n_c-1.
///
/// Each entry is evaluated to an absolute tolerance abs_tol by the panelled
/// Gauss-Kronrod scheme in detail/quadrature.hpp; the high-frequency tail is
/// truncated where J falls 22 decades below its peak (the Gaussian/exponential
/// cutoffs make the discarded tail far smaller than abs_tol).  Throws
/// NumericalError carrying the worst entry's residual estimate if any entry
/// fails to converge.  T = 0 is accepted and uses coth -> 1.
inline MemoryKernelTable compute_kernel_table(const SpectralDensity& sd,
                                              double dt, int n_c,
                                              double temperature_K,
                                              double abs_tol = 1e-12) {
  detail::require_config(dt > 0.0, "compute_kernel_table: dt must be > 0");
  detail::require_config(n_c >= 1, "compute_kernel_table: n_c must be >= 1");
  detail::require_config(temperature_K >= 0.0,
                         "compute_kernel_table: temperature must be >= 0");
  for (const auto& [nu, mu] : sd.active_pairs) {
    detail::require_config(nu >= 0 && nu < sd.dim && mu >= 0 && mu < sd.dim,
                           "compute_kernel_table: active pair out of range");
    detail::require_config(sd.pair_active(mu, nu),
                           "compute_kernel_table: active-pair set must be "
                           "symmetric (real couplings)");
  }

  MemoryKernelTable table;
  table.dim = sd.dim;
  table.depth = n_c;
  table.dt = dt;
  table.temperature = temperature_K;
  table.entries.assign(n_c, Matrix::Zero(sd.dim, sd.dim));
  table.polaron_shift_meV = Eigen::VectorXd::Zero(sd.dim);

  if (sd.active_pairs.empty()) return table;  // J = 0 everywhere

  const double upper = detail::integration_upper_limit(sd);
  double worst = 0.0;
  for (int lag = 0; lag < n_c; ++lag) {
    double err = 0.0;
    const Complex k =
        detail::kernel_entry(sd, dt, temperature_K, lag, upper, &err);
    worst = std::max(worst, err);
    for (const auto& [nu, mu] : sd.active_pairs) {
      table.entries[lag](nu, mu) = k;
    }
  }
  table.worst_residual = worst;
  detail::require_numeric(
      worst <= abs_tol,
      "compute_kernel_table: quadrature residual " + std::to_string(worst) +
          " exceeds tolerance " + std::to_string(abs_tol));

  const double omega_reorg = reorganization_frequency(sd);
  for (int s = 0; s < sd.dim; ++s) {
    if (sd.pair_active(s, s)) {
      table.polaron_shift_meV(s) = -hbar_meV_ps * omega_reorg;
    }
  }
  return table;
}

/// Smallest lag l such that every entry magnitude at lags >= l stays below
/// threshold times the table's overall maximum; returns depth if the tail
/// never drops below the threshold.  Useful as an n_c suggestion.
inline int memory_time_estimate(const MemoryKernelTable& table,
                                double threshold) {
  detail::require_config(threshold > 0.0 && threshold <= 1.0,
                         "memory_time_estimate: threshold must be in (0, 1]");
  const int depth = table.depth;
  std::vector<double> m(depth, 0.0);
  double overall = 0.0;
  for (int l = 0; l < depth; ++l) {
    m[l] = table.entries[l].cwiseAbs().maxCoeff();
    overall = std::max(overall, m[l]);
  }
  if (overall == 0.0) return 0;
  double suffix = 0.0;
  int answer = depth;
  for (int l = depth - 1; l >= 0; --l) {
    suffix = std::max(suffix, m[l]);
    if (suffix <= threshold * overall) answer = l;
  }
  return answer;
}

}  // namespace qdpath
