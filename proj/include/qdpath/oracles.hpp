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

#include <cmath>
#include <cstddef>
#include <vector>

#include "qdpath/adm.hpp"
#include "qdpath/detail/quadrature.hpp"
#include "qdpath/errors.hpp"
#include "qdpath/influence.hpp"
#include "qdpath/liouville.hpp"

/// @file oracles.hpp
/// Independent correctness references.  These deliberately share only the
/// type layer with the propagation engine: the path sum below enumerates
/// every discrete path pair literally (no augmented tensor, no recursion),
/// and the ODE reference integrates the generator directly (no matrix
/// exponential), so their failure modes are disjoint from the engine's.

namespace qdpath {

/// Literal sum over all ket/bra path pairs of n steps:
///
///   rho_out[p_n] = sum_{p_1..p_n} [sum_{p_0} M_1(p_1<-p_0) rho0[p_0]]
///                  * prod_{l=2..n} M_l(p_l<-p_{l-1})
///                  * prod_{1<=l'<=l<=n} F_{l-l'}(p_l, p_{l'}),
///
/// with influence factors looked up from the table (lags beyond the table
/// depth contribute 1, i.e. the same abrupt truncation as the engine; pass a
/// table of depth >= n for the untruncated sum).  Kahan-compensated
/// accumulation per output element; `reverse_enumeration` flips the path
/// iteration order to exercise summation-order independence.
///
/// Guarded to N^(2n) <= 1e8 enumerated paths.
inline DensityMatrix full_path_sum(int n_steps,
                                   const std::vector<Superoperator>& propagators,
                                   const InfluenceTable& influence,
                                   const DensityMatrix& rho0,
                                   bool reverse_enumeration = false) {
  const int dim = influence.dim;
  const int n2 = dim * dim;
  detail::require_config(n_steps >= 1, "full_path_sum: need at least 1 step");
  detail::require_config(
      static_cast<int>(propagators.size()) == n_steps,
      "full_path_sum: need exactly one propagator per step");
  for (const auto& p : propagators) {
    detail::require_config(p.dim == dim,
                           "full_path_sum: propagator dimension mismatch");
  }
  detail::require_config(rho0.rows() == dim && rho0.cols() == dim,
                         "full_path_sum: initial state dimension mismatch");
  long double count = 1.0L;
  for (int l = 0; l < n_steps; ++l) count *= n2;
  detail::require_config(count <= 1e8L,
                         "full_path_sum: N^(2n) exceeds the 1e8 path guard");
  const std::size_t total = static_cast<std::size_t>(count);

  // Propagator elements rearranged to slice-pair digits p = nu*N + mu.
  std::vector<std::vector<Complex>> mp(n_steps);
  for (int l = 0; l < n_steps; ++l) {
    mp[l].resize(static_cast<std::size_t>(n2) * n2);
    for (int po = 0; po < n2; ++po) {
      for (int pi = 0; pi < n2; ++pi) {
        mp[l][static_cast<std::size_t>(po) * n2 + pi] = propagator_element(
            propagators[l], po / dim, po % dim, pi / dim, pi % dim);
      }
    }
  }
  std::vector<Complex> rho0v(n2);
  for (int p = 0; p < n2; ++p) rho0v[p] = rho0(p / dim, p % dim);

  std::vector<detail::KahanAccumulatorC> acc(n2);
  std::vector<int> digit(n_steps + 1, 0);  // digit[l] = slice l, l = 1..n
  for (std::size_t rank = 0; rank < total; ++rank) {
    const std::size_t idx = reverse_enumeration ? total - 1 - rank : rank;
    std::size_t rest = idx;
    for (int l = 1; l <= n_steps; ++l) {
      digit[l] = static_cast<int>(rest % n2);
      rest /= n2;
    }
    Complex w{};
    for (int p0 = 0; p0 < n2; ++p0) {
      w += mp[0][static_cast<std::size_t>(digit[1]) * n2 + p0] * rho0v[p0];
    }
    for (int l = 2; l <= n_steps; ++l) {
      w *= mp[l - 1][static_cast<std::size_t>(digit[l]) * n2 + digit[l - 1]];
    }
    for (int l = 1; l <= n_steps; ++l) {
      for (int lp = 1; lp <= l; ++lp) {
        const int lag = l - lp;
        if (lag >= influence.depth) continue;
        w *= influence.factors[lag](digit[l], digit[lp]);
      }
    }
    acc[digit[n_steps]].add(w);
  }

  DensityMatrix rho(dim, dim);
  for (int p = 0; p < n2; ++p) rho(p / dim, p % dim) = acc[p].sum();
  return rho;
}

/// Classic fixed-step 4th-order integration of d rho/dt = L(t)[rho] on the
/// given time grid (one step per grid interval; callers supply a grid at
/// least ~10x finer than the path-integral step they compare against).
/// Uses the generator directly at the three stage times per interval.
inline TimeSeries lindblad_ode_solve(const HamiltonianSpec& h,
                                     const std::vector<LindbladChannel>& channels,
                                     const DensityMatrix& rho0,
                                     const std::vector<double>& t_grid) {
  detail::require_config(t_grid.size() >= 1,
                         "lindblad_ode_solve: empty time grid");
  detail::require_config(rho0.rows() == h.dim && rho0.cols() == h.dim,
                         "lindblad_ode_solve: state dimension mismatch");

  TimeSeries out;
  out.t_ps = t_grid;
  out.states.reserve(t_grid.size());
  out.trace_drift.reserve(t_grid.size());
  out.renorm_factors.assign(t_grid.size(), 1.0);

  Vector v = vectorize(rho0);
  out.states.push_back(rho0);
  out.trace_drift.push_back(std::abs(trace_deviation(rho0)));

  const auto deriv = [&h, &channels](double t, const Vector& x) -> Vector {
    return build_liouvillian(h, channels, t).m * x;
  };
  for (std::size_t i = 0; i + 1 < t_grid.size(); ++i) {
    const double t = t_grid[i];
    const double dt = t_grid[i + 1] - t;
    detail::require_config(dt > 0.0 && std::isfinite(dt),
                           "lindblad_ode_solve: time grid must be ascending");
    const Vector k1 = deriv(t, v);
    const Vector k2 = deriv(t + dt / 2.0, v + (dt / 2.0) * k1);
    const Vector k3 = deriv(t + dt / 2.0, v + (dt / 2.0) * k2);
    const Vector k4 = deriv(t + dt, v + dt * k3);
    v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const DensityMatrix rho = unvectorize(v, h.dim);
    const double drift = std::abs(trace_deviation(rho));
    detail::require_numeric(std::isfinite(drift),
                            "lindblad_ode_solve: state diverged (grid too coarse?)");
    out.states.push_back(rho);
    out.trace_drift.push_back(drift);
  }
  return out;
}

/// Least-squares slope of log(y) against log(x); used for convergence-order
/// fits.  Requires positive data.
inline double fit_power_law_slope(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  detail::require_config(x.size() == y.size() && x.size() >= 2,
                         "fit_power_law_slope: need >= 2 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    detail::require_config(x[i] > 0.0 && y[i] > 0.0,
                           "fit_power_law_slope: data must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Exponential decay time from a linear fit of log(y) over t >= t_min:
/// y ~ exp(-t / tau)  =>  tau = -1 / slope.  Requires strictly positive
/// samples in the window and a negative fitted slope.
inline double fit_exponential_decay_time(const std::vector<double>& t,
                                         const std::vector<double>& y,
                                         double t_min) {
  detail::require_config(t.size() == y.size() && !t.empty(),
                         "fit_exponential_decay_time: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min) continue;
    detail::require_config(y[i] > 0.0,
                           "fit_exponential_decay_time: non-positive sample");
    const double ly = std::log(y[i]);
    sx += t[i];
    sy += ly;
    sxx += t[i] * t[i];
    sxy += t[i] * ly;
    ++n;
  }
  detail::require_config(n >= 2,
                         "fit_exponential_decay_time: too few samples in window");
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  detail::require_numeric(slope < 0.0,
                          "fit_exponential_decay_time: trajectory not decaying");
  return -1.0 / slope;
}

}  // namespace qdpath
