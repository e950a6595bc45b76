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
#include <complex>
#include <vector>

#include "qdpath/bath.hpp"
#include "qdpath/units.hpp"

/// @file reference_kernels.hpp
/// Brute-force fine-grid oracle for the discretized memory kernels: composite
/// Simpson on a fixed uniform frequency grid.  Deliberately shares no code
/// with the adaptive panelled Gauss-Kronrod scheme in the library, so the two
/// can cross-check each other.

namespace qdpath::testing {

/// Fine-grid kernel table for one state pair.  Returns K(l * dt) for
/// l = 0..depth-1 via composite Simpson with `intervals` uniform steps on
/// [0, omega_max].  The super-Gaussian cutoff of the shipped densities makes
/// omega_max = 30 ps^-1 lossless; 2e6 intervals put the Simpson error at
/// machine precision for these smooth integrands.
inline std::vector<Complex> simpson_kernel_table(
    const SpectralDensity& sd, double dt, int depth, double temperature_K,
    double omega_max = 30.0, std::size_t intervals = 2'000'000) {
  const std::size_t n = intervals + 1;  // grid points; intervals must be even
  const double h = omega_max / static_cast<double>(intervals);

  // J(w)/w^2 and coth(hbar w / 2 kT), evaluated once and shared by all lags.
  // Both integrand families vanish at w = 0 (J ~ w^3 at low frequency), so
  // the first grid point contributes exactly zero.
  std::vector<double> jw2(n, 0.0), cth(n, 1.0);
  const double beta_scale =
      temperature_K > 0.0
          ? hbar_meV_ps / (2.0 * kB_meV_per_K * temperature_K)
          : 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double w = static_cast<double>(i) * h;
    jw2[i] = evaluate_spectral_density(sd, w) / (w * w);
    if (beta_scale > 0.0) cth[i] = 1.0 / std::tanh(beta_scale * w);
  }

  const auto simpson = [&](auto&& f) {
    double odd = 0.0, even = 0.0;
    for (std::size_t i = 1; i < n - 1; i += 2) odd += f(i);
    for (std::size_t i = 2; i < n - 1; i += 2) even += f(i);
    return h / 3.0 * (f(0) + 4.0 * odd + 2.0 * even + f(n - 1));
  };

  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(depth));
  for (int lag = 0; lag < depth; ++lag) {
    const double tau = lag * dt;
    double re, im;
    if (lag == 0) {
      re = simpson([&](std::size_t i) {
        const double w = static_cast<double>(i) * h;
        return jw2[i] * cth[i] * (1.0 - std::cos(w * dt));
      });
      im = simpson([&](std::size_t i) {
        const double w = static_cast<double>(i) * h;
        return jw2[i] * (std::sin(w * dt) - w * dt);
      });
    } else {
      re = 2.0 * simpson([&](std::size_t i) {
        const double w = static_cast<double>(i) * h;
        return jw2[i] * cth[i] * (1.0 - std::cos(w * dt)) * std::cos(w * tau);
      });
      im = -2.0 * simpson([&](std::size_t i) {
        const double w = static_cast<double>(i) * h;
        return jw2[i] * (1.0 - std::cos(w * dt)) * std::sin(w * tau);
      });
    }
    out.emplace_back(re, im);
  }
  return out;
}

}  // namespace qdpath::testing
