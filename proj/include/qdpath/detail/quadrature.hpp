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
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

/// @file detail/quadrature.hpp
/// Oscillation-aware quadrature for smooth integrands on [0, upper].
///
/// The bath-correlation integrands are entire functions of omega with a hard
/// Gaussian (or exponential) high-frequency cutoff, modulated by cos/sin
/// factors whose period shrinks with the time lag.  A single adaptive pass
/// over the whole domain wastes effort and can miss oscillations; instead we
/// split [0, upper] into panels no wider than half an oscillation period,
/// run adaptive Gauss-Kronrod on each panel, and combine the panel results
/// with compensated summation.  Everything is deterministic: fixed panel
/// grid, fixed rule, sequential accumulation.

namespace qdpath::detail {

/// Kahan compensated accumulator for long mixed-sign sums.
class KahanAccumulator {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double sum() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

/// Complex-valued Kahan accumulator (independent real/imag compensation).
class KahanAccumulatorC {
 public:
  void add(const std::complex<double>& z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  std::complex<double> sum() const { return {re_.sum(), im_.sum()}; }

 private:
  KahanAccumulator re_, im_;
};

/// Integrates f over [0, upper] in panels of width <= max_panel_width.
/// Each panel uses adaptive 15/31-point Gauss-Kronrod to a tight local
/// tolerance; panel contributions and error estimates are Kahan-summed.
/// The accumulated error estimate is written to *err_estimate (if non-null).
inline double integrate_panels(const std::function<double(double)>& f,
                               double upper, double max_panel_width,
                               double* err_estimate = nullptr) {
  using rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  const int n_panels =
      std::max(1, static_cast<int>(std::ceil(upper / max_panel_width)));
  const double h = upper / n_panels;

  KahanAccumulator total, err_total;
  for (int k = 0; k < n_panels; ++k) {
    const double a = k * h;
    const double b = (k + 1 == n_panels) ? upper : (k + 1) * h;
    double panel_err = 0.0;
    const double panel = rule::integrate(f, a, b, 12, 1e-13, &panel_err);
    total.add(panel);
    err_total.add(panel_err);
  }
  if (err_estimate != nullptr) *err_estimate = err_total.sum();
  return total.sum();
}

}  // namespace qdpath::detail
