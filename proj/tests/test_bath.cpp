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

#include <catch2/catch_amalgamated.hpp>

#include "qdpath/bath.hpp"
#include "support/reference_kernels.hpp"

using namespace qdpath;

namespace {

SpectralDensity default_gaas() {
  return SpectralDensity::gaas(2, 1, GaAsDeformationParams{});
}

/// Frozen high-precision values for the default GaAs density, computed with
/// an independent arbitrary-precision quadrature implementation.
constexpr double kJ_at_half = 0.0042329501865989218;
constexpr double kJ_at_one = 0.027427106714971894;
constexpr double kJ_at_two = 0.094755425090114804;
constexpr double kPeakOmega = 2.3227879510378548;
constexpr double kPeakJ = 0.1006445509066784;
constexpr double kReorgFreq = 0.10951637360351014;
constexpr double kPolaronShift = -0.072084986582157916;

/// Frozen kernel entries K(l * 0.5 ps) for the default GaAs density
/// (same independent oracle), T = 100 K and T = 1 K.
constexpr double kKRe100[8] = {
    +3.215004040499935e-01, +3.021244912584201e-01, -1.871716440600840e-01,
    -2.684285442793747e-01, -1.286968838755289e-01, -3.346671231815262e-02,
    -5.289458626915632e-03, -5.345323772408249e-04};
constexpr double kKIm100[8] = {
    -1.110544453834903e-02, -4.294843004544004e-02, -2.334206774841225e-02,
    +7.065413137667566e-03, +1.050064938910320e-02, +4.117037593387726e-03,
    +8.429219064195054e-04, +1.032931181467765e-04};
constexpr double kKRe1[4] = {+2.533183428421644e-02, +1.607924551264114e-02,
                             -2.485361832535141e-02, -1.975746897307325e-02};
constexpr double kKIm1[4] = {-1.110544453834903e-02, -4.294843004544004e-02,
                             -2.334206774841225e-02, +7.065413137667566e-03};

}  // namespace

TEST_CASE("GaAs spectral density matches frozen reference values") {
  const SpectralDensity sd = default_gaas();
  REQUIRE(evaluate_spectral_density(sd, 0.0) == 0.0);
  REQUIRE_THAT(evaluate_spectral_density(sd, 0.5),
               Catch::Matchers::WithinRel(kJ_at_half, 1e-12));
  REQUIRE_THAT(evaluate_spectral_density(sd, 1.0),
               Catch::Matchers::WithinRel(kJ_at_one, 1e-12));
  REQUIRE_THAT(evaluate_spectral_density(sd, 2.0),
               Catch::Matchers::WithinRel(kJ_at_two, 1e-12));
  REQUIRE_THAT(evaluate_spectral_density(sd, kPeakOmega),
               Catch::Matchers::WithinRel(kPeakJ, 1e-12));
  // The peak is a genuine maximum.
  REQUIRE(evaluate_spectral_density(sd, kPeakOmega - 0.05) < kPeakJ);
  REQUIRE(evaluate_spectral_density(sd, kPeakOmega + 0.05) < kPeakJ);
  REQUIRE_THROWS_AS(evaluate_spectral_density(sd, -0.1), ConfigError);
}

TEST_CASE("spectral density scales quadratically with deformation constants") {
  GaAsDeformationParams scaled;
  scaled.deformation_e_eV *= 3.0;
  scaled.deformation_h_eV *= 3.0;
  const SpectralDensity sd = default_gaas();
  const SpectralDensity sd9 = SpectralDensity::gaas(2, 1, scaled);
  for (double w : {0.5, 1.0, 2.0, 5.0}) {
    REQUIRE_THAT(evaluate_spectral_density(sd9, w),
                 Catch::Matchers::WithinRel(
                     9.0 * evaluate_spectral_density(sd, w), 1e-12));
  }
}

TEST_CASE("super-Ohmic low-frequency behavior is cubic") {
  const SpectralDensity sd = default_gaas();
  // J(w) ~ w^3 for w far below the cutoff: J(2e-3)/J(1e-3) ~ 8.
  const double r = evaluate_spectral_density(sd, 2e-3) /
                   evaluate_spectral_density(sd, 1e-3);
  REQUIRE_THAT(r, Catch::Matchers::WithinRel(8.0, 1e-4));
}

TEST_CASE("power-law densities follow their closed form") {
  PowerLawParams p;
  p.prefactor = 0.2;
  p.exponent = 3.0;
  p.cutoff_ps_inv = 1.5;
  p.shape = CutoffShape::gaussian;
  SpectralDensity sd;
  sd.form = p;
  sd.dim = 2;
  sd.active_pairs = {{1, 1}};
  for (double w : {0.3, 1.0, 2.5}) {
    const double expected =
        0.2 * std::pow(w, 3.0) * std::exp(-(w / 1.5) * (w / 1.5));
    REQUIRE_THAT(evaluate_spectral_density(sd, w),
                 Catch::Matchers::WithinRel(expected, 1e-14));
  }
  p.shape = CutoffShape::exponential;
  sd.form = p;
  REQUIRE_THAT(evaluate_spectral_density(sd, 2.0),
               Catch::Matchers::WithinRel(
                   0.2 * 8.0 * std::exp(-2.0 / 1.5), 1e-14));
}

TEST_CASE("tabulated densities interpolate linearly and never extrapolate") {
  TabulatedParams t;
  t.omega_ps_inv = {0.0, 1.0, 2.0};
  t.j_ps_inv = {0.0, 0.4, 0.1};
  SpectralDensity sd;
  sd.form = t;
  sd.dim = 2;
  sd.active_pairs = {{1, 1}};
  REQUIRE(evaluate_spectral_density(sd, 1.0) == 0.4);
  REQUIRE_THAT(evaluate_spectral_density(sd, 0.5),
               Catch::Matchers::WithinAbs(0.2, 1e-15));
  REQUIRE_THAT(evaluate_spectral_density(sd, 1.5),
               Catch::Matchers::WithinAbs(0.25, 1e-15));
  REQUIRE_THROWS_AS(evaluate_spectral_density(sd, 2.5), ConfigError);
}

TEST_CASE("reorganization frequency and polaron shift match frozen values") {
  const SpectralDensity sd = default_gaas();
  REQUIRE_THAT(reorganization_frequency(sd),
               Catch::Matchers::WithinRel(kReorgFreq, 1e-12));
  const MemoryKernelTable kt = compute_kernel_table(sd, 0.5, 1, 100.0);
  REQUIRE_THAT(kt.polaron_shift_meV(1),
               Catch::Matchers::WithinRel(kPolaronShift, 1e-12));
  REQUIRE(kt.polaron_shift_meV(0) == 0.0);
}

TEST_CASE("kernel table matches frozen reference entries") {
  const SpectralDensity sd = default_gaas();
  const MemoryKernelTable k100 = compute_kernel_table(sd, 0.5, 8, 100.0);
  for (int l = 0; l < 8; ++l) {
    REQUIRE_THAT(k100.at(l, 1, 1).real(),
                 Catch::Matchers::WithinRel(kKRe100[l], 1e-10));
    REQUIRE_THAT(k100.at(l, 1, 1).imag(),
                 Catch::Matchers::WithinRel(kKIm100[l], 1e-10));
    // The uncoupled pairs stay exactly zero.
    REQUIRE(k100.at(l, 0, 0) == Complex{});
    REQUIRE(k100.at(l, 0, 1) == Complex{});
  }
  const MemoryKernelTable k1 = compute_kernel_table(sd, 0.5, 4, 1.0);
  for (int l = 0; l < 4; ++l) {
    REQUIRE_THAT(k1.at(l, 1, 1).real(),
                 Catch::Matchers::WithinRel(kKRe1[l], 1e-10));
    REQUIRE_THAT(k1.at(l, 1, 1).imag(),
                 Catch::Matchers::WithinRel(kKIm1[l], 1e-10));
  }
}

TEST_CASE("kernel table matches the brute-force fine-grid oracle") {
  const SpectralDensity sd = default_gaas();
  for (double temperature : {1.0, 100.0}) {
    const MemoryKernelTable kt = compute_kernel_table(sd, 0.5, 8, temperature);
    const std::vector<Complex> ref =
        qdpath::testing::simpson_kernel_table(sd, 0.5, 8, temperature);
    for (int l = 0; l < 8; ++l) {
      REQUIRE(std::abs(kt.at(l, 1, 1) - ref[l]) <=
              1e-9 * std::abs(ref[l]));
    }
  }
}

TEST_CASE("equal-time kernel shrinks quadratically with the step") {
  const SpectralDensity sd = default_gaas();
  const Complex k1 = compute_kernel_table(sd, 0.02, 1, 100.0).at(0, 1, 1);
  const Complex k2 = compute_kernel_table(sd, 0.01, 1, 100.0).at(0, 1, 1);
  REQUIRE_THAT(k2.real() / k1.real(), Catch::Matchers::WithinAbs(0.25, 0.01));
}

TEST_CASE("kernel real part grows with temperature, imaginary part does not") {
  const SpectralDensity sd = default_gaas();
  const int depth = 4;
  double prev = 0.0;
  std::vector<MemoryKernelTable> tables;
  for (double temperature : {0.0, 1.0, 10.0, 100.0}) {
    tables.push_back(compute_kernel_table(sd, 0.5, depth, temperature));
    const double re0 = tables.back().at(0, 1, 1).real();
    REQUIRE(re0 > prev);
    prev = re0;
  }
  for (int l = 0; l < depth; ++l) {
    const double im_cold = tables.front().at(l, 1, 1).imag();
    for (const auto& t : tables) {
      REQUIRE_THAT(t.at(l, 1, 1).imag(),
                   Catch::Matchers::WithinAbs(im_cold, 1e-12));
    }
  }
}

TEST_CASE("kernel computation enforces its accuracy contract") {
  const SpectralDensity sd = default_gaas();
  const MemoryKernelTable kt = compute_kernel_table(sd, 0.5, 4, 100.0);
  REQUIRE(kt.worst_residual <= 1e-12);
  REQUIRE_THROWS_AS(compute_kernel_table(sd, 0.5, 4, 100.0, 1e-30),
                    NumericalError);
  REQUIRE_THROWS_AS(compute_kernel_table(sd, -0.5, 4, 100.0), ConfigError);
  REQUIRE_THROWS_AS(compute_kernel_table(sd, 0.5, 0, 100.0), ConfigError);
  REQUIRE_THROWS_AS(compute_kernel_table(sd, 0.5, 4, -1.0), ConfigError);

  SpectralDensity asym = sd;
  asym.active_pairs = {{0, 1}};  // not symmetric
  REQUIRE_THROWS_AS(compute_kernel_table(asym, 0.5, 4, 100.0), ConfigError);
}

TEST_CASE("memory-time estimate orders as expected") {
  const SpectralDensity sd = default_gaas();
  const MemoryKernelTable kt = compute_kernel_table(sd, 0.5, 8, 100.0);

  // threshold 1 is satisfied everywhere; an absurdly small threshold never is.
  REQUIRE(memory_time_estimate(kt, 1.0) == 0);
  REQUIRE(memory_time_estimate(kt, 1e-30) == kt.depth);

  // Derived from the frozen entry magnitudes above: the tail first drops
  // below 1% of the overall maximum after lag 7, below 5% after lag 6.
  REQUIRE(memory_time_estimate(kt, 0.01) == 7);
  REQUIRE(memory_time_estimate(kt, 0.05) == 6);

  // Tightening the threshold can only lengthen the estimate.
  int last = 0;
  for (double th : {0.5, 0.1, 0.05, 0.01, 0.001}) {
    const int est = memory_time_estimate(kt, th);
    REQUIRE(est >= last);
    last = est;
  }
  REQUIRE_THROWS_AS(memory_time_estimate(kt, 0.0), ConfigError);
  REQUIRE_THROWS_AS(memory_time_estimate(kt, 1.5), ConfigError);
}

TEST_CASE("empty active set produces an all-zero table") {
  const MemoryKernelTable kt =
      compute_kernel_table(SpectralDensity::none(3), 0.5, 5, 100.0);
  for (int l = 0; l < 5; ++l) {
    REQUIRE(kt.entries[l].cwiseAbs().maxCoeff() == 0.0);
  }
  REQUIRE(kt.polaron_shift_meV.cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(memory_time_estimate(kt, 0.5) == 0);
}
