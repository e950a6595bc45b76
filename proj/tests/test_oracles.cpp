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

#include <random>

#include "qdpath/oracles.hpp"
#include "support/test_helpers.hpp"

using namespace qdpath;
using qdpath::testing::max_abs_diff;
using qdpath::testing::random_density_matrix;
using qdpath::testing::random_hermitian;
using qdpath::testing::random_operator;

namespace {

MemoryKernelTable random_symmetric_kernels(int dim, int depth,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  MemoryKernelTable kt;
  kt.dim = dim;
  kt.depth = depth;
  kt.dt = 0.5;
  kt.temperature = 10.0;
  kt.polaron_shift_meV = Eigen::VectorXd::Zero(dim);
  kt.entries.assign(depth, Matrix::Zero(dim, dim));
  for (int l = 0; l < depth; ++l) {
    for (int a = 0; a < dim; ++a) {
      for (int b = a; b < dim; ++b) {
        const Complex z(u(rng), u(rng));
        kt.entries[l](a, b) = z;
        kt.entries[l](b, a) = z;
      }
    }
  }
  return kt;
}

}  // namespace

TEST_CASE("path sum is invariant under enumeration order") {
  std::mt19937_64 rng(31);
  const HamiltonianSpec h = HamiltonianSpec::constant(random_hermitian(2, rng));
  const std::vector<LindbladChannel> ch = {
      LindbladChannel::constant(random_operator(2, rng), 0.2)};
  const DensityMatrix rho0 = random_density_matrix(2, rng);
  const InfluenceTable influence =
      build_influence_table(random_symmetric_kernels(2, 4, 31));

  std::vector<Superoperator> props;
  for (int n = 0; n < 4; ++n) {
    props.push_back(build_step_propagator(h, ch, n * 0.5, 0.5));
  }
  const DensityMatrix fwd = full_path_sum(4, props, influence, rho0, false);
  const DensityMatrix rev = full_path_sum(4, props, influence, rho0, true);
  REQUIRE(max_abs_diff(fwd, rev) < 1e-13);
}

TEST_CASE("path sum refuses astronomically large enumerations") {
  const InfluenceTable influence = trivial_influence_table(3, 2);
  const std::vector<Superoperator> props(10, Superoperator::identity(3));
  const DensityMatrix rho0 = DensityMatrix::Identity(3, 3) / 3.0;
  // 3^(2*10) path-pair configurations exceed the enumeration guard.
  REQUIRE_THROWS_AS(full_path_sum(10, props, influence, rho0), ConfigError);
}

TEST_CASE("ODE oracle reproduces pure exponential decay") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  const HamiltonianSpec h = HamiltonianSpec::constant(Matrix::Zero(2, 2));
  const std::vector<LindbladChannel> ch = {LindbladChannel::constant(a, 0.3)};
  DensityMatrix rho0 = DensityMatrix::Zero(2, 2);
  rho0(1, 1) = 1.0;

  std::vector<double> grid;
  for (int k = 0; k <= 500; ++k) grid.push_back(k * 0.01);
  const TimeSeries ts = lindblad_ode_solve(h, ch, rho0, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    REQUIRE_THAT(ts.states[k](1, 1).real(),
                 Catch::Matchers::WithinAbs(std::exp(-0.3 * grid[k]), 1e-10));
  }
}

TEST_CASE("ODE oracle converges to the exact propagator at fourth order") {
  std::mt19937_64 rng(8);
  const HamiltonianSpec h = HamiltonianSpec::constant(random_hermitian(2, rng));
  const std::vector<LindbladChannel> ch = {
      LindbladChannel::constant(random_operator(2, rng), 0.15)};
  const DensityMatrix rho0 = random_density_matrix(2, rng);

  const Superoperator m = build_step_propagator(h, ch, 0.0, 2.0);
  const DensityMatrix exact = qdpath::apply(m, rho0);

  double err_prev = 0.0;
  int i = 0;
  for (double dt : {0.005, 0.0025}) {
    std::vector<double> grid;
    const int steps = static_cast<int>(std::lround(2.0 / dt));
    for (int k = 0; k <= steps; ++k) grid.push_back(k * dt);
    const TimeSeries ts = lindblad_ode_solve(h, ch, rho0, grid);
    const double err = max_abs_diff(ts.states.back(), exact);
    if (i++ == 1) {
      // Halving the step cuts the error by about 2^4.
      REQUIRE(err_prev / err > 10.0);
      REQUIRE(err < 1e-9);
    }
    err_prev = err;
  }
}

TEST_CASE("ODE oracle validates its grid") {
  const HamiltonianSpec h = HamiltonianSpec::constant(Matrix::Zero(2, 2));
  DensityMatrix rho0 = DensityMatrix::Identity(2, 2) / 2.0;
  REQUIRE_THROWS_AS(lindblad_ode_solve(h, {}, rho0, {}), ConfigError);
  REQUIRE_THROWS_AS(lindblad_ode_solve(h, {}, rho0, {0.0, 0.5, 0.4}),
                    ConfigError);
}

TEST_CASE("power-law slope fit recovers a synthetic exponent") {
  std::vector<double> x, y;
  for (double v : {0.05, 0.1, 0.2, 0.4}) {
    x.push_back(v);
    y.push_back(3.7 * std::pow(v, 2.5));
  }
  REQUIRE_THAT(fit_power_law_slope(x, y),
               Catch::Matchers::WithinAbs(2.5, 1e-12));
  REQUIRE_THROWS_AS(fit_power_law_slope({1.0}, {1.0}), ConfigError);
}

TEST_CASE("exponential decay-time fit recovers a synthetic lifetime") {
  std::vector<double> t, y;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(k * 0.5);
    y.push_back(2.4 * std::exp(-t.back() / 7.0));
  }
  REQUIRE_THAT(fit_exponential_decay_time(t, y, 0.0),
               Catch::Matchers::WithinRel(7.0, 1e-12));

  // Samples before t_min are ignored: corrupt the early part only.
  std::vector<double> y2 = y;
  for (int k = 0; k < 10; ++k) y2[k] = 5.0;
  REQUIRE_THAT(fit_exponential_decay_time(t, y2, 5.1),
               Catch::Matchers::WithinRel(7.0, 1e-12));

  // Growing data has no decay time.
  std::vector<double> up;
  for (double tv : t) up.push_back(std::exp(tv / 9.0));
  REQUIRE_THROWS_AS(fit_exponential_decay_time(t, up, 0.0), NumericalError);
}
