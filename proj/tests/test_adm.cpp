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

#include "qdpath/adm.hpp"
#include "qdpath/models.hpp"
#include "qdpath/oracles.hpp"
#include "support/test_helpers.hpp"

using namespace qdpath;
using qdpath::testing::max_abs_diff;
using qdpath::testing::random_density_matrix;
using qdpath::testing::random_hermitian;
using qdpath::testing::random_operator;

namespace {

/// Dense symmetric kernel table with entries on every pair, to exercise the
/// whole contraction rather than the single-pair structure of GaAs.
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

struct RandomSystem {
  HamiltonianSpec h;
  std::vector<LindbladChannel> channels;
  DensityMatrix rho0;
};

RandomSystem random_system(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  RandomSystem s;
  s.h = HamiltonianSpec::constant(random_hermitian(dim, rng));
  s.channels = {LindbladChannel::constant(random_operator(dim, rng), 0.15)};
  s.rho0 = random_density_matrix(dim, rng);
  return s;
}

std::vector<Superoperator> constant_propagators(const RandomSystem& s,
                                                int n_steps, double dt) {
  std::vector<Superoperator> props;
  for (int n = 0; n < n_steps; ++n) {
    props.push_back(build_step_propagator(s.h, s.channels, n * dt, dt));
  }
  return props;
}

TimeSeries run(const RandomSystem& s, int n_steps, int depth,
               const InfluenceTable& influence, int threads = 1) {
  SimulationConfig cfg;
  cfg.dt = 0.5;
  cfg.n_steps = n_steps;
  cfg.memory_depth = depth;
  cfg.initial_state = s.rho0;
  cfg.threads = threads;
  return run_path_integral(cfg, s.h, s.channels, influence);
}

}  // namespace

TEST_CASE("iterative scheme equals the literal path sum at full memory") {
  // With n = memory depth no truncation has happened yet, so the iterated
  // tensor must reproduce the direct sum over all path pairs exactly.
  for (int dim : {2, 3}) {
    for (int n = 1; n <= (dim == 2 ? 5 : 3); ++n) {
      const RandomSystem s = random_system(dim, 1000 + dim * 10 + n);
      const MemoryKernelTable kt =
          random_symmetric_kernels(dim, n, 500 + n);
      const InfluenceTable influence = build_influence_table(kt);
      const TimeSeries ts = run(s, n, n, influence);
      const DensityMatrix ref =
          full_path_sum(n, constant_propagators(s, n, 0.5), influence, s.rho0);
      const double scale = ref.cwiseAbs().maxCoeff();
      REQUIRE(max_abs_diff(ts.states.back(), ref) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("growth phase is exact below the memory depth") {
  const RandomSystem s = random_system(2, 321);
  const MemoryKernelTable kt = random_symmetric_kernels(2, 5, 321);
  const InfluenceTable influence = build_influence_table(kt);
  for (int n = 1; n <= 4; ++n) {
    const TimeSeries ts = run(s, n, 5, influence);
    const DensityMatrix ref =
        full_path_sum(n, constant_propagators(s, n, 0.5), influence, s.rho0);
    REQUIRE(max_abs_diff(ts.states.back(), ref) < 1e-13);
  }
}

TEST_CASE("truncated iteration equals the equally-truncated path sum") {
  // Past the memory depth both the iterative tensor and the direct sum drop
  // pairs older than the depth, so they still agree exactly.
  for (int depth : {1, 2, 3}) {
    const RandomSystem s = random_system(2, 42 + depth);
    const MemoryKernelTable kt = random_symmetric_kernels(2, depth, 600 + depth);
    const InfluenceTable influence = build_influence_table(kt);
    const int n = 6;
    const TimeSeries ts = run(s, n, depth, influence);
    const DensityMatrix ref =
        full_path_sum(n, constant_propagators(s, n, 0.5), influence, s.rho0);
    REQUIRE(max_abs_diff(ts.states.back(), ref) < 1e-13);
  }
}

TEST_CASE("trivial influence collapses to the bare propagator chain") {
  const RandomSystem s = random_system(3, 9);
  const InfluenceTable influence = trivial_influence_table(3, 3);
  const TimeSeries ts = run(s, 7, 3, influence);

  const Superoperator m = build_step_propagator(s.h, s.channels, 0.0, 0.5);
  DensityMatrix rho = s.rho0;
  for (int k = 0; k < 7; ++k) rho = qdpath::apply(m, rho);
  REQUIRE(max_abs_diff(ts.states.back(), rho) < 1e-13);
}

TEST_CASE("pure decay through the tensor matches the closed form") {
  RandomSystem s;
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  s.h = HamiltonianSpec::constant(Matrix::Zero(2, 2));
  s.channels = {LindbladChannel::constant(a, 0.05)};
  s.rho0 = DensityMatrix::Zero(2, 2);
  s.rho0(1, 1) = 1.0;

  SimulationConfig cfg;
  cfg.dt = 0.1;
  cfg.n_steps = 10;
  cfg.memory_depth = 2;
  cfg.initial_state = s.rho0;
  const TimeSeries ts =
      run_path_integral(cfg, s.h, s.channels, trivial_influence_table(2, 2));
  REQUIRE_THAT(ts.states.back()(1, 1).real(),
               Catch::Matchers::WithinAbs(0.95122942450071401, 1e-13));
}

TEST_CASE("pure dephasing reproduces the analytic coherence decay") {
  // Uncoupled-to-driving limit: level splitting compensated to +hbar*Omega_p,
  // phonons only.  The exact solution for the coherence is
  //   rho_X0(t) = rho_X0(0) * exp(-K_t(0)) * exp(-i Omega_p t),
  // where K_t(0) is the equal-time kernel evaluated for a single interval of
  // length t.  Matching it end to end checks kernels, influence factors,
  // tensor iteration and the polaron compensation at once.
  DrivenDotModel m;
  m.field = PulseEnvelope::constant(0.0);
  m.detuning_meV = 0.0;
  m.radiative_rate_ps_inv = 0.0;
  m.temperature_K = 100.0;
  m.phonons = true;
  const AssembledModel am = build_driven_dot(m);

  const double dt = 0.5;
  const int n = 6;
  const MemoryKernelTable kt = compute_kernel_table(am.sd, dt, n, 100.0);
  SimulationConfig cfg;
  cfg.dt = dt;
  cfg.n_steps = n;
  cfg.memory_depth = n;
  cfg.initial_state = DensityMatrix(2, 2);
  cfg.initial_state << 0.5, 0.5, 0.5, 0.5;
  const TimeSeries ts =
      run_path_integral(cfg, am.h, am.channels, build_influence_table(kt));

  const double t = n * dt;
  const Complex k_full = compute_kernel_table(am.sd, t, 1, 100.0).at(0, 1, 1);
  const double omega_p = reorganization_frequency(am.sd);
  const Complex expected =
      0.5 * std::exp(-k_full) * std::exp(Complex(0.0, -omega_p * t));
  REQUIRE(std::abs(ts.states.back()(1, 0) - expected) < 1e-12);
  // Populations are untouched by pure dephasing.
  REQUIRE_THAT(ts.states.back()(1, 1).real(),
               Catch::Matchers::WithinAbs(0.5, 1e-13));
}

TEST_CASE("trace is preserved to rounding and drift is recorded") {
  const RandomSystem s = random_system(2, 77);
  const MemoryKernelTable kt = random_symmetric_kernels(2, 3, 77);
  const InfluenceTable influence = build_influence_table(kt);
  const TimeSeries ts = run(s, 40, 3, influence);
  REQUIRE(ts.trace_drift.size() == 41);
  // Random +-0.3 kernels scale individual path weights by up to e^3.6 at
  // depth 3, so the roundoff left after conjugate-path cancellation is much
  // larger here than in physical runs (~1e-15); these bounds only assert
  // that no systematic trace or hermiticity error exists.
  for (double d : ts.trace_drift) REQUIRE(d < 1e-11);
  for (double f : ts.renorm_factors) REQUIRE(f == 1.0);
  REQUIRE(ts.max_hermiticity_defect < 1e-9);
}

TEST_CASE("renormalization policy pins the trace at one") {
  const RandomSystem s = random_system(2, 78);
  const MemoryKernelTable kt = random_symmetric_kernels(2, 3, 78);
  SimulationConfig cfg;
  cfg.dt = 0.5;
  cfg.n_steps = 20;
  cfg.memory_depth = 3;
  cfg.initial_state = s.rho0;
  cfg.trace_policy = TracePolicy::renormalize_each_step;
  const TimeSeries ts =
      run_path_integral(cfg, s.h, s.channels, build_influence_table(kt));
  for (const auto& rho : ts.states) {
    REQUIRE(std::abs(trace_deviation(rho)) < 1e-13);
  }
  for (double f : ts.renorm_factors) {
    REQUIRE_THAT(f, Catch::Matchers::WithinAbs(1.0, 1e-10));
  }
}

TEST_CASE("deeper memory changes nothing once the kernel has died out") {
  // For the 100 K GaAs bath at dt = 0.5 the kernel tail beyond lag 7 is
  // negligible, so depth 7 and depth 9 trajectories must agree closely.
  DrivenDotModel m;
  m.field = PulseEnvelope::constant(1.0);
  m.detuning_meV = 1.0;
  m.radiative_rate_ps_inv = 0.05;
  m.temperature_K = 100.0;
  m.phonons = true;
  const AssembledModel am = build_driven_dot(m);

  double occupation[2];
  int i = 0;
  for (int depth : {7, 9}) {
    const MemoryKernelTable kt =
        compute_kernel_table(am.sd, 0.5, depth, 100.0);
    SimulationConfig cfg;
    cfg.dt = 0.5;
    cfg.n_steps = 200;
    cfg.memory_depth = depth;
    cfg.initial_state = DensityMatrix::Zero(2, 2);
    cfg.initial_state(0, 0) = 1.0;
    cfg.trace_policy = TracePolicy::renormalize_each_step;
    const TimeSeries ts =
        run_path_integral(cfg, am.h, am.channels, build_influence_table(kt));
    double sum = 0.0;
    const std::size_t start = ts.states.size() - ts.states.size() / 10;
    for (std::size_t k = start; k < ts.states.size(); ++k) {
      sum += ts.states[k](1, 1).real();
    }
    occupation[i++] = sum / static_cast<double>(ts.states.size() - start);
  }
  REQUIRE(std::abs(occupation[0] - occupation[1]) < 1e-3);
}

TEST_CASE("worker count does not change a single bit of the result") {
  const RandomSystem s = random_system(3, 15);
  const MemoryKernelTable kt = random_symmetric_kernels(3, 3, 15);
  const InfluenceTable influence = build_influence_table(kt);
  const TimeSeries a = run(s, 12, 3, influence, 1);
  const TimeSeries b = run(s, 12, 3, influence, 4);
  for (std::size_t n = 0; n < a.states.size(); ++n) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        REQUIRE(a.states[n](i, j) == b.states[n](i, j));
      }
    }
  }
}

TEST_CASE("memory budget and depth limits are enforced up front") {
  SimulationConfig cfg;
  cfg.dt = 0.5;
  cfg.n_steps = 1;
  cfg.memory_depth = 10;
  cfg.initial_state = DensityMatrix::Identity(3, 3) / 3.0;
  cfg.memory_budget_bytes = 1024;  // far below the 9^10-entry requirement
  REQUIRE_THROWS_AS(AugmentedDensityMatrix(cfg), ConfigError);

  cfg.memory_budget_bytes = std::size_t{2} << 30;
  cfg.memory_depth = kMaxMemoryDepth + 1;
  REQUIRE_THROWS_AS(AugmentedDensityMatrix(cfg), ConfigError);

  cfg.memory_depth = 0;
  REQUIRE_THROWS_AS(AugmentedDensityMatrix(cfg), ConfigError);
}

TEST_CASE("storage estimate reports the tensor ping-pong plus scratch") {
  // dim 2, depth 3: two 4^3 buffers plus one 4^2 scratch, 16 bytes each.
  REQUIRE(adm_bytes_estimate(2, 3) == (2 * 64 + 16) * sizeof(Complex));
  // depth 1 keeps no scratch.
  REQUIRE(adm_bytes_estimate(2, 1) == 2 * 4 * sizeof(Complex));
  // Absurd depth saturates instead of overflowing.
  REQUIRE(adm_bytes_estimate(10, 14) ==
          std::numeric_limits<std::size_t>::max());
}
