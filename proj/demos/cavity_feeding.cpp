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

/// Phonon-assisted cavity feeding: an initially excited dot detuned from a
/// lossy cavity transfers its excitation much faster when phonon emission
/// can bridge the energy gap (exciton above the cavity) than when phonon
/// absorption would be required (exciton below), provided the lattice is
/// cold.  This demo propagates both detunings at 1 K with the full memory
/// kernel and reports the fitted exciton decay times.

#include <cstdio>
#include <vector>

#include "qdpath/config.hpp"
#include "qdpath/oracles.hpp"

namespace {

/// Exciton energy relative to the cavity mode, in meV.  The model's
/// detuning knob places the exciton at -detuning, so flip the sign here.
double feeding_time(double exciton_above_cavity_meV) {
  qdpath::RunConfig cfg;
  cfg.model_type = "dot_cavity";
  cfg.cavity.hbar_g_meV = 0.05;
  cfg.cavity.detuning_meV = -exciton_above_cavity_meV;
  cfg.cavity.cavity_loss_ps_inv = 0.1;
  cfg.cavity.temperature_K = 1.0;
  cfg.cavity.phonons = true;
  cfg.initial_state = "exciton";
  cfg.numerics.dt_ps = 0.5;
  cfg.numerics.n_steps = 300;  // 150 ps
  cfg.numerics.memory_depth = 5;
  cfg.numerics.trace_policy = "renormalize_each_step";

  const qdpath::TimeSeries ts = qdpath::execute_run(cfg);
  std::vector<double> pop(ts.states.size());
  for (std::size_t i = 0; i < ts.states.size(); ++i) {
    pop[i] = ts.states[i](qdpath::kCavityExcitonIndex,
                          qdpath::kCavityExcitonIndex).real();
  }
  // Skip the initial transient before fitting the exponential tail.
  return qdpath::fit_exponential_decay_time(ts.t_ps, pop, 20.0);
}

}  // namespace

int main() {
  std::printf("dot-cavity feeding at T = 1 K, hbar g = 0.05 meV, "
              "kappa = 0.1/ps\n");
  const double tau_above = feeding_time(+1.0);  // phonon emission assists
  const double tau_below = feeding_time(-1.0);  // absorption suppressed
  std::printf("exciton 1 meV above cavity: tau = %7.1f ps\n", tau_above);
  std::printf("exciton 1 meV below cavity: tau = %7.1f ps\n", tau_below);
  std::printf("asymmetry tau_below / tau_above = %.2f\n",
              tau_below / tau_above);
  return tau_below > tau_above ? 0 : 1;
}
