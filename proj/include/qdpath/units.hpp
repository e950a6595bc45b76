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

/// @file units.hpp
/// Unit system and physical constants.
///
/// The library works internally in (meV, ps, K): energies in meV, times in
/// ps, rates and angular frequencies in ps^-1, temperatures in K.  The only
/// place SI units appear is inside the GaAs spectral-density formula, which
/// quotes material constants in SI; the conversion factors live here so every
/// unit crossing is explicit and documented to >= 10 significant digits.

namespace qdpath {

/// Reduced Planck constant in meV*ps (exact CODATA value re-expressed).
inline constexpr double hbar_meV_ps = 0.6582119569;

/// Boltzmann constant in meV/K (exact CODATA value re-expressed).
inline constexpr double kB_meV_per_K = 0.08617333262;

/// Reduced Planck constant in J*s, used only inside SI-unit formulas.
inline constexpr double hbar_J_s = 1.054571817e-34;

/// One electron-volt in joules (exact).
inline constexpr double eV_J = 1.602176634e-19;

/// Angular-frequency conversion: 1 ps^-1 expressed in s^-1.
inline constexpr double per_ps_in_per_s = 1.0e12;

}  // namespace qdpath
