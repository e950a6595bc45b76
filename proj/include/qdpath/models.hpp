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
#include <string>
#include <vector>

#include "qdpath/bath.hpp"
#include "qdpath/errors.hpp"
#include "qdpath/liouville.hpp"

/// @file models.hpp
/// Ready-to-run physical systems: a laser-driven two-level quantum dot with
/// radiative decay, and a dot-cavity system with photon loss.  Both couple
/// the exciton state to the GaAs LA-phonon continuum (pure dephasing).
///
/// Detuning convention: the user-facing detuning is measured from the
/// polaron-SHIFTED exciton resonance.  The lag-0 memory kernel carries the
/// polaron shift inside the influence functional, so the builders add the
/// equal magnitude with opposite sign onto the bare exciton energy; the two
/// cancel and the configured detuning is the physical one, independent of
/// dot size and temperature.  With phonons disabled no compensation is
/// applied.

namespace qdpath {

/// Driving-field envelope f(t) in ps^-1.
struct PulseEnvelope {
  enum class Shape { constant, gaussian };
  Shape shape = Shape::constant;
  double amplitude_ps_inv = 0.0;
  double center_ps = 0.0;  // gaussian only
  double fwhm_ps = 1.0;    // gaussian only

  double operator()(double t) const {
    if (shape == Shape::constant) return amplitude_ps_inv;
    const double sigma = fwhm_ps / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    const double x = (t - center_ps) / sigma;
    return amplitude_ps_inv * std::exp(-0.5 * x * x);
  }

  static PulseEnvelope constant(double f) {
    PulseEnvelope p;
    p.shape = Shape::constant;
    p.amplitude_ps_inv = f;
    return p;
  }

  static PulseEnvelope gaussian(double amplitude, double center, double fwhm) {
    PulseEnvelope p;
    p.shape = Shape::gaussian;
    p.amplitude_ps_inv = amplitude;
    p.center_ps = center;
    p.fwhm_ps = fwhm;
    return p;
  }
};

/// Rotating-frame two-level dot {|0>, |X>} under a (cw or pulsed) laser
/// field, with one radiative-decay channel |0><X| and phonon coupling on
/// |X> only.
struct DrivenDotModel {
  PulseEnvelope field = PulseEnvelope::constant(1.0);
  double detuning_meV = 0.0;          // from the polaron-shifted resonance
  double radiative_rate_ps_inv = 0.0;
  double temperature_K = 4.0;
  bool phonons = true;
  GaAsDeformationParams gaas{};
};

/// Single-photon dot-cavity system {|G>, |P>, |X>}: |X> = exciton & empty
/// cavity, |P> = ground dot & one photon, |G> = ground dot & empty cavity.
/// Exciton-photon exchange at coupling g, cavity loss channel |G><P| at
/// rate kappa, phonons on |X> only.
struct DotCavityModel {
  double hbar_g_meV = 0.05;        // exciton-photon coupling (hbar*g)
  double detuning_meV = 0.0;       // from the polaron-shifted resonance
  double cavity_loss_ps_inv = 0.1;
  double temperature_K = 1.0;
  bool phonons = true;
  GaAsDeformationParams gaas{};
};

/// Everything the propagation engine needs, bundled.
struct AssembledModel {
  int dim = 0;
  HamiltonianSpec h;
  std::vector<LindbladChannel> channels;
  SpectralDensity sd;
  double polaron_shift_meV = 0.0;  // compensation applied to the bare level
  std::vector<std::string> state_labels;
};

/// Index of the exciton state in each basis.
inline constexpr int kDotExcitonIndex = 1;     // {|0>, |X>}
inline constexpr int kCavityExcitonIndex = 2;  // {|G>, |P>, |X>}
inline constexpr int kCavityPhotonIndex = 1;

/// Assembles the driven dot:
///   H(t) = (hbar f(t) / 2)(|0><X| + |X><0|) + E_X |X><X|,
/// E_X = -detuning - polaron_shift (compensation; 0 without phonons).
inline AssembledModel build_driven_dot(const DrivenDotModel& m) {
  detail::require_config(m.radiative_rate_ps_inv >= 0.0,
                         "build_driven_dot: radiative rate must be >= 0");
  detail::require_config(m.temperature_K >= 0.0,
                         "build_driven_dot: temperature must be >= 0");
  AssembledModel out;
  out.dim = 2;
  out.state_labels = {"0", "X"};
  out.sd = m.phonons ? SpectralDensity::gaas(2, kDotExcitonIndex, m.gaas)
                     : SpectralDensity::none(2);
  out.polaron_shift_meV =
      m.phonons ? -hbar_meV_ps * reorganization_frequency(out.sd) : 0.0;

  const double e_x = -m.detuning_meV - out.polaron_shift_meV;
  const PulseEnvelope field = m.field;
  out.h.dim = 2;
  out.h.matrix_fn = [field, e_x](double t) {
    Matrix h = Matrix::Zero(2, 2);
    const double drive = 0.5 * hbar_meV_ps * field(t);
    h(0, 1) = drive;
    h(1, 0) = drive;
    h(1, 1) = e_x;
    return h;
  };

  if (m.radiative_rate_ps_inv > 0.0) {
    Matrix a = Matrix::Zero(2, 2);
    a(0, kDotExcitonIndex) = 1.0;  // |0><X|
    out.channels.push_back(
        LindbladChannel::constant(a, m.radiative_rate_ps_inv));
  }
  return out;
}

/// Assembles the dot-cavity system:
///   H = hbar g (|P><X| + |X><P|) + E_X |X><X|,
/// E_X = -detuning - polaron_shift; loss channel (|G><P|, kappa).
inline AssembledModel build_dot_cavity(const DotCavityModel& m) {
  detail::require_config(m.cavity_loss_ps_inv >= 0.0,
                         "build_dot_cavity: cavity loss must be >= 0");
  detail::require_config(m.temperature_K >= 0.0,
                         "build_dot_cavity: temperature must be >= 0");
  AssembledModel out;
  out.dim = 3;
  out.state_labels = {"G", "P", "X"};
  out.sd = m.phonons ? SpectralDensity::gaas(3, kCavityExcitonIndex, m.gaas)
                     : SpectralDensity::none(3);
  out.polaron_shift_meV =
      m.phonons ? -hbar_meV_ps * reorganization_frequency(out.sd) : 0.0;

  Matrix h = Matrix::Zero(3, 3);
  h(kCavityPhotonIndex, kCavityExcitonIndex) = m.hbar_g_meV;
  h(kCavityExcitonIndex, kCavityPhotonIndex) = m.hbar_g_meV;
  h(kCavityExcitonIndex, kCavityExcitonIndex) =
      -m.detuning_meV - out.polaron_shift_meV;
  out.h = HamiltonianSpec::constant(h);

  if (m.cavity_loss_ps_inv > 0.0) {
    Matrix a = Matrix::Zero(3, 3);
    a(0, kCavityPhotonIndex) = 1.0;  // |G><P|
    out.channels.push_back(
        LindbladChannel::constant(a, m.cavity_loss_ps_inv));
  }
  return out;
}

/// Closed-form stationary exciton occupation of the cw-driven dot without
/// phonons: f^2 / (2 f^2 + gamma^2 + (2 delta / hbar)^2), delta in meV
/// converted through hbar.  Undefined (throws) when all inputs vanish.
inline double stationary_occupation_no_phonons(double f_ps_inv,
                                               double gamma_ps_inv,
                                               double delta_meV) {
  detail::require_config(
      f_ps_inv != 0.0 || gamma_ps_inv != 0.0 || delta_meV != 0.0,
      "stationary_occupation_no_phonons: undefined for all-zero inputs");
  const double d = 2.0 * delta_meV / hbar_meV_ps;
  return f_ps_inv * f_ps_inv /
         (2.0 * f_ps_inv * f_ps_inv + gamma_ps_inv * gamma_ps_inv + d * d);
}

}  // namespace qdpath
