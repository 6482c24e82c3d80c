// Copyright 2026 The iontoffoli Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "iontoffoli/pulses.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace iontoffoli {

namespace {

void check_pulse_args(Level lower, Level upper, double zeta) {
  if (lower == upper) throw std::invalid_argument("sideband transition needs two distinct levels");
  if (!(zeta > 0.0)) throw std::invalid_argument("sideband coupling must be positive");
}

Operator sideband(const HilbertSpec& spec, int ion, Level lower, Level upper, double zeta, double phase,
                  bool blue) {
  check_pulse_args(lower, upper, zeta);
  const Operator raise = ion_op(spec, ion, upper, lower);
  const Operator a = phonon_annihilator(spec);
  const Operator mode = blue ? a.adjoint() : a;
  const Operator half = std::polar(zeta, phase) * (mode * raise);
  return half + half.adjoint();
}

// Bare product on the smallest space, with no phase on any pulse.
cplx bare_transfer_amplitude() {
  const HilbertSpec spec(1);
  const double zeta = 1.0;
  const double tau = std::numbers::pi / (2.0 * zeta);
  const Operator ra = expm_unitary(blue_sideband_h(spec, 1, Level::g, Level::e, zeta), -tau);
  const Operator rb = expm_unitary(red_sideband_h(spec, 1, Level::e, Level::l, zeta), -tau);
  const Operator rc = expm_unitary(red_sideband_h(spec, 1, Level::g, Level::l, zeta), -tau);
  const Operator r = rc * rb * ra;
  return r.coeff(spec.index(Level::g, Level::g, Level::g, 1), spec.index(Level::g, Level::g, Level::g, 0));
}

}  // namespace

Operator red_sideband_h(const HilbertSpec& spec, int ion, Level lower, Level upper, double zeta, double phase) {
  return sideband(spec, ion, lower, upper, zeta, phase, false);
}

Operator blue_sideband_h(const HilbertSpec& spec, int ion, Level lower, Level upper, double zeta, double phase) {
  return sideband(spec, ion, lower, upper, zeta, phase, true);
}

Operator SidebandPulse::hamiltonian(const HilbertSpec& spec) const {
  return sideband == Sideband::red ? red_sideband_h(spec, ion, lower, upper, coupling, phase)
                                   : blue_sideband_h(spec, ion, lower, upper, coupling, phase);
}

Operator SidebandPulse::unitary(const HilbertSpec& spec) const {
  if (!(duration > 0.0)) throw std::invalid_argument("pulse duration must be positive");
  return expm_unitary(hamiltonian(spec), -static_cast<double>(exponent_sign) * duration);
}

double calibrated_phase_c() {
  // The C pulse maps |l,0> -> i e^{-i phi}|g,1>, so the whole transfer
  // amplitude picks up e^{-i phi}; choosing phi = arg(bare) makes it real.
  static const double phase = std::arg(bare_transfer_amplitude());
  return phase;
}

CompositePulse composite_R(const HilbertSpec& spec, double zeta) {
  if (!(zeta > 0.0)) throw std::invalid_argument("composite pulse coupling must be positive");
  return composite_R(spec, zeta, std::numbers::pi / (2.0 * zeta));
}

CompositePulse composite_R(const HilbertSpec& spec, double zeta, double duration) {
  if (!(zeta > 0.0)) throw std::invalid_argument("composite pulse coupling must be positive");
  CompositePulse out;
  out.pulses = {
      SidebandPulse{1, Level::g, Level::e, Sideband::blue, zeta, duration, 0.0, +1},
      SidebandPulse{1, Level::e, Level::l, Sideband::red, zeta, duration, 0.0, +1},
      SidebandPulse{1, Level::g, Level::l, Sideband::red, zeta, duration, calibrated_phase_c(), +1},
  };
  out.op = Operator::identity(spec.dimension());
  for (const auto& p : out.pulses) out.op = p.unitary(spec) * out.op;
  return out;
}

}  // namespace iontoffoli
