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

#include "iontoffoli/toffoli.hpp"

#include <stdexcept>

namespace iontoffoli {

void RabiConfig::validate() const {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(omega1 > 0.0)) throw std::invalid_argument("Omega_1 must be positive");
  if (!(ratios[0] > 0.0) || !(ratios[1] > 0.0)) throw std::invalid_argument("Rabi ratios must be positive");
  for (double p : pulse_rabi)
    if (p < 0.0 || !std::isfinite(p)) throw std::invalid_argument("pulse Rabi frequencies must be >= 0");
}

double RabiConfig::rabi(int ion) const {
  switch (ion) {
    case 1: return omega1;
    case 2: return ratios[0] * omega1;
    case 3: return ratios[1] * omega1;
    default: throw std::invalid_argument("ion index must be 1, 2 or 3");
  }
}

double RabiConfig::pulse_rabi_frequency(int pulse) const {
  if (pulse < 0 || pulse > 2) throw std::invalid_argument("pulse index must be 0, 1 or 2");
  return pulse_rabi[pulse] > 0.0 ? pulse_rabi[pulse] : omega1;
}

GateSchedule schedule(const RabiConfig& config) {
  config.validate();
  const double o1 = config.rabi(1), o2 = config.rabi(2), o3 = config.rabi(3);
  GateSchedule s{};
  s.tc_duration = std::numbers::pi / (config.eta * o1);
  s.gate_duration = gate_duration(config);
  s.theta_123 = config.eta * std::sqrt(o1 * o1 + o2 * o2 + o3 * o3);
  s.theta_12 = config.eta * std::sqrt(o1 * o1 + o2 * o2);
  s.theta_13 = config.eta * std::sqrt(o1 * o1 + o3 * o3);
  s.theta_1 = config.eta * o1;
  return s;
}

double gate_duration(const RabiConfig& config) {
  config.validate();
  double inv = 0.0;
  for (int k = 0; k < 3; ++k) inv += 1.0 / config.pulse_rabi_frequency(k);
  return (std::numbers::pi / config.eta) * (2.0 * inv + 1.0 / config.omega1);
}

GateTiming nominal_timing(const RabiConfig& config) {
  config.validate();
  const double zeta = config.composite_coupling();
  return {std::numbers::pi / config.eta_omega1(), zeta, std::numbers::pi / (2.0 * zeta)};
}

Operator tavis_cummings_h(const HilbertSpec& spec, const RabiConfig& config) {
  config.validate();
  const Operator a = phonon_annihilator(spec);
  Operator h = Operator::zero(spec.dimension());
  for (int j = 1; j <= kIons; ++j) {
    const Operator half = cplx(config.coupling(j)) * (a * ion_op(spec, j, Level::e, Level::g));
    h = h + half + half.adjoint();
  }
  return h;
}

Operator toffoli_unitary(const HilbertSpec& spec, const RabiConfig& config) {
  return toffoli_unitary(spec, config, nominal_timing(config));
}

Operator toffoli_unitary(const HilbertSpec& spec, const RabiConfig& config, const GateTiming& timing) {
  const Operator r = composite_R(spec, timing.pulse_coupling, timing.pulse_duration).op;
  const Operator evo = expm_unitary(tavis_cummings_h(spec, config), timing.tc_duration);
  return r.adjoint() * evo * r;
}

LogicalMatrix logical_matrix(const HilbertSpec& spec, const Operator& u) {
  if (u.dimension() != spec.dimension()) throw std::invalid_argument("logical_matrix: dimension mismatch");
  LogicalMatrix m;
  for (int j = 0; j < kLogicalDim; ++j) {
    const Ket out = u.apply(computational_embed(spec, j));
    for (int i = 0; i < kLogicalDim; ++i)
      m(i, j) = std::conj(logical_phase(i)) * out(spec.index(computational_label(i)));
  }
  return m;
}

LogicalMatrix ideal_toffoli() {
  LogicalMatrix t = LogicalMatrix::Identity();
  t(6, 6) = t(7, 7) = 0.0;
  t(6, 7) = t(7, 6) = 1.0;
  return t;
}

double leakage(const LogicalMatrix& m) {
  double total = 0.0;
  for (int j = 0; j < kLogicalDim; ++j) total += 1.0 - m.col(j).squaredNorm();
  return total;
}

SectorAmplitudes sector_oracle(int control2, int control3, int logical_target, double t, const RabiConfig& config) {
  if ((control2 != 0 && control2 != 1) || (control3 != 0 && control3 != 1) ||
      (logical_target != 0 && logical_target != 1))
    throw std::invalid_argument("sector_oracle: logical values must be 0 or 1");
  config.validate();

  // Coupled ions: ion 1 always; a control ion couples only when it sits in g.
  const std::array<double, 3> g{config.coupling(1), control2 == 0 ? config.coupling(2) : 0.0,
                                control3 == 0 ? config.coupling(3) : 0.0};
  const double g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
  const double big_g = std::sqrt(g2);
  const double c = std::cos(big_g * t);
  const cplx s = -kI * std::sin(big_g * t);

  // Single-excitation block {|1ph>, |e_1>, |e_2>, |e_3>}: the phonon state
  // couples only to the bright combination sum g_j |e_j> / G.
  SectorAmplitudes out{};
  out.frequency = big_g;
  if (logical_target == 0) {
    // encoded |g1, 1>
    out.stay = c;
    out.flip = s * g[0] / big_g;
    out.controls = {s * g[1] / big_g, s * g[2] / big_g};
  } else {
    // encoded |e1, 0>
    out.stay = 1.0 + g[0] * g[0] * (c - 1.0) / g2;
    out.flip = s * g[0] / big_g;
    out.controls = {g[1] * g[0] * (c - 1.0) / g2, g[2] * g[0] * (c - 1.0) / g2};
  }
  return out;
}

LogicalMatrix oracle_logical_matrix(double t, const RabiConfig& config) {
  LogicalMatrix m = LogicalMatrix::Zero();
  for (int j = 0; j < kLogicalDim; ++j) {
    const auto q = logical_bits(j);
    const SectorAmplitudes amp = sector_oracle(q[1], q[2], q[0], t, config);
    const int other = j ^ 1;
    m(j, j) = std::conj(logical_phase(j)) * amp.stay;
    m(other, j) = std::conj(logical_phase(other)) * amp.flip;
  }
  return m;
}

}  // namespace iontoffoli
