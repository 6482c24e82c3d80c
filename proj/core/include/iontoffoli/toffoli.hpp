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

#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "iontoffoli/hilbert.hpp"
#include "iontoffoli/pulses.hpp"

namespace iontoffoli {

/// Default reference coupling eta * Omega_1 = 2 pi x 10 kHz (t_T = 50 us).
inline constexpr double kDefaultEtaOmega1 = 2.0 * std::numbers::pi * 1.0e4;
inline constexpr double kDefaultEta = 0.05;

/// Laser and trap parameters. Only the products eta * Omega enter the
/// dynamics; eta and the trap frequency are kept as metadata.
struct RabiConfig {
  double eta = kDefaultEta;
  double omega1 = kDefaultEtaOmega1 / kDefaultEta;          ///< rad/s
  std::array<double, 2> ratios{std::sqrt(143.0), 16.0};     ///< Omega_2/Omega_1, Omega_3/Omega_1
  std::array<double, 3> pulse_rabi{0.0, 0.0, 0.0};          ///< Omega_a,b,c; 0 means "same as Omega_1"
  double trap_frequency = 2.0 * std::numbers::pi * 1.0e6;  ///< metadata

  void validate() const;

  /// Omega_j for ion j in 1..3.
  double rabi(int ion) const;
  /// Tavis-Cummings coupling eta Omega_j / 2 for ion j.
  double coupling(int ion) const { return eta * rabi(ion) / 2.0; }
  double pulse_rabi_frequency(int pulse) const;
  /// Shared coupling zeta of the encode pulses, eta Omega_a / 2.
  double composite_coupling() const { return eta * pulse_rabi_frequency(0) / 2.0; }
  double eta_omega1() const { return eta * omega1; }
};

struct GateSchedule {
  double tc_duration;  ///< t_T = pi / (eta Omega_1)
  double gate_duration;
  double theta_123;
  double theta_12;
  double theta_13;
  double theta_1;
};

GateSchedule schedule(const RabiConfig& config);

/// t_G = (pi / eta) [2 (1/Omega_a + 1/Omega_b + 1/Omega_c) + 1/Omega_1].
double gate_duration(const RabiConfig& config);

/// Durations and couplings actually used to build one gate realisation.
/// Perturbed Rabi frequencies keep the nominal timing.
struct GateTiming {
  double tc_duration;
  double pulse_coupling;
  double pulse_duration;
};

GateTiming nominal_timing(const RabiConfig& config);

/// H_TC = sum_j (eta Omega_j / 2) a |e_j><g_j| + h.c.
Operator tavis_cummings_h(const HilbertSpec& spec, const RabiConfig& config);

/// U_T = R^dagger exp(-i H_TC t_T) R at the nominal timing.
Operator toffoli_unitary(const HilbertSpec& spec, const RabiConfig& config);
Operator toffoli_unitary(const HilbertSpec& spec, const RabiConfig& config, const GateTiming& timing);

/// M_ij = <b_i| U |c_j>: inputs are prepared in the plain computational
/// encoding and outputs are read in the logical basis B, whose last two
/// elements carry the -i redefinition.
LogicalMatrix logical_matrix(const HilbertSpec& spec, const Operator& u);

/// Toffoli in logical ordering: swap of elements 6 and 7, identity elsewhere.
LogicalMatrix ideal_toffoli();

/// Population that leaves the logical subspace, summed over the eight inputs.
double leakage(const LogicalMatrix& m);

/// Closed-form single-excitation amplitudes of exp(-i H_TC t) for the encoded
/// input selected by the control values and the logical target value.
struct SectorAmplitudes {
  double frequency;               ///< G = sqrt(sum of coupled g_j^2)
  cplx stay;                      ///< amplitude to remain in the encoded input state
  cplx flip;                      ///< amplitude to the other encoded target state
  std::array<cplx, 2> controls;   ///< amplitude to |g1, e_j, 0> for j = 2, 3 (zero if dark)
};

SectorAmplitudes sector_oracle(int control2, int control3, int logical_target, double t, const RabiConfig& config);

/// Logical matrix assembled from sector_oracle, for comparison with logical_matrix.
LogicalMatrix oracle_logical_matrix(double t, const RabiConfig& config);

}  // namespace iontoffoli
