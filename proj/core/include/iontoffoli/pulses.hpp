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

#include <vector>

#include "iontoffoli/hilbert.hpp"

namespace iontoffoli {

enum class Sideband { red, blue };

/// Red sideband coupling zeta e^{i phase} a sigma_+ + h.c. with
/// sigma_+ = |upper><lower| on ion `ion`. A red pulse exchanges one phonon
/// against one spin quantum.
Operator red_sideband_h(const HilbertSpec& spec, int ion, Level lower, Level upper, double zeta,
                        double phase = 0.0);

/// Blue sideband coupling zeta e^{i phase} a^dagger sigma_+ + h.c.: spin and
/// phonon quanta are created or destroyed together.
Operator blue_sideband_h(const HilbertSpec& spec, int ion, Level lower, Level upper, double zeta,
                         double phase = 0.0);

struct SidebandPulse {
  int ion = 1;
  Level lower = Level::g;
  Level upper = Level::e;
  Sideband sideband = Sideband::red;
  double coupling = 1.0;  ///< zeta = eta Omega / 2, angular frequency
  double duration = 0.0;  ///< seconds
  double phase = 0.0;     ///< laser phase on the raising part
  int exponent_sign = +1; ///< +1 means exp(+i H tau)

  Operator hamiltonian(const HilbertSpec& spec) const;
  Operator unitary(const HilbertSpec& spec) const;
};

/// The encode operation R = R_C R_B R_A acting on ion 1 and the phonon mode.
struct CompositePulse {
  std::vector<SidebandPulse> pulses;  ///< in application order (A, B, C)
  Operator op;
};

/// Laser phase of the C pulse that makes R|g1,0> = |g1,1> hold with a real,
/// positive amplitude. Computed once from the bare pulse product.
double calibrated_phase_c();

/// R with all three pulses at coupling `zeta` for tau = pi / (2 zeta).
CompositePulse composite_R(const HilbertSpec& spec, double zeta);

/// R with an explicit pulse duration, used when the coupling is perturbed but
/// the pulse timing stays at its nominal value. The calibrated phase is kept.
CompositePulse composite_R(const HilbertSpec& spec, double zeta, double duration);

}  // namespace iontoffoli
