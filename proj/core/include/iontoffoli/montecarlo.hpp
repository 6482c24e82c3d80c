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
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iontoffoli/open_system.hpp"
#include "iontoffoli/toffoli.hpp"

namespace iontoffoli {

/// How the spread Delta maps onto the uniform distribution U[-a, a] of the
/// relative fluctuation dOmega / Omega.
enum class SpreadSemantics {
  std_dev,     ///< Delta is the standard deviation: a = Delta sqrt(3)
  half_width,  ///< Delta is the half-width: a = Delta
};

std::string to_string(SpreadSemantics s);
SpreadSemantics spread_semantics_from_string(const std::string& s);

struct FluctuationConfig {
  double delta = 0.05;
  int n_samples = 500;
  std::uint64_t seed = 1;
  SpreadSemantics semantics = SpreadSemantics::std_dev;
  /// Also perturb the encode-pulse coupling (one shared draw per sample).
  bool fluctuate_pulse_coupling = false;

  void validate() const;
  double half_width() const;
};

struct RabiSample {
  RabiConfig config;                 ///< perturbed Omega_j
  std::array<double, 3> relative{};  ///< dOmega_j / Omega_j
  double relative_pulse = 0.0;       ///< dzeta / zeta, zero unless enabled
  GateTiming timing{};               ///< nominal durations, possibly perturbed pulse coupling
};

/// Independent uniform relative shifts per ion, a pure function of
/// (seed, draw, ion).
RabiSample sample_rabi(const RabiConfig& config, const FluctuationConfig& fluct, int draw);

/// Uniform variate in [-1, 1) for stream (seed, draw, channel).
double symmetric_uniform(std::uint64_t seed, int draw, int channel);

struct DrawRecord {
  int draw = 0;
  std::array<double, 3> relative{};
  double relative_pulse = 0.0;
  double gate_fidelity = 0.0;
  double state_fidelity = 0.0;
  double leakage = 0.0;  ///< 1 - Tr chi
};

struct McOptions {
  /// Lindblad noise during the Tavis-Cummings window; unitary gate when empty.
  std::optional<NoiseParams> noise;
  int phonon_cutoff = 10;  ///< used only with noise
  IntegratorConfig integrator;
  int threads = 1;
};

struct McResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<DrawRecord> draws;  ///< sorted by draw index
};

/// Ensemble average of F_s over n_samples draws. Draws may run in parallel;
/// the mean is a pairwise sum in draw order, so results do not depend on the
/// thread count. Integrator failures are rethrown with the draw index.
McResult mc_average_fidelity(const RabiConfig& config, const FluctuationConfig& fluct, const McOptions& options);

/// Pairwise sum of the values in order.
double pairwise_sum(const std::vector<double>& values);

/// Header plus one line per draw:
/// draw,rel_omega1,rel_omega2,rel_omega3,rel_pulse,gate_fidelity,state_fidelity,leakage.
std::string draws_to_csv(const std::vector<DrawRecord>& draws);

}  // namespace iontoffoli
