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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iontoffoli/hilbert.hpp"
#include "iontoffoli/qpt.hpp"
#include "iontoffoli/toffoli.hpp"

namespace iontoffoli {

/// Thermal heating of the phonon mode (rate kappa, bath occupation nbar) and
/// phonon-number dephasing (rate gamma). Rates in 1/s.
struct NoiseParams {
  double kappa = 0.0;
  double nbar = 0.0;
  double gamma = 0.0;

  void validate() const;
  bool is_zero() const { return kappa == 0.0 && gamma == 0.0; }
};

struct IntegratorConfig {
  /// Step size is max_step_norm / ||H||.
  double max_step_norm = 0.05;
  /// Norm estimate for H; 0 selects the max absolute row sum.
  double hamiltonian_norm = 0.0;
  double trace_tolerance = 1e-8;
  double min_eigenvalue_tolerance = 1e-7;
  /// Largest allowed population in the top Fock state.
  double tail_tolerance = 1e-6;
  bool check_tail = true;

  void validate() const;
};

struct EvolutionReport {
  int steps = 0;
  double dt = 0.0;
  double trace_drift = 0.0;
  double hermiticity_drift = 0.0;
  /// NaN when not computed (non-Hermitian input).
  double min_eigenvalue = 0.0;
  double tail_population = 0.0;
  bool sector_path = false;
};

class IntegratorFailure : public std::runtime_error {
 public:
  IntegratorFailure(const std::string& what, EvolutionReport report)
      : std::runtime_error(what), report_(report) {}
  const EvolutionReport& report() const { return report_; }

 private:
  EvolutionReport report_;
};

/// d rho / dt = -i[H, rho] - (kappa/2)(nbar+1)(n rho + rho n - 2 a rho a^dag)
///              - (kappa nbar/2)(a a^dag rho + rho a a^dag - 2 a^dag rho a)
///              - gamma [n, [n, rho]]
DensityMatrix lindblad_rhs(const HilbertSpec& spec, const DensityMatrix& rho, const Operator& h,
                           const NoiseParams& params);

/// Fixed-step RK4 integration of lindblad_rhs over time t. Uses the sector
/// propagator when H conserves the ionic l-pattern and the excitation number,
/// the full-space integrator otherwise. Throws IntegratorFailure when trace
/// drift, negativity or the Fock tail exceed the configured tolerances.
DensityMatrix evolve(const HilbertSpec& spec, const DensityMatrix& rho0, double t, const Operator& h,
                     const NoiseParams& params, const IntegratorConfig& integrator,
                     EvolutionReport* report = nullptr);

/// Reference route: RK4 on the full D x D matrix with sparse operators.
DensityMatrix evolve_full_space(const HilbertSpec& spec, const DensityMatrix& rho0, double t, const Operator& h,
                                const NoiseParams& params, const IntegratorConfig& integrator,
                                EvolutionReport* report = nullptr);

/// True when every matrix element of H connects states with the same l-pattern
/// and the same excitation number n + #e.
bool conserves_sectors(const HilbertSpec& spec, const Operator& h);

/// Full-space states embedded from logical kets: w_i = R c_i.
std::array<Ket, kLogicalDim> encoded_inputs(const HilbertSpec& spec, const Operator& r);

/// The sandwiched noisy gate R^dag E_H(R rho R^dag) R with the unit responses
/// E_ij -> Lambda(E_ij) cached. Noise acts only during the Tavis-Cummings window.
class NoisyGate {
 public:
  NoisyGate(const HilbertSpec& spec, const RabiConfig& config, const NoiseParams& params,
            const IntegratorConfig& integrator, int threads = 1, std::optional<GateTiming> timing = std::nullopt);

  /// Images of the logical matrix units, indexed [8 i + j].
  const std::array<LogicalMatrix, kChiDim>& unit_responses() const { return units_; }

  /// sum_ij rho_ij Lambda(E_ij); no checks.
  LogicalMatrix apply_linear(const LogicalMatrix& rho) const;

  struct Result {
    LogicalMatrix rho;
    double leakage = 0.0;  ///< 1 - Tr(rho) for unit-trace inputs
  };
  Result apply(const LogicalMatrix& rho) const;

  ProcessMatrix chi() const { return chi_from_unit_responses(units_); }

  /// Worst diagnostics over the cached evolutions.
  const EvolutionReport& report() const { return report_; }

 private:
  std::array<LogicalMatrix, kChiDim> units_;
  EvolutionReport report_;
};

/// Direct route: embed, conjugate by R, evolve, conjugate back and project.
NoisyGate::Result noisy_gate_map(const LogicalMatrix& rho_logical, const HilbertSpec& spec, const RabiConfig& config,
                                 const NoiseParams& params, const IntegratorConfig& integrator);

/// Default integrator for the gate window: step norm taken against Theta_123.
IntegratorConfig gate_integrator(const RabiConfig& config);

}  // namespace iontoffoli
