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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iontoffoli/montecarlo.hpp"
#include "iontoffoli/open_system.hpp"
#include "iontoffoli/ratio_optimizer.hpp"
#include "iontoffoli/toffoli.hpp"

namespace iontoffoli {

/// Invalid or unreadable configuration. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical check failed after the computation ran. Exit code 3.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { unitary_qpt, ratio_search, dephasing_sweep, heating_sweep, mc };

std::string to_string(ExperimentKind kind);
/// Accepts the CLI names; "mc-fluctuations" is an alias of "mc".
ExperimentKind experiment_kind_from_string(const std::string& name);

inline constexpr double kDefaultKappa = 1.0 / 0.140;  ///< 1/s
inline constexpr double kDefaultGamma = 1.0 / 0.085;  ///< 1/s

struct DephasingSweepConfig {
  std::vector<double> gamma_ratios{0.0, 2.5e-3, 5e-3, 7.5e-3, 10e-3, 12.5e-3};  ///< gamma / (eta Omega_1)
  double kappa = kDefaultKappa;
  double nbar = 1.0;
  /// Re-run the last grid point at cutoff + 5 and require |dF_s| <= 1e-4.
  bool convergence_check = true;
};

struct HeatingSweepConfig {
  std::vector<double> nbar_values{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  double kappa = kDefaultKappa;
  double gamma = kDefaultGamma;
  int cutoff_low = 10;         ///< used for nbar <= nbar_threshold
  int cutoff_high = 25;        ///< used above the threshold
  double nbar_threshold = 1.0;
  /// Re-run the largest nbar at cutoff + 5 and require |dF_s| <= 1e-4.
  bool convergence_check = true;
};

struct McBlock {
  FluctuationConfig fluctuation;
  bool noise_enabled = true;
  NoiseParams noise{kDefaultKappa, 1.0, kDefaultGamma};
};

struct ExperimentConfig {
  std::optional<ExperimentKind> kind;
  std::uint64_t seed = 1;
  RabiConfig rabi;
  int phonon_cutoff = 10;
  IntegratorConfig integrator;
  RatioSearchConfig ratio_search;
  std::optional<std::array<double, 2>> refine_seed;
  DephasingSweepConfig dephasing;
  HeatingSweepConfig heating;
  McBlock mc;

  /// Throws ConfigError.
  void validate() const;
};

/// Parses a JSON config. Unknown keys, wrong types and invalid values throw
/// ConfigError. A run manifest is accepted and yields its embedded config.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Full config echo; parse_config(config_to_json(c)) reproduces c.
std::string config_to_json(const ExperimentConfig& config);

struct RunOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> phonon_cutoff;
};

struct RunSummary {
  std::vector<std::string> outputs;  ///< file names written inside out_dir
  std::string headline;              ///< one-line human summary
};

RunSummary run_unitary_qpt(const ExperimentConfig& config, const RunOptions& options);
RunSummary run_ratio_search(const ExperimentConfig& config, const RunOptions& options);
RunSummary run_dephasing_sweep(const ExperimentConfig& config, const RunOptions& options);
RunSummary run_heating_sweep(const ExperimentConfig& config, const RunOptions& options);
RunSummary run_mc(const ExperimentConfig& config, const RunOptions& options);

/// Applies the overrides, runs the experiment and writes manifest.json.
RunSummary run_experiment(ExperimentKind kind, ExperimentConfig config, const RunOptions& options);

/// Writes through a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string library_version();

}  // namespace iontoffoli
