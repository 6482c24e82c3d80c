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

// iontoffoli: run one experiment and write its data files plus a manifest.
//
// Exit codes: 0 success, 1 I/O or usage error, 2 invalid config,
// 3 numerical failure.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "iontoffoli/experiments.hpp"

namespace {

constexpr int kExitIo = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> phonon_cutoff;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config or a previous run's manifest.json");
  sub->add_option("--out", f.out, "Output directory (created if missing)");
  sub->add_option("--seed", f.seed, "Seed for stochastic experiments (overrides the config)");
  sub->add_option("--threads", f.threads, "Worker threads (overrides $IONTOFFOLI_THREADS)");
  sub->add_option("--phonon-cutoff", f.phonon_cutoff, "Highest Fock state kept (overrides the config)");
}

int run(iontoffoli::ExperimentKind kind, const Flags& f) {
  using namespace iontoffoli;
  try {
    ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
    if (f.threads && *f.threads < 1) throw ConfigError("--threads must be >= 1");
    if (f.phonon_cutoff && *f.phonon_cutoff < 1) throw ConfigError("--phonon-cutoff must be >= 1");
    RunOptions opts;
    opts.out_dir = f.out;
    opts.seed = f.seed;
    opts.threads = f.threads;
    opts.phonon_cutoff = f.phonon_cutoff;
    const RunSummary summary = run_experiment(kind, cfg, opts);
    std::cout << summary.headline << "\n";
    for (const auto& name : summary.outputs) std::cout << "  wrote " << (opts.out_dir / name).string() << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IntegratorFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const InconsistencyError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trapped-ion Toffoli gate simulation"};
  app.set_version_flag("--version", iontoffoli::library_version());
  app.require_subcommand(1);

  struct Entry {
    const char* name;
    const char* help;
    iontoffoli::ExperimentKind kind;
  };
  const Entry entries[] = {
      {"unitary-qpt", "Closed-system gate: logical matrix, process matrix, fidelities",
       iontoffoli::ExperimentKind::unitary_qpt},
      {"ratio-search", "Grid plus simplex search over the Rabi ratios", iontoffoli::ExperimentKind::ratio_search},
      {"dephasing-sweep", "Average state fidelity against phonon dephasing",
       iontoffoli::ExperimentKind::dephasing_sweep},
      {"heating-sweep", "Average state fidelity against bath occupation", iontoffoli::ExperimentKind::heating_sweep},
      {"mc", "Monte Carlo average over Rabi frequency fluctuations", iontoffoli::ExperimentKind::mc},
  };

  Flags flags;
  std::optional<iontoffoli::ExperimentKind> chosen;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_flags(sub, flags);
    sub->callback([&chosen, kind = e.kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  return run(*chosen, flags);
}
