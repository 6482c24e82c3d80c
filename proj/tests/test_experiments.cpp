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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "iontoffoli/experiments.hpp"
#include "iontoffoli/qpt.hpp"
#include "json.hpp"

namespace iontoffoli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_plain(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / ("iontoffoli_test_" + name)) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

#ifdef IONTOFFOLI_CLI_PATH
int run_cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" IONTOFFOLI_CLI_PATH "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

TEST(Config, DefaultsFromMinimalDocument) {
  const ExperimentConfig c = parse_config(R"({"schema": "iontoffoli.config/1"})");
  EXPECT_FALSE(c.kind.has_value());
  EXPECT_EQ(c.phonon_cutoff, 10);
  EXPECT_NEAR(c.rabi.ratios[0], std::sqrt(143.0), 0.0);
  EXPECT_EQ(c.mc.fluctuation.semantics, SpreadSemantics::std_dev);
  EXPECT_TRUE(c.mc.noise_enabled);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config(R"({"schema": "iontoffoli.config/1", "sytem": {}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"system": {"phonon_cutof": 4}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"system": {"ratios": [1]}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"system": {"ratios": [-1, 2]}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"system": {"eta": "small"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mc": {"semantics": "sigma"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": "teleport"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"schema": "other/1"})"), ConfigError);
  EXPECT_THROW(parse_config("{ not json"), ConfigError);
  EXPECT_THROW(parse_config(R"({"heating_sweep": {"nbar_values": []}})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, RoundTripIsExact) {
  ExperimentConfig c;
  c.kind = ExperimentKind::heating_sweep;
  c.seed = 123456789012345ULL;
  c.rabi.omega1 = 0.1 + 2.0 / 3.0;
  c.rabi.ratios = {std::sqrt(2.0), 1.0 / 7.0};
  c.phonon_cutoff = 7;
  c.integrator.max_step_norm = 0.0123;
  c.refine_seed = std::array<double, 2>{11.9, 16.1};
  c.dephasing.gamma_ratios = {0.0, 1e-3};
  c.heating.nbar_values = {0.5};
  c.mc.fluctuation.semantics = SpreadSemantics::half_width;
  c.mc.noise_enabled = false;
  const std::string text = config_to_json(c);
  const ExperimentConfig back = parse_config(text);
  EXPECT_EQ(config_to_json(back), text);
  EXPECT_EQ(back.rabi.omega1, c.rabi.omega1);
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(*back.kind, ExperimentKind::heating_sweep);
}

TEST(Config, ExperimentNames) {
  EXPECT_EQ(experiment_kind_from_string("mc-fluctuations"), ExperimentKind::mc);
  for (auto k : {ExperimentKind::unitary_qpt, ExperimentKind::ratio_search, ExperimentKind::dephasing_sweep,
                 ExperimentKind::heating_sweep, ExperimentKind::mc})
    EXPECT_EQ(experiment_kind_from_string(to_string(k)), k);
}

TEST(Runners, UnitaryQptOutputs) {
  TempDir dir("qpt");
  ExperimentConfig c;
  c.phonon_cutoff = 2;
  RunOptions o;
  o.out_dir = dir.path();
  run_experiment(ExperimentKind::unitary_qpt, c, o);
  for (const char* f : {"chi_unitary.json", "chi_moduli.csv", "logical_matrix.csv", "fidelities.json", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir.path() / f)) << f;
  const json fid = json::parse(read_file(dir.path() / "fidelities.json"));
  EXPECT_NEAR(fid["infidelity"].get<double>(), 2.6817e-4, 1e-8);
  EXPECT_LT(fid["oracle_max_difference"].get<double>(), 1e-8);
  const ProcessMatrix chi = chi_from_json(read_file(dir.path() / "chi_unitary.json"));
  EXPECT_NEAR(chi.trace().real(), 1.0 - fid["leakage"].get<double>(), 1e-12);
  const json man = json::parse(read_file(dir.path() / "manifest.json"));
  EXPECT_EQ(man["experiment"], "unitary-qpt");
  EXPECT_EQ(man["config"]["system"]["phonon_cutoff"], 2);
  for (const auto& e : fs::directory_iterator(dir.path())) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST(Runners, McWithoutSpreadMatchesUnitaryQpt) {
  TempDir dir("mc0");
  ExperimentConfig c;
  c.mc.fluctuation.delta = 0.0;
  c.mc.fluctuation.n_samples = 1;
  c.mc.noise_enabled = false;
  RunOptions o;
  o.out_dir = dir.path();
  run_experiment(ExperimentKind::mc, c, o);
  const json s = json::parse(read_file(dir.path() / "mc_summary.json"));
  run_experiment(ExperimentKind::unitary_qpt, ExperimentConfig{}, o);
  const json f = json::parse(read_file(dir.path() / "fidelities.json"));
  EXPECT_NEAR(s["mean_state_fidelity"].get<double>(), f["state_fidelity"].get<double>(), 1e-10);
  EXPECT_EQ(s["std_error"].get<double>(), 0.0);
}

TEST(Runners, DephasingSweepSmall) {
  TempDir dir("deph");
  ExperimentConfig c;
  c.phonon_cutoff = 4;
  c.dephasing.gamma_ratios = {0.0, 12.5e-3};
  RunOptions o;
  o.out_dir = dir.path();
  o.threads = 2;
  run_experiment(ExperimentKind::dephasing_sweep, c, o);
  const std::string csv = read_file(dir.path() / "dephasing_sweep.csv");
  EXPECT_EQ(csv.rfind("# schema=iontoffoli.dephasing_sweep/1", 0), 0u);
  const json s = json::parse(read_file(dir.path() / "dephasing_summary.json"));
  EXPECT_TRUE(s["monotone_non_increasing"].get<bool>());
  EXPECT_GE(s["state_fidelity_last"].get<double>(), 0.93);
  EXPECT_LT(s["cutoff_convergence"]["shift"].get<double>(), 1e-4);
}

TEST(Runners, HeatingSweepSmall) {
  TempDir dir("heat");
  ExperimentConfig c;
  c.heating.nbar_values = {0.0, 1.0};
  c.heating.cutoff_low = 4;
  RunOptions o;
  o.out_dir = dir.path();
  o.threads = 2;
  run_experiment(ExperimentKind::heating_sweep, c, o);
  const json s = json::parse(read_file(dir.path() / "heating_summary.json"));
  EXPECT_EQ(s["nbar_top"].get<double>(), 1.0);
  EXPECT_NEAR(s["ratio_top_to_nbar1"].get<double>(), 1.0, 0.0);
  EXPECT_EQ(s["cutoff_convergence"]["phonon_cutoff"], 9);
  EXPECT_TRUE(fs::exists(dir.path() / "row_discrepancy.csv"));
}

TEST(Runners, RatioSearchSmall) {
  TempDir dir("ratio");
  ExperimentConfig c;
  c.ratio_search.lower = {11.0, 15.0};
  c.ratio_search.upper = {13.0, 17.0};
  c.ratio_search.resolution = 5;
  c.ratio_search.refine_candidates = 1;
  c.refine_seed = std::array<double, 2>{std::sqrt(143.0), 16.0};
  RunOptions o;
  o.out_dir = dir.path();
  run_experiment(ExperimentKind::ratio_search, c, o);
  const json opt = json::parse(read_file(dir.path() / "optimum.json"));
  EXPECT_LT(opt["infidelity"].get<double>(), opt["reference"]["infidelity"].get<double>());
  EXPECT_EQ(opt["infidelity"].get<double>(), opt["fresh_infidelity"].get<double>());
  EXPECT_TRUE(opt.contains("refine"));
}

TEST(Runners, MismatchedExperimentIsConfigError) {
  TempDir dir("mismatch");
  ExperimentConfig c;
  c.kind = ExperimentKind::mc;
  RunOptions o;
  o.out_dir = dir.path();
  EXPECT_THROW(run_experiment(ExperimentKind::unitary_qpt, c, o), ConfigError);
}

TEST(WriteFileAtomic, ReplacesContent) {
  TempDir dir("atomic");
  write_file_atomic(dir.path() / "a.txt", "one");
  write_file_atomic(dir.path() / "a.txt", "two");
  EXPECT_EQ(read_file(dir.path() / "a.txt"), "two");
  EXPECT_FALSE(fs::exists(dir.path() / "a.txt.tmp"));
}

#ifdef IONTOFFOLI_CLI_PATH
TEST(Cli, ExitCodes) {
  TempDir dir("cli");
  const std::string out = " --out \"" + dir.path().string() + "\"";
  EXPECT_EQ(run_cli("unitary-qpt --phonon-cutoff 1" + out), 0);

  write_plain(dir.path() / "bad.json", R"({"system": {"unknown": 1}})");
  EXPECT_EQ(run_cli("unitary-qpt --config \"" + (dir.path() / "bad.json").string() + "\"" + out), 2);
  EXPECT_EQ(run_cli("mc --config /nonexistent.json" + out), 2);
  EXPECT_EQ(run_cli("mc --threads 0" + out), 2);

  // Heating at nbar = 5 on a one-phonon space overflows the Fock tail.
  write_plain(dir.path() / "tail.json",
              R"({"heating_sweep": {"nbar_values": [5.0], "cutoff_high": 1, "convergence_check": false}})");
  EXPECT_EQ(run_cli("heating-sweep --config \"" + (dir.path() / "tail.json").string() + "\"" + out), 3);
  EXPECT_NE(run_cli("no-such-command"), 0);
}

TEST(Cli, ThreadsFromEnvironmentAndFlag) {
  TempDir dir("threads");
  const std::string out = " --out \"" + dir.path().string() + "\"";
  ASSERT_EQ(run_cli("unitary-qpt --phonon-cutoff 1" + out, "IONTOFFOLI_THREADS=3"), 0);
  EXPECT_EQ(json::parse(read_file(dir.path() / "manifest.json"))["threads"], 3);
  ASSERT_EQ(run_cli("unitary-qpt --phonon-cutoff 1 --threads 2" + out, "IONTOFFOLI_THREADS=3"), 0);
  EXPECT_EQ(json::parse(read_file(dir.path() / "manifest.json"))["threads"], 2);
}

TEST(Cli, ManifestRerunIsBitIdentical) {
  TempDir a("rerun_a"), b("rerun_b");
  write_plain(a.path() / "mc.json", R"({"mc": {"n_samples": 25, "noise_enabled": false}})");
  ASSERT_EQ(run_cli("mc --seed 77 --threads 3 --config \"" + (a.path() / "mc.json").string() + "\" --out \"" +
                    a.path().string() + "\""),
            0);
  ASSERT_EQ(run_cli("mc --threads 1 --config \"" + (a.path() / "manifest.json").string() + "\" --out \"" +
                    b.path().string() + "\""),
            0);
  for (const char* f : {"mc_draws.csv", "mc_summary.json"})
    EXPECT_EQ(read_file(a.path() / f), read_file(b.path() / f)) << f;
  const json ma = json::parse(read_file(a.path() / "manifest.json"));
  const json mb = json::parse(read_file(b.path() / "manifest.json"));
  EXPECT_EQ(ma["config"], mb["config"]);
  EXPECT_EQ(mb["seed"], 77);
}
#endif

}  // namespace
}  // namespace iontoffoli
