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
#include <cstring>

#include <gtest/gtest.h>

#include "iontoffoli/montecarlo.hpp"
#include "iontoffoli/ratio_optimizer.hpp"

namespace iontoffoli {
namespace {

TEST(SymmetricUniform, RangeMomentsAndDeterminism) {
  double s = 0.0, s2 = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const double u = symmetric_uniform(42, k, 0);
    ASSERT_GE(u, -1.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0 / 3.0, 0.01);
  EXPECT_EQ(symmetric_uniform(42, 7, 1), symmetric_uniform(42, 7, 1));
  EXPECT_NE(symmetric_uniform(42, 7, 1), symmetric_uniform(42, 7, 2));
  EXPECT_NE(symmetric_uniform(42, 7, 1), symmetric_uniform(43, 7, 1));
}

TEST(FluctuationConfig, SemanticsAndValidation) {
  FluctuationConfig f;
  EXPECT_NEAR(f.half_width(), 0.05 * std::sqrt(3.0), 1e-15);
  f.semantics = SpreadSemantics::half_width;
  EXPECT_EQ(f.half_width(), 0.05);
  EXPECT_EQ(spread_semantics_from_string(to_string(SpreadSemantics::std_dev)), SpreadSemantics::std_dev);
  EXPECT_EQ(spread_semantics_from_string("half-width"), SpreadSemantics::half_width);
  EXPECT_THROW(spread_semantics_from_string("sigma"), std::invalid_argument);
  f = FluctuationConfig{};
  f.delta = -0.1;
  EXPECT_THROW(f.validate(), std::invalid_argument);
  f = FluctuationConfig{};
  f.n_samples = 0;
  EXPECT_THROW(f.validate(), std::invalid_argument);
  f = FluctuationConfig{};
  f.delta = 0.6;
  EXPECT_THROW(f.validate(), std::invalid_argument);
}

TEST(SampleRabi, BoundedAndPure) {
  const RabiConfig cfg;
  FluctuationConfig f;
  f.fluctuate_pulse_coupling = true;
  const double a = f.half_width();
  for (int d = 0; d < 100; ++d) {
    const RabiSample s = sample_rabi(cfg, f, d);
    for (int j = 0; j < 3; ++j) {
      EXPECT_LE(std::abs(s.relative[j]), a);
      EXPECT_NEAR(s.config.rabi(j + 1), cfg.rabi(j + 1) * (1 + s.relative[j]), 1e-9 * cfg.rabi(j + 1));
    }
    EXPECT_LE(std::abs(s.relative_pulse), a);
    EXPECT_NEAR(s.timing.pulse_coupling, cfg.composite_coupling() * (1 + s.relative_pulse), 1e-9);
    EXPECT_EQ(s.timing.tc_duration, nominal_timing(cfg).tc_duration);
    EXPECT_EQ(s.timing.pulse_duration, nominal_timing(cfg).pulse_duration);
    EXPECT_EQ(sample_rabi(cfg, f, d).relative, s.relative);
  }
  f.delta = 0.0;
  const RabiSample z = sample_rabi(cfg, f, 3);
  EXPECT_EQ(z.config.omega1, cfg.omega1);
  EXPECT_EQ(z.config.ratios, cfg.ratios);
  EXPECT_EQ(z.relative_pulse, 0.0);
}

TEST(PairwiseSum, MatchesExactSums) {
  std::vector<double> ints;
  for (int k = 1; k <= 1000; ++k) ints.push_back(k);
  EXPECT_EQ(pairwise_sum(ints), 500500.0);
  EXPECT_NEAR(pairwise_sum(std::vector<double>(1000, 0.1)), 100.0, 1e-12);
  EXPECT_EQ(pairwise_sum({}), 0.0);
}

TEST(McAverage, ZeroSpreadReducesToUnitaryGate) {
  FluctuationConfig f;
  f.delta = 0.0;
  f.n_samples = 4;
  const McResult r = mc_average_fidelity(RabiConfig{}, f, McOptions{});
  EXPECT_NEAR(1.0 - r.mean, objective(std::sqrt(143.0), 16.0), 1e-13);
  EXPECT_EQ(r.std_error, 0.0);
  ASSERT_EQ(r.draws.size(), 4u);
  EXPECT_NEAR(r.draws[2].leakage, r.draws[0].leakage, 0.0);
}

TEST(McAverage, IndependentOfThreadCount) {
  FluctuationConfig f;
  f.n_samples = 40;
  f.seed = 9;
  McOptions o1, o3;
  o3.threads = 3;
  const McResult a = mc_average_fidelity(RabiConfig{}, f, o1);
  const McResult b = mc_average_fidelity(RabiConfig{}, f, o3);
  EXPECT_EQ(std::memcmp(&a.mean, &b.mean, sizeof(double)), 0);
  EXPECT_EQ(std::memcmp(&a.std_error, &b.std_error, sizeof(double)), 0);
  for (int k = 0; k < 40; ++k) EXPECT_EQ(a.draws[k].state_fidelity, b.draws[k].state_fidelity);
}

TEST(McAverage, LargerSpreadLowersFidelity) {
  FluctuationConfig f;
  f.n_samples = 100;
  f.delta = 0.01;
  const double small = mc_average_fidelity(RabiConfig{}, f, McOptions{}).mean;
  f.delta = 0.05;
  const McResult big = mc_average_fidelity(RabiConfig{}, f, McOptions{});
  EXPECT_GT(small, big.mean);
  EXPECT_GT(big.std_error, 0.0);
  for (const auto& d : big.draws) {
    EXPECT_GE(d.state_fidelity, 1.0 / 9.0 - 1e-12);
    EXPECT_LE(d.state_fidelity, 1.0 + 1e-12);
  }
}

TEST(McAverage, NoisyDrawsBelowUnitaryDraws) {
  FluctuationConfig f;
  f.n_samples = 2;
  McOptions noisy;
  noisy.noise = NoiseParams{1.0 / 0.14, 1.0, 1.0 / 0.085};
  noisy.phonon_cutoff = 4;
  noisy.threads = 2;
  const McResult a = mc_average_fidelity(RabiConfig{}, f, McOptions{});
  const McResult b = mc_average_fidelity(RabiConfig{}, f, noisy);
  for (int k = 0; k < 2; ++k) {
    EXPECT_LT(b.draws[k].state_fidelity, a.draws[k].state_fidelity);
    EXPECT_GT(b.draws[k].leakage, 0.0);
  }
}

TEST(DrawsCsv, Layout) {
  DrawRecord d;
  d.draw = 3;
  const std::string csv = draws_to_csv({d});
  EXPECT_NE(csv.find("draw,rel_omega1,rel_omega2,rel_omega3,rel_pulse,gate_fidelity,state_fidelity,leakage"),
            std::string::npos);
  EXPECT_NE(csv.find("\n3,"), std::string::npos);
}

}  // namespace
}  // namespace iontoffoli
