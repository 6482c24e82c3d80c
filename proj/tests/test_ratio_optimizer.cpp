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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "iontoffoli/qpt.hpp"
#include "iontoffoli/ratio_optimizer.hpp"
#include "iontoffoli/toffoli.hpp"

namespace iontoffoli {
namespace {

// Independent route: full three-phonon gate, trace formula for F_g.
double trace_infidelity(double r2, double r3) {
  RabiConfig cfg;
  cfg.ratios = {r2, r3};
  const HilbertSpec spec(3);
  const LogicalMatrix m = logical_matrix(spec, toffoli_unitary(spec, cfg));
  const double fg = std::norm((ideal_toffoli().adjoint() * m).trace()) / 64.0;
  return 1.0 - avg_state_fidelity(fg);
}

TEST(RatioObjective, MatchesTraceFormula) {
  const RatioObjective f;
  for (auto [r2, r3] : {std::pair{std::sqrt(143.0), 16.0}, std::pair{3.0, 7.5}, std::pair{20.0, 2.0}})
    EXPECT_NEAR(f(r2, r3), trace_infidelity(r2, r3), 1e-12) << r2 << "," << r3;
  EXPECT_NEAR(objective(std::sqrt(143.0), 16.0), 2.6817e-4, 1e-8);
}

TEST(RatioObjective, InvariantUnderOmegaRescaling) {
  RabiConfig base;
  const double a = objective(7.0, 11.0, base);
  base.omega1 *= 0.31;
  EXPECT_NEAR(objective(7.0, 11.0, base), a, 1e-12);
}

TEST(RatioObjective, SymmetricUnderControlExchange) {
  const RatioObjective f;
  EXPECT_NEAR(f(5.5, 13.25), f(13.25, 5.5), 1e-12);
}

TEST(RatioObjective, BoundedAndTimeScaleAware) {
  const RatioObjective f;
  for (double r : {1.0, 4.0, 9.0, 29.0}) {
    const double v = f(r, 30.0 - r);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_NE(f(std::sqrt(143.0), 16.0, 1.05), f(std::sqrt(143.0), 16.0, 1.0));
}

TEST(RatioSearchConfig, Validation) {
  RatioSearchConfig c;
  c.resolution = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RatioSearchConfig{};
  c.lower = {5.0, 1.0};
  c.upper = {4.0, 30.0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = RatioSearchConfig{};
  c.lower = {0.0, 1.0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Optimize, SmallBoxSearch) {
  RatioSearchConfig c;
  c.lower = {10.0, 14.0};
  c.upper = {14.0, 18.0};
  c.resolution = 9;
  c.refine_candidates = 2;
  c.threads = 2;
  const RatioSearchResult res = optimize(c);
  const auto grid = std::count_if(res.trace.begin(), res.trace.end(), [](const Evaluation& e) { return e.stage == "grid"; });
  EXPECT_EQ(grid, 81);
  double best_grid = 1.0;
  for (const auto& e : res.trace) {
    EXPECT_GE(e.r2, c.lower[0]);
    EXPECT_LE(e.r2, c.upper[0]);
    EXPECT_GE(e.r3, c.lower[1]);
    EXPECT_LE(e.r3, c.upper[1]);
    if (e.stage == "grid") best_grid = std::min(best_grid, e.infidelity);
  }
  EXPECT_LE(res.infidelity, best_grid);
  EXPECT_NEAR(objective(res.r2, res.r3), res.infidelity, 1e-14);
  // Below the value at the default ratios, which lie in this box.
  EXPECT_LT(res.infidelity, objective(std::sqrt(143.0), 16.0));
}

TEST(Refine, DescendsFromSeed) {
  RatioSearchConfig c;
  const std::array<double, 2> seed{std::sqrt(143.0), 16.0};
  const RatioSearchResult res = refine(c, seed);
  EXPECT_LT(res.infidelity, objective(seed[0], seed[1]));
  EXPECT_NEAR(res.time_scale, 1.0, 0.0);
  EXPECT_FALSE(res.trace.empty());
}

TEST(Refine, JointTimeStaysInBounds) {
  RatioSearchConfig c;
  c.joint_time = true;
  c.max_evaluations = 300;
  const RatioSearchResult res = refine(c, {12.0, 16.0});
  EXPECT_GE(res.time_scale, c.time_scale_bounds[0]);
  EXPECT_LE(res.time_scale, c.time_scale_bounds[1]);
  EXPECT_NEAR(RatioObjective()(res.r2, res.r3, res.time_scale), res.infidelity, 1e-14);
}

TEST(TraceCsv, Layout) {
  const std::string csv = trace_to_csv({{1.0, 2.0, 1.0, 0.5, "grid"}});
  EXPECT_NE(csv.find("r2,r3,time_scale,infidelity,stage"), std::string::npos);
  EXPECT_NE(csv.find(",grid\n"), std::string::npos);
}

}  // namespace
}  // namespace iontoffoli
