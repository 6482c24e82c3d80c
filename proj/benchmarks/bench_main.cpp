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

#include <benchmark/benchmark.h>

#include "iontoffoli/experiments.hpp"
#include "iontoffoli/montecarlo.hpp"
#include "iontoffoli/open_system.hpp"
#include "iontoffoli/qpt.hpp"
#include "iontoffoli/ratio_optimizer.hpp"
#include "iontoffoli/toffoli.hpp"

namespace {

using namespace iontoffoli;

void BM_ToffoliUnitary(benchmark::State& state) {
  const HilbertSpec spec(static_cast<int>(state.range(0)));
  const RabiConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(toffoli_unitary(spec, cfg));
}
BENCHMARK(BM_ToffoliUnitary)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_RatioObjective(benchmark::State& state) {
  const RatioObjective f;
  double r3 = 16.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f(11.9, r3));
    r3 += 1e-9;
  }
}
BENCHMARK(BM_RatioObjective)->Unit(benchmark::kMicrosecond);

void BM_ChiOfMap(benchmark::State& state) {
  const LogicalMatrix t = ideal_toffoli();
  const LinearMap map = [&t](const LogicalMatrix& r) -> LogicalMatrix { return t * r * t.adjoint(); };
  for (auto _ : state) benchmark::DoNotOptimize(chi_of_map(map));
}
BENCHMARK(BM_ChiOfMap)->Unit(benchmark::kMillisecond);

void BM_LindbladRhsFull(benchmark::State& state) {
  const HilbertSpec spec(static_cast<int>(state.range(0)));
  const Operator h = tavis_cummings_h(spec, RabiConfig{});
  const DensityMatrix rho = DensityMatrix::Identity(spec.dimension(), spec.dimension()) / spec.dimension();
  const NoiseParams p{kDefaultKappa, 1.0, kDefaultGamma};
  for (auto _ : state) benchmark::DoNotOptimize(lindblad_rhs(spec, rho, h, p));
}
BENCHMARK(BM_LindbladRhsFull)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_NoisyGate(benchmark::State& state) {
  const HilbertSpec spec(static_cast<int>(state.range(0)));
  const RabiConfig cfg;
  const NoiseParams p{kDefaultKappa, 1.0, kDefaultGamma};
  for (auto _ : state) benchmark::DoNotOptimize(NoisyGate(spec, cfg, p, gate_integrator(cfg)).chi());
}
BENCHMARK(BM_NoisyGate)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_McUnitaryDraws(benchmark::State& state) {
  FluctuationConfig f;
  f.n_samples = 50;
  for (auto _ : state) benchmark::DoNotOptimize(mc_average_fidelity(RabiConfig{}, f, McOptions{}).mean);
}
BENCHMARK(BM_McUnitaryDraws)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
