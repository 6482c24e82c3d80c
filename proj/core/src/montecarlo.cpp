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

#include "iontoffoli/montecarlo.hpp"

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "iontoffoli/parallel.hpp"
#include "iontoffoli/qpt.hpp"

namespace iontoffoli {

namespace {

constexpr int kPulseChannel = 3;

double pairwise(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return v[0];
  const std::size_t half = n / 2;
  return pairwise(v, half) + pairwise(v + half, n - half);
}

}  // namespace

std::string to_string(SpreadSemantics s) { return s == SpreadSemantics::std_dev ? "std-dev" : "half-width"; }

SpreadSemantics spread_semantics_from_string(const std::string& s) {
  if (s == "std-dev") return SpreadSemantics::std_dev;
  if (s == "half-width") return SpreadSemantics::half_width;
  throw std::invalid_argument("spread semantics must be \"std-dev\" or \"half-width\", got \"" + s + "\"");
}

void FluctuationConfig::validate() const {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("fluctuation delta must be >= 0");
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (half_width() >= 1.0) throw std::invalid_argument("fluctuation spread would allow non-positive Rabi frequencies");
}

double FluctuationConfig::half_width() const {
  return semantics == SpreadSemantics::std_dev ? delta * std::sqrt(3.0) : delta;
}

double symmetric_uniform(std::uint64_t seed, int draw, int channel) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(channel)};
  std::mt19937_64 rng(seq);
  // 53 random mantissa bits, independent of the standard library's
  // distribution implementation.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

RabiSample sample_rabi(const RabiConfig& config, const FluctuationConfig& fluct, int draw) {
  config.validate();
  fluct.validate();
  const double a = fluct.half_width();
  RabiSample s;
  for (int j = 0; j < 3; ++j) s.relative[j] = fluct.delta == 0.0 ? 0.0 : a * symmetric_uniform(fluct.seed, draw, j);
  if (fluct.fluctuate_pulse_coupling && fluct.delta != 0.0)
    s.relative_pulse = a * symmetric_uniform(fluct.seed, draw, kPulseChannel);

  s.timing = nominal_timing(config);
  s.timing.pulse_coupling *= 1.0 + s.relative_pulse;
  s.config = config;
  s.config.pulse_rabi = {config.pulse_rabi_frequency(0), config.pulse_rabi_frequency(1),
                         config.pulse_rabi_frequency(2)};
  if (fluct.delta == 0.0) return s;
  const double o1 = config.rabi(1) * (1.0 + s.relative[0]);
  const double o2 = config.rabi(2) * (1.0 + s.relative[1]);
  const double o3 = config.rabi(3) * (1.0 + s.relative[2]);
  s.config.omega1 = o1;
  s.config.ratios = {o2 / o1, o3 / o1};
  return s;
}

double pairwise_sum(const std::vector<double>& values) { return pairwise(values.data(), values.size()); }

McResult mc_average_fidelity(const RabiConfig& config, const FluctuationConfig& fluct, const McOptions& options) {
  config.validate();
  fluct.validate();
  if (options.noise) options.noise->validate();
  const ProcessMatrix target = chi_of_unitary(ideal_toffoli());
  const HilbertSpec spec(options.noise ? options.phonon_cutoff : 1);

  // The encode pulse only changes when its coupling fluctuates.
  const GateTiming nominal = nominal_timing(config);
  const Operator r_nominal = composite_R(spec, nominal.pulse_coupling, nominal.pulse_duration).op;

  McResult out;
  out.draws.resize(fluct.n_samples);
  parallel_for(fluct.n_samples, options.threads, [&](int draw) {
    const RabiSample s = sample_rabi(config, fluct, draw);
    ProcessMatrix chi;
    try {
      if (options.noise) {
        IntegratorConfig integ = options.integrator;
        if (integ.hamiltonian_norm == 0.0) integ.hamiltonian_norm = schedule(s.config).theta_123;
        chi = NoisyGate(spec, s.config, *options.noise, integ, 1, s.timing).chi();
      } else {
        const Operator r = s.relative_pulse == 0.0
                               ? r_nominal
                               : composite_R(spec, s.timing.pulse_coupling, s.timing.pulse_duration).op;
        const Operator u = r.adjoint() * expm_unitary(tavis_cummings_h(spec, s.config), s.timing.tc_duration) * r;
        chi = chi_of_kraus({logical_matrix(spec, u)});
      }
    } catch (const IntegratorFailure& e) {
      throw IntegratorFailure("draw " + std::to_string(draw) + ": " + e.what(), e.report());
    }
    DrawRecord& rec = out.draws[draw];
    rec.draw = draw;
    rec.relative = s.relative;
    rec.relative_pulse = s.relative_pulse;
    rec.gate_fidelity = gate_fidelity(target, chi);
    rec.state_fidelity = avg_state_fidelity(rec.gate_fidelity);
    rec.leakage = 1.0 - chi.trace().real();
  });

  // Shifted accumulation: identical draws give exactly zero spread.
  const double x0 = out.draws[0].state_fidelity;
  std::vector<double> dev(out.draws.size()), dev2(out.draws.size());
  for (std::size_t k = 0; k < out.draws.size(); ++k) {
    dev[k] = out.draws[k].state_fidelity - x0;
    dev2[k] = dev[k] * dev[k];
  }
  const double n = static_cast<double>(out.draws.size());
  const double s1 = pairwise_sum(dev), s2 = pairwise_sum(dev2);
  out.mean = x0 + s1 / n;
  if (out.draws.size() > 1) {
    const double var = std::max(0.0, (s2 - s1 * s1 / n) / (n - 1.0));
    out.std_error = std::sqrt(var / n);
  }
  return out;
}

std::string draws_to_csv(const std::vector<DrawRecord>& draws) {
  std::ostringstream os;
  os << "# schema=iontoffoli.mc_draws/1\n";
  os << "draw,rel_omega1,rel_omega2,rel_omega3,rel_pulse,gate_fidelity,state_fidelity,leakage\n";
  os << std::setprecision(17);
  for (const auto& d : draws)
    os << d.draw << ',' << d.relative[0] << ',' << d.relative[1] << ',' << d.relative[2] << ',' << d.relative_pulse
       << ',' << d.gate_fidelity << ',' << d.state_fidelity << ',' << d.leakage << '\n';
  return os.str();
}

}  // namespace iontoffoli
