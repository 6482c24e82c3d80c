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

#include "iontoffoli/ratio_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "iontoffoli/parallel.hpp"

namespace iontoffoli {

namespace {

using Point = std::vector<double>;

struct Box {
  Point lo, hi;
  Point clamp(Point p) const {
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::clamp(p[k], lo[k], hi[k]);
    return p;
  }
};

Box search_box(const RatioSearchConfig& c) {
  Box b{{c.lower[0], c.lower[1]}, {c.upper[0], c.upper[1]}};
  if (c.joint_time) {
    b.lo.push_back(c.time_scale_bounds[0]);
    b.hi.push_back(c.time_scale_bounds[1]);
  }
  return b;
}

// Standard Nelder-Mead (reflect 1, expand 2, contract 1/2, shrink 1/2) with
// every trial point clamped to the box.
void nelder_mead(const RatioObjective& f, const Box& box, Point start, Point step, const RatioSearchConfig& cfg,
                 RatioSearchResult& result) {
  const std::size_t n = start.size();
  auto eval = [&](const Point& p) {
    const double t = n == 3 ? p[2] : 1.0;
    const double v = f(p[0], p[1], t);
    result.trace.push_back({p[0], p[1], t, v, "simplex"});
    return v;
  };

  std::vector<Point> simplex{box.clamp(start)};
  for (std::size_t k = 0; k < n; ++k) {
    Point p = simplex[0];
    p[k] += step[k];
    if (p[k] > box.hi[k]) p[k] = simplex[0][k] - step[k];
    simplex.push_back(box.clamp(p));
  }
  std::vector<double> values;
  for (const auto& p : simplex) values.push_back(eval(p));

  int evals = static_cast<int>(n + 1);
  std::vector<std::size_t> order(n + 1);
  while (evals < cfg.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<Point> s;
    std::vector<double> v;
    for (auto i : order) {
      s.push_back(simplex[i]);
      v.push_back(values[i]);
    }
    simplex = s;
    values = v;

    double size = 0.0;
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(simplex[i][k] - simplex[0][k]));
    if (size < cfg.tolerance) break;

    Point centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    auto along = [&](double coef) {
      Point p(n);
      for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + coef * (simplex[n][k] - centroid[k]);
      return box.clamp(p);
    };

    const Point xr = along(-1.0);
    const double fr = eval(xr);
    ++evals;
    if (fr < values[0]) {
      const Point xe = along(-2.0);
      const double fe = eval(xe);
      ++evals;
      if (fe < fr) {
        simplex[n] = xe;
        values[n] = fe;
      } else {
        simplex[n] = xr;
        values[n] = fr;
      }
      continue;
    }
    if (fr < values[n - 1]) {
      simplex[n] = xr;
      values[n] = fr;
      continue;
    }
    const bool outside = fr < values[n];
    const Point xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    ++evals;
    if (fc < (outside ? fr : values[n])) {
      simplex[n] = xc;
      values[n] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
      values[i] = eval(simplex[i]);
      ++evals;
    }
  }

  const auto best = std::min_element(values.begin(), values.end()) - values.begin();
  if (values[best] < result.infidelity) {
    result.infidelity = values[best];
    result.r2 = simplex[best][0];
    result.r3 = simplex[best][1];
    result.time_scale = n == 3 ? simplex[best][2] : 1.0;
  }
}

}  // namespace

void RatioSearchConfig::validate() const {
  for (int k = 0; k < 2; ++k) {
    if (!(lower[k] > 0.0)) throw std::invalid_argument("ratio search box bounds must be positive");
    if (!(upper[k] > lower[k])) throw std::invalid_argument("ratio search box is empty or degenerate");
  }
  if (resolution < 2) throw std::invalid_argument("ratio search resolution must be >= 2 per axis");
  if (!(tolerance > 0.0)) throw std::invalid_argument("ratio search tolerance must be positive");
  if (max_evaluations < 4) throw std::invalid_argument("ratio search max_evaluations must be >= 4");
  if (refine_candidates < 1) throw std::invalid_argument("ratio search refine_candidates must be >= 1");
  if (joint_time && !(time_scale_bounds[0] > 0.0 && time_scale_bounds[1] > time_scale_bounds[0]))
    throw std::invalid_argument("time scale bounds must be positive and ordered");
  base.validate();
}

RatioObjective::RatioObjective(const RabiConfig& base)
    : base_(base), spec_(1), target_(chi_of_unitary(ideal_toffoli())) {
  base_.validate();
  const GateTiming tm = nominal_timing(base_);
  r_ = composite_R(spec_, tm.pulse_coupling, tm.pulse_duration).op;
}

double RatioObjective::operator()(double r2, double r3, double time_scale) const {
  if (!(r2 > 0.0) || !(r3 > 0.0)) throw std::invalid_argument("objective: ratios must be positive");
  if (!(time_scale > 0.0)) throw std::invalid_argument("objective: time scale must be positive");
  RabiConfig cfg = base_;
  cfg.ratios = {r2, r3};
  const double t = time_scale * std::numbers::pi / cfg.eta_omega1();
  const Operator u = r_.adjoint() * expm_unitary(tavis_cummings_h(spec_, cfg), t) * r_;
  const ProcessMatrix chi = chi_of_kraus({logical_matrix(spec_, u)});
  return 1.0 - avg_state_fidelity(gate_fidelity(target_, chi));
}

double objective(double r2, double r3, const RabiConfig& base) { return RatioObjective(base)(r2, r3); }

RatioSearchResult optimize(const RatioSearchConfig& config) {
  config.validate();
  const RatioObjective f(config.base);
  const Box box = search_box(config);
  const int res = config.resolution;

  RatioSearchResult result;
  std::vector<Evaluation> grid(static_cast<std::size_t>(res) * res);
  const double h2 = (config.upper[0] - config.lower[0]) / (res - 1);
  const double h3 = (config.upper[1] - config.lower[1]) / (res - 1);
  parallel_for(res * res, config.threads, [&](int idx) {
    const double r2 = config.lower[0] + h2 * (idx / res);
    const double r3 = config.lower[1] + h3 * (idx % res);
    grid[idx] = {r2, r3, 1.0, f(r2, r3), "grid"};
  });
  result.trace = grid;

  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return grid[a].infidelity < grid[b].infidelity; });
  result.r2 = grid[order[0]].r2;
  result.r3 = grid[order[0]].r3;
  result.infidelity = grid[order[0]].infidelity;

  const int candidates = std::min<int>(config.refine_candidates, static_cast<int>(order.size()));
  for (int c = 0; c < candidates; ++c) {
    const auto& g = grid[order[c]];
    Point start{g.r2, g.r3}, step{h2, h3};
    if (config.joint_time) {
      start.push_back(1.0);
      step.push_back(0.05 * (config.time_scale_bounds[1] - config.time_scale_bounds[0]));
    }
    nelder_mead(f, box, start, step, config, result);
  }
  return result;
}

RatioSearchResult refine(const RatioSearchConfig& config, std::array<double, 2> seed, double time_scale) {
  config.validate();
  const RatioObjective f(config.base);
  const Box box = search_box(config);
  RatioSearchResult result;
  Point start{seed[0], seed[1]};
  Point step{0.05 * (config.upper[0] - config.lower[0]), 0.05 * (config.upper[1] - config.lower[1])};
  if (config.joint_time) {
    start.push_back(time_scale);
    step.push_back(0.05 * (config.time_scale_bounds[1] - config.time_scale_bounds[0]));
  }
  nelder_mead(f, box, start, step, config, result);
  return result;
}

std::string trace_to_csv(const std::vector<Evaluation>& trace) {
  std::ostringstream os;
  os << "# schema=iontoffoli.ratio_trace/1\n";
  os << "r2,r3,time_scale,infidelity,stage\n";
  os << std::setprecision(17);
  for (const auto& e : trace) os << e.r2 << ',' << e.r3 << ',' << e.time_scale << ',' << e.infidelity << ',' << e.stage << '\n';
  return os.str();
}

}  // namespace iontoffoli
