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
#include <string>
#include <vector>

#include "iontoffoli/hilbert.hpp"
#include "iontoffoli/qpt.hpp"
#include "iontoffoli/toffoli.hpp"

namespace iontoffoli {

struct RatioSearchConfig {
  std::array<double, 2> lower{1.0, 1.0};
  std::array<double, 2> upper{30.0, 30.0};
  int resolution = 59;           ///< grid points per axis
  double tolerance = 1e-6;       ///< simplex size at which refinement stops
  int max_evaluations = 4000;    ///< per refinement run
  int refine_candidates = 5;     ///< best grid points handed to the simplex stage
  bool joint_time = false;       ///< also search t = s * pi / (eta Omega_1)
  std::array<double, 2> time_scale_bounds{0.8, 1.2};
  int threads = 1;
  RabiConfig base;               ///< eta and Omega_1; its ratios are ignored

  void validate() const;
};

struct Evaluation {
  double r2;
  double r3;
  double time_scale;
  double infidelity;
  std::string stage;  ///< "grid" or "simplex"
};

struct RatioSearchResult {
  double r2 = 0.0;
  double r3 = 0.0;
  double time_scale = 1.0;
  double infidelity = 1.0;
  std::vector<Evaluation> trace;
};

/// 1 - F_s of the logical gate built with ratios (r2, r3), evaluated on the
/// one-phonon space (the logical inputs never reach two phonons). The encode
/// pulse is built once and reused.
class RatioObjective {
 public:
  explicit RatioObjective(const RabiConfig& base = {});

  double operator()(double r2, double r3, double time_scale = 1.0) const;

 private:
  RabiConfig base_;
  HilbertSpec spec_;
  Operator r_;
  ProcessMatrix target_;
};

/// Free-function form of RatioObjective.
double objective(double r2, double r3, const RabiConfig& base = {});

/// Grid scan of the box followed by Nelder-Mead from the best grid points.
RatioSearchResult optimize(const RatioSearchConfig& config);

/// Nelder-Mead from a single seed, clamped to the configured box.
RatioSearchResult refine(const RatioSearchConfig& config, std::array<double, 2> seed, double time_scale = 1.0);

/// Header plus one line per evaluation: r2,r3,time_scale,infidelity,stage.
std::string trace_to_csv(const std::vector<Evaluation>& trace);

}  // namespace iontoffoli
