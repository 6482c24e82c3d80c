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
#include <numbers>

#include <gtest/gtest.h>

#include "iontoffoli/pulses.hpp"

namespace iontoffoli {
namespace {

Ket basis(const HilbertSpec& spec, Level s1, Level s2, Level s3, int n) {
  Ket v = Ket::Zero(spec.dimension());
  v(spec.index(s1, s2, s3, n)) = 1.0;
  return v;
}

TEST(Sideband, RedExchangesPhononForSpinQuantum) {
  const HilbertSpec spec(4);
  const double zeta = 0.7, phase = 0.3;
  const Operator h = red_sideband_h(spec, 1, Level::g, Level::e, zeta, phase);
  EXPECT_LT(h.hermiticity_error(), 1e-15);
  // H |g, n> = zeta e^{i phase} sqrt(n) |e, n-1>
  const Ket out = h * basis(spec, Level::g, Level::l, Level::l, 3);
  const cplx amp = out(spec.index(Level::e, Level::l, Level::l, 2));
  EXPECT_NEAR(std::abs(amp - std::polar(zeta * std::sqrt(3.0), phase)), 0.0, 1e-14);
  EXPECT_NEAR(out.norm(), std::abs(amp), 1e-14);
}

TEST(Sideband, BlueCreatesBothQuanta) {
  const HilbertSpec spec(4);
  const double zeta = 0.7;
  const Operator h = blue_sideband_h(spec, 2, Level::g, Level::l, zeta);
  const Ket out = h * basis(spec, Level::e, Level::g, Level::g, 1);
  EXPECT_NEAR(std::abs(out(spec.index(Level::e, Level::l, Level::g, 2)) - zeta * std::sqrt(2.0)), 0.0, 1e-14);
  EXPECT_NEAR(out.norm(), zeta * std::sqrt(2.0), 1e-14);
}

TEST(Sideband, RejectsDegenerateArguments) {
  const HilbertSpec spec(2);
  EXPECT_THROW(red_sideband_h(spec, 1, Level::g, Level::g, 1.0), std::invalid_argument);
  EXPECT_THROW(blue_sideband_h(spec, 1, Level::g, Level::e, 0.0), std::invalid_argument);
  EXPECT_THROW(red_sideband_h(spec, 0, Level::g, Level::e, 1.0), std::invalid_argument);
  SidebandPulse p;
  p.duration = 0.0;
  EXPECT_THROW(p.unitary(spec), std::invalid_argument);
}

TEST(Sideband, HalfRabiFlopOracle) {
  // exp(+i H tau) on the two-state red manifold {|g,1>, |e,0>} with
  // H = zeta (|e,0><g,1| + h.c.) gives cos(zeta tau) and i sin(zeta tau).
  const HilbertSpec spec(3);
  const double zeta = 2.0, tau = 0.37;
  SidebandPulse p{1, Level::g, Level::e, Sideband::red, zeta, tau, 0.0, +1};
  const Ket out = p.unitary(spec) * basis(spec, Level::g, Level::g, Level::g, 1);
  EXPECT_NEAR(std::abs(out(spec.index(Level::g, Level::g, Level::g, 1)) - std::cos(zeta * tau)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(out(spec.index(Level::e, Level::g, Level::g, 0)) - kI * std::sin(zeta * tau)), 0.0, 1e-13);
}

TEST(CompositeR, MapsComputationalStatesOntoEncoding) {
  for (int cutoff : {1, 3}) {
    const HilbertSpec spec(cutoff);
    const double zeta = 1.7;
    const CompositePulse r = composite_R(spec, zeta);
    ASSERT_EQ(r.pulses.size(), 3u);
    EXPECT_LT(r.op.unitarity_error(), 1e-12);
    for (Level s2 : {Level::g, Level::l})
      for (Level s3 : {Level::g, Level::l}) {
        const Ket g = r.op * basis(spec, Level::g, s2, s3, 0);
        EXPECT_NEAR(std::abs(g(spec.index(Level::g, s2, s3, 1)) - 1.0), 0.0, 1e-12);
        const Ket e = r.op * basis(spec, Level::e, s2, s3, 0);
        EXPECT_NEAR(std::abs(e(spec.index(Level::e, s2, s3, 0)) - 1.0), 0.0, 1e-12);
      }
  }
}

TEST(CompositeR, CalibratedPhaseMakesTransferAmplitudeReal) {
  const double phi = calibrated_phase_c();
  EXPECT_NEAR(phi, -std::numbers::pi / 2, 1e-12);
  const HilbertSpec spec(2);
  const Operator r = composite_R(spec, 0.4).op;
  const cplx amp = r.coeff(spec.index(Level::g, Level::g, Level::g, 1), spec.index(Level::g, Level::g, Level::g, 0));
  EXPECT_NEAR(amp.real(), 1.0, 1e-12);
  EXPECT_NEAR(amp.imag(), 0.0, 1e-12);
}

TEST(CompositeR, OnlyIonOneAndPhononChange) {
  const HilbertSpec spec(2);
  const Operator r = composite_R(spec, 1.0).op;
  for (int i = 0; i < spec.dimension(); ++i) {
    const Ket out = r * Ket::Unit(spec.dimension(), i);
    const BasisLabel in = spec.label(i);
    for (int k = 0; k < spec.dimension(); ++k) {
      if (std::abs(out(k)) < 1e-13) continue;
      const BasisLabel lab = spec.label(k);
      EXPECT_EQ(lab.ions[1], in.ions[1]);
      EXPECT_EQ(lab.ions[2], in.ions[2]);
    }
  }
}

TEST(CompositeR, ExplicitDurationEqualsNominal) {
  const HilbertSpec spec(2);
  const double zeta = 0.9;
  const DenseMatrix a = composite_R(spec, zeta).op.to_dense();
  const DenseMatrix b = composite_R(spec, zeta, std::numbers::pi / (2 * zeta)).op.to_dense();
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(composite_R(spec, -1.0), std::invalid_argument);
}

}  // namespace
}  // namespace iontoffoli
