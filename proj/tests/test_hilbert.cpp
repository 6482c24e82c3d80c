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
#include <random>

#include <gtest/gtest.h>

#include "iontoffoli/hilbert.hpp"

namespace iontoffoli {
namespace {

DenseMatrix random_hermitian(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  DenseMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(n(rng), n(rng));
  return 0.5 * (a + a.adjoint());
}

// Taylor series with scaling and squaring, independent of the eigensolver.
DenseMatrix expm_taylor(const DenseMatrix& a) {
  int squarings = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.5) {
    norm /= 2;
    ++squarings;
  }
  const DenseMatrix scaled = a / std::pow(2.0, squarings);
  DenseMatrix term = DenseMatrix::Identity(a.rows(), a.cols());
  DenseMatrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = (term * scaled / static_cast<double>(k)).eval();
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = (sum * sum).eval();
  return sum;
}

TEST(HilbertSpec, DimensionAndIndexRoundTrip) {
  for (int cutoff : {1, 3, 10}) {
    const HilbertSpec spec(cutoff);
    EXPECT_EQ(spec.dimension(), 27 * (cutoff + 1));
    for (int i = 0; i < spec.dimension(); ++i) EXPECT_EQ(spec.index(spec.label(i)), i);
  }
}

TEST(HilbertSpec, PhononIsFastestAndLevelOrderIsLge) {
  const HilbertSpec spec(2);
  EXPECT_EQ(spec.index(Level::l, Level::l, Level::l, 0), 0);
  EXPECT_EQ(spec.index(Level::l, Level::l, Level::l, 1), 1);
  EXPECT_EQ(spec.index(Level::l, Level::l, Level::g, 0), 3);
  EXPECT_EQ(spec.index(Level::l, Level::l, Level::e, 0), 6);
  EXPECT_EQ(spec.index(Level::g, Level::l, Level::l, 0), 27);
  EXPECT_EQ(spec.label_string(spec.index(Level::g, Level::e, Level::l, 2)), "|gel,2>");
}

TEST(HilbertSpec, RejectsBadArguments) {
  EXPECT_THROW(HilbertSpec(0), std::invalid_argument);
  const HilbertSpec spec(2);
  EXPECT_THROW(spec.index(Level::g, Level::g, Level::g, 3), std::invalid_argument);
  EXPECT_THROW(spec.label(spec.dimension()), std::invalid_argument);
  EXPECT_THROW(ion_op(spec, 4, Level::g, Level::e), std::invalid_argument);
}

TEST(PhononOps, AnnihilatorMatrixElements) {
  const HilbertSpec spec(5);
  const Operator a = phonon_annihilator(spec);
  for (int n = 1; n <= 5; ++n) {
    const int from = spec.index(Level::e, Level::g, Level::l, n);
    const int to = spec.index(Level::e, Level::g, Level::l, n - 1);
    EXPECT_NEAR(std::abs(a.coeff(to, from) - std::sqrt(static_cast<double>(n))), 0.0, 1e-15);
  }
  EXPECT_EQ(a.nonzeros(), 27L * 5);
}

TEST(PhononOps, CommutatorIsIdentityBelowCutoff) {
  const int cutoff = 6;
  const HilbertSpec spec(cutoff);
  const DenseMatrix a = phonon_annihilator(spec).to_dense();
  const DenseMatrix comm = a * a.adjoint() - a.adjoint() * a;
  for (int i = 0; i < spec.dimension(); ++i) {
    const double expected = spec.label(i).phonons == cutoff ? -cutoff : 1.0;
    EXPECT_NEAR(comm(i, i).real(), expected, 1e-12);
  }
  const DenseMatrix n = phonon_number(spec).to_dense();
  EXPECT_LT((n - a.adjoint() * a).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(IonOps, ProjectorActsOnOneIon) {
  const HilbertSpec spec(2);
  const Operator op = ion_op(spec, 2, Level::e, Level::g);
  const int in = spec.index(Level::l, Level::g, Level::e, 1);
  const int out = spec.index(Level::l, Level::e, Level::e, 1);
  EXPECT_EQ(op.coeff(out, in), cplx(1.0));
  EXPECT_EQ(op.nonzeros(), 9L * 3);
  const DenseMatrix sum = (ion_op(spec, 3, Level::l, Level::l) + ion_op(spec, 3, Level::g, Level::g) +
                           ion_op(spec, 3, Level::e, Level::e))
                              .to_dense();
  EXPECT_LT((sum - DenseMatrix::Identity(spec.dimension(), spec.dimension())).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Operator, DenseAndSparseAgree) {
  const HilbertSpec spec(2);
  const Operator s = phonon_annihilator(spec) * ion_op(spec, 1, Level::e, Level::g);
  const Operator d(s.to_dense());
  EXPECT_TRUE(s.is_sparse());
  EXPECT_FALSE(d.is_sparse());
  const Operator ps = s.adjoint() * s + s;
  const Operator pd = d.adjoint() * d + d;
  EXPECT_LT((ps.to_dense() - pd.to_dense()).cwiseAbs().maxCoeff(), 1e-15);
  Ket v = Ket::Zero(spec.dimension());
  v(spec.index(Level::g, Level::g, Level::g, 1)) = 1.0;
  EXPECT_LT((s * v - d * v).norm(), 1e-15);
}

TEST(ExpmUnitary, MatchesTaylorSeries) {
  const DenseMatrix h = random_hermitian(12, 3);
  const double t = 0.7;
  const DenseMatrix ref = expm_taylor(-kI * t * h);
  const Operator u = expm_unitary(Operator(h), t);
  EXPECT_LT((u.to_dense() - ref).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(u.unitarity_error(), 1e-12);
  const DenseMatrix back = expm_unitary(Operator(h), -t).to_dense();
  EXPECT_LT((back * u.to_dense() - DenseMatrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ExpmUnitary, TwoLevelRabiOracle) {
  DenseMatrix h = DenseMatrix::Zero(2, 2);
  const double w = 1.3;
  h(0, 1) = h(1, 0) = w;
  const double t = 0.4;
  const DenseMatrix u = expm_unitary(Operator(h), t).to_dense();
  EXPECT_NEAR(std::abs(u(0, 0) - std::cos(w * t)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(u(1, 0) - (-kI * std::sin(w * t))), 0.0, 1e-14);
}

TEST(ExpmUnitary, RejectsNonHermitian) {
  DenseMatrix h = DenseMatrix::Zero(2, 2);
  h(0, 1) = 1.0;
  EXPECT_THROW(expm_unitary(Operator(h), 1.0), std::invalid_argument);
}

TEST(Logical, EncodingLabelsAndPhases) {
  EXPECT_EQ(logical_bits(5), (std::array<int, 3>{1, 0, 1}));
  const BasisLabel c3 = computational_label(3);
  EXPECT_EQ(c3.ions[0], Level::e);
  EXPECT_EQ(c3.ions[1], Level::l);
  EXPECT_EQ(c3.ions[2], Level::g);
  EXPECT_EQ(c3.phonons, 0);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(logical_phase(i), cplx(1.0));
  EXPECT_EQ(logical_phase(6), -kI);
  EXPECT_EQ(logical_phase(7), -kI);
  EXPECT_THROW(logical_bits(8), std::invalid_argument);
}

TEST(Logical, EmbedProjectRoundTrip) {
  const HilbertSpec spec(2);
  LogicalMatrix rho = LogicalMatrix::Random();
  rho = (rho * rho.adjoint()).eval();
  const DensityMatrix full = embed_computational(spec, rho);
  const LogicalMatrix back = logical_project(spec, full);
  // Projection is in the phase-redefined basis: M_ij = conj(ph_i) rho_ij ph_j.
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      EXPECT_NEAR(std::abs(back(i, j) - std::conj(logical_phase(i)) * rho(i, j) * logical_phase(j)), 0.0, 1e-14);
  EXPECT_NEAR((logical_embed(spec, 7) - logical_phase(7) * computational_embed(spec, 7)).norm(), 0.0, 1e-15);
}

}  // namespace
}  // namespace iontoffoli
