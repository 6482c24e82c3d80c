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
#include <complex>
#include <string>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace iontoffoli {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using Ket = Eigen::VectorXcd;
using DensityMatrix = Eigen::MatrixXcd;

/// 8x8 matrix on the three-qubit logical space, rows/cols in logical order.
using LogicalMatrix = Eigen::Matrix<cplx, 8, 8>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr int kIons = 3;
inline constexpr int kLevels = 3;
inline constexpr int kLogicalDim = 8;

/// Internal ion levels. Ladder ordering is g < e < l; the enum value is the
/// position in the per-ion basis (l, g, e).
enum class Level : int { l = 0, g = 1, e = 2 };

char level_name(Level level);

struct BasisLabel {
  std::array<Level, kIons> ions;
  int phonons;

  bool operator==(const BasisLabel&) const = default;
};

/// Three 3-level ions times a Fock mode truncated at `phonon_cutoff` quanta.
///
/// Basis ordering is lexicographic over (s1, s2, s3, n) with levels ordered
/// (l, g, e) and the phonon number varying fastest.
class HilbertSpec {
 public:
  explicit HilbertSpec(int phonon_cutoff);

  int phonon_cutoff() const { return phonon_cutoff_; }
  int phonon_levels() const { return phonon_cutoff_ + 1; }
  int dimension() const { return 27 * phonon_levels(); }

  int index(Level s1, Level s2, Level s3, int n) const;
  int index(const BasisLabel& label) const;
  BasisLabel label(int index) const;
  std::string label_string(int index) const;

  bool operator==(const HilbertSpec&) const = default;

 private:
  int phonon_cutoff_;
};

HilbertSpec build_space(int phonon_cutoff);

/// Complex operator on the composite space. Storage is either dense or sparse;
/// every observable operation gives the same result for both.
class Operator {
 public:
  Operator() = default;
  explicit Operator(DenseMatrix m) : storage_(std::move(m)) {}
  explicit Operator(SparseMatrix m) : storage_(std::move(m)) {}

  static Operator identity(int dimension);
  static Operator zero(int dimension);

  int dimension() const;
  bool is_sparse() const { return std::holds_alternative<SparseMatrix>(storage_); }
  long nonzeros() const;

  DenseMatrix to_dense() const;
  SparseMatrix to_sparse() const;

  cplx coeff(int row, int col) const;
  Operator adjoint() const;

  /// max |A - A^dagger|
  double hermiticity_error() const;
  /// max |A^dagger A - 1|
  double unitarity_error() const;
  double max_abs() const;

  Ket apply(const Ket& v) const;

  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(cplx s, const Operator& a);
  friend Ket operator*(const Operator& a, const Ket& v) { return a.apply(v); }

 private:
  std::variant<DenseMatrix, SparseMatrix> storage_{DenseMatrix{}};
};

/// |alpha><beta| on ion `ion` (1-based) tensored with identity elsewhere.
Operator ion_op(const HilbertSpec& spec, int ion, Level alpha, Level beta);

/// Truncated phonon annihilation operator, a|n> = sqrt(n)|n-1>.
Operator phonon_annihilator(const HilbertSpec& spec);

/// Number operator a^dagger a (diagonal).
Operator phonon_number(const HilbertSpec& spec);

/// exp(-i H t) for Hermitian H, computed from the eigendecomposition of H.
/// Pass a negative `t` for the exp(+i H |t|) variant used by the R pulses.
Operator expm_unitary(const Operator& hamiltonian, double t);

/// Logical qubit values (q1, q2, q3) of logical index i = q1 + 2 q2 + 4 q3.
std::array<int, 3> logical_bits(int index);

/// Full-space label of the plain computational state for logical index i:
/// qubit 1 is (g, e), qubits 2 and 3 are (g, l), phonon vacuum.
BasisLabel computational_label(int index);

/// Phase factor carried by element i of the logical basis (-i for the last two).
cplx logical_phase(int index);

/// Element i of the logical basis B: logical_phase(i) times the computational state.
Ket logical_embed(const HilbertSpec& spec, int index);

/// Plain computational state for logical index i (no phase redefinition).
Ket computational_embed(const HilbertSpec& spec, int index);

/// M_ij = <b_i| rho |b_j>, restricted to the phonon-vacuum logical sector.
LogicalMatrix logical_project(const HilbertSpec& spec, const DensityMatrix& rho);

/// Embed an 8x8 logical operator on the computational states: sum rho_ij |c_i><c_j|.
DensityMatrix embed_computational(const HilbertSpec& spec, const LogicalMatrix& rho);

}  // namespace iontoffoli
