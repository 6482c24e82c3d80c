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
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iontoffoli/hilbert.hpp"

namespace iontoffoli {

inline constexpr int kChiDim = 64;

/// The 64 three-qubit operators K_m built from {I, X, Y = -i sigma_y, Z}.
///
/// Index m = 16 a1 + 4 a2 + a3 with a_k the Pauli letter of qubit k; the label
/// string reads qubit 1 first ("XZI" is X on qubit 1).
class OperatorBasis {
 public:
  OperatorBasis();

  static const OperatorBasis& instance();

  const LogicalMatrix& op(int m) const { return ops_.at(m); }
  const std::string& label(int m) const { return labels_.at(m); }
  const std::vector<std::string>& labels() const { return labels_; }
  int index_of(const std::string& label) const;

  /// c_m = Tr[K_m^dagger M] / 8 for every m.
  Eigen::Matrix<cplx, kChiDim, 1> coefficients(const LogicalMatrix& m) const;

 private:
  std::array<LogicalMatrix, kChiDim> ops_;
  std::vector<std::string> labels_;
};

struct ProcessMatrix {
  Eigen::MatrixXcd chi = Eigen::MatrixXcd::Zero(kChiDim, kChiDim);

  cplx trace() const { return chi.trace(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
};

class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using LinearMap = std::function<LogicalMatrix(const LogicalMatrix&)>;

/// chi_mn = sum_k c^k_m conj(c^k_n) for Kraus operators A_k.
ProcessMatrix chi_of_kraus(const std::vector<LogicalMatrix>& kraus);

/// Rank-one chi of a unitary. Throws std::invalid_argument if U is not
/// unitary within 1e-8.
ProcessMatrix chi_of_unitary(const LogicalMatrix& u);

/// The 64 inputs probed by chi_of_map: the 8 projectors |i><i| followed by
/// (|i>+|j>)(<i|+<j|)/2 and (|i>+i|j>)(<i|-i<j|)/2 for each pair i < j.
std::vector<LogicalMatrix> tomography_inputs();

/// Images of the matrix units E_ij recovered by linearity from the outputs of
/// the inputs in tomography_inputs(), stored at [8 i + j].
std::array<LogicalMatrix, kChiDim> unit_responses_from_probes(const std::vector<LogicalMatrix>& outputs);

/// chi from the images of all matrix units, indexed [8 i + j].
ProcessMatrix chi_from_unit_responses(const std::array<LogicalMatrix, kChiDim>& units);

/// Linear-inversion tomography of a black-box map. Probes run on `threads`
/// workers. A seeded random density matrix is then checked against the
/// reconstruction; a residual above 1e-6 throws InconsistencyError.
ProcessMatrix chi_of_map(const LinearMap& map, int threads = 1, std::uint64_t check_seed = 7);

/// Residual max |sum chi_mn K_m rho K_n^dagger - map(rho)| on a seeded random input.
double reconstruction_residual(const ProcessMatrix& chi, const LinearMap& map, std::uint64_t seed);

/// sum chi_mn K_m rho K_n^dagger
LogicalMatrix apply_chi(const ProcessMatrix& chi, const LogicalMatrix& rho);

/// Re Tr[chi_T chi]. Throws std::runtime_error if the imaginary residue exceeds 1e-10.
double gate_fidelity(const ProcessMatrix& target, const ProcessMatrix& chi);

/// (d F_g + 1) / (d + 1)
double avg_state_fidelity(double gate_fidelity, int d = kLogicalDim);

struct RowDiscrepancy {
  std::array<double, kChiDim> rows{};
  double max = 0.0;
};

RowDiscrepancy discrepancy_rows(const ProcessMatrix& chi, const ProcessMatrix& target);

/// Max entrywise |a - b|.
double max_entry_difference(const ProcessMatrix& a, const ProcessMatrix& b);

inline constexpr const char* kChiSchema = "iontoffoli.chi/1";

/// {"schema", "labels", "re", "im"} with row-major matrices.
std::string chi_to_json(const ProcessMatrix& chi);
ProcessMatrix chi_from_json(const std::string& text);

/// Header line then one line per entry: row_label,col_label,re,im,modulus.
std::string chi_to_csv(const ProcessMatrix& chi);

}  // namespace iontoffoli
