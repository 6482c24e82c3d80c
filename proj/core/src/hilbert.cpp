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

#include "iontoffoli/hilbert.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace iontoffoli {

namespace {

void check_level(Level level) {
  const int v = static_cast<int>(level);
  if (v < 0 || v >= kLevels) throw std::invalid_argument("ion level out of range");
}

void check_logical_index(int index) {
  if (index < 0 || index >= kLogicalDim) throw std::invalid_argument("logical index must be in 0..7");
}

template <typename Visitor>
decltype(auto) visit_storage(const std::variant<DenseMatrix, SparseMatrix>& s, Visitor&& v) {
  return std::visit(std::forward<Visitor>(v), s);
}

}  // namespace

char level_name(Level level) {
  switch (level) {
    case Level::l: return 'l';
    case Level::g: return 'g';
    case Level::e: return 'e';
  }
  return '?';
}

HilbertSpec::HilbertSpec(int phonon_cutoff) : phonon_cutoff_(phonon_cutoff) {
  if (phonon_cutoff < 1) throw std::invalid_argument("phonon cutoff must be >= 1");
}

int HilbertSpec::index(Level s1, Level s2, Level s3, int n) const {
  check_level(s1);
  check_level(s2);
  check_level(s3);
  if (n < 0 || n > phonon_cutoff_) throw std::invalid_argument("phonon number out of range");
  const int ions = (static_cast<int>(s1) * kLevels + static_cast<int>(s2)) * kLevels + static_cast<int>(s3);
  return ions * phonon_levels() + n;
}

int HilbertSpec::index(const BasisLabel& label) const {
  return index(label.ions[0], label.ions[1], label.ions[2], label.phonons);
}

BasisLabel HilbertSpec::label(int index) const {
  if (index < 0 || index >= dimension()) throw std::invalid_argument("basis index out of range");
  BasisLabel out{};
  out.phonons = index % phonon_levels();
  int ions = index / phonon_levels();
  for (int j = kIons - 1; j >= 0; --j) {
    out.ions[j] = static_cast<Level>(ions % kLevels);
    ions /= kLevels;
  }
  return out;
}

std::string HilbertSpec::label_string(int index) const {
  const BasisLabel lab = label(index);
  std::string s = "|";
  for (Level lv : lab.ions) s += level_name(lv);
  s += "," + std::to_string(lab.phonons) + ">";
  return s;
}

HilbertSpec build_space(int phonon_cutoff) { return HilbertSpec(phonon_cutoff); }

// ---------------------------------------------------------------------------
// Operator

Operator Operator::identity(int dimension) {
  SparseMatrix m(dimension, dimension);
  m.setIdentity();
  return Operator(std::move(m));
}

Operator Operator::zero(int dimension) {
  SparseMatrix m(dimension, dimension);
  return Operator(std::move(m));
}

int Operator::dimension() const {
  return visit_storage(storage_, [](const auto& m) { return static_cast<int>(m.rows()); });
}

long Operator::nonzeros() const {
  if (is_sparse()) return std::get<SparseMatrix>(storage_).nonZeros();
  const auto& d = std::get<DenseMatrix>(storage_);
  return (d.array() != cplx(0.0)).count();
}

DenseMatrix Operator::to_dense() const {
  if (is_sparse()) return DenseMatrix(std::get<SparseMatrix>(storage_));
  return std::get<DenseMatrix>(storage_);
}

SparseMatrix Operator::to_sparse() const {
  if (is_sparse()) return std::get<SparseMatrix>(storage_);
  return std::get<DenseMatrix>(storage_).sparseView();
}

cplx Operator::coeff(int row, int col) const {
  if (is_sparse()) return std::get<SparseMatrix>(storage_).coeff(row, col);
  return std::get<DenseMatrix>(storage_)(row, col);
}

Operator Operator::adjoint() const {
  if (is_sparse()) return Operator(SparseMatrix(std::get<SparseMatrix>(storage_).adjoint()));
  return Operator(DenseMatrix(std::get<DenseMatrix>(storage_).adjoint()));
}

double Operator::max_abs() const {
  if (is_sparse()) {
    double m = 0.0;
    const auto& s = std::get<SparseMatrix>(storage_);
    for (int k = 0; k < s.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(s, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
  }
  const auto& d = std::get<DenseMatrix>(storage_);
  return d.size() == 0 ? 0.0 : d.cwiseAbs().maxCoeff();
}

double Operator::hermiticity_error() const { return (*this - adjoint()).max_abs(); }

double Operator::unitarity_error() const {
  const DenseMatrix d = to_dense();
  const DenseMatrix err = d.adjoint() * d - DenseMatrix::Identity(d.rows(), d.cols());
  return err.size() == 0 ? 0.0 : err.cwiseAbs().maxCoeff();
}

Ket Operator::apply(const Ket& v) const {
  if (v.size() != dimension()) throw std::invalid_argument("dimension mismatch in Operator::apply");
  return visit_storage(storage_, [&](const auto& m) -> Ket { return m * v; });
}

Operator operator*(const Operator& a, const Operator& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("dimension mismatch in operator product");
  if (a.is_sparse() && b.is_sparse())
    return Operator(SparseMatrix(std::get<SparseMatrix>(a.storage_) * std::get<SparseMatrix>(b.storage_)));
  if (a.is_sparse()) return Operator(DenseMatrix(std::get<SparseMatrix>(a.storage_) * std::get<DenseMatrix>(b.storage_)));
  if (b.is_sparse()) return Operator(DenseMatrix(std::get<DenseMatrix>(a.storage_) * std::get<SparseMatrix>(b.storage_)));
  return Operator(DenseMatrix(std::get<DenseMatrix>(a.storage_) * std::get<DenseMatrix>(b.storage_)));
}

Operator operator+(const Operator& a, const Operator& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("dimension mismatch in operator sum");
  if (a.is_sparse() && b.is_sparse())
    return Operator(SparseMatrix(std::get<SparseMatrix>(a.storage_) + std::get<SparseMatrix>(b.storage_)));
  return Operator(DenseMatrix(a.to_dense() + b.to_dense()));
}

Operator operator-(const Operator& a, const Operator& b) { return a + cplx(-1.0) * b; }

Operator operator*(cplx s, const Operator& a) {
  if (a.is_sparse()) return Operator(SparseMatrix(s * std::get<SparseMatrix>(a.storage_)));
  return Operator(DenseMatrix(s * std::get<DenseMatrix>(a.storage_)));
}

// ---------------------------------------------------------------------------
// Elementary operators

Operator ion_op(const HilbertSpec& spec, int ion, Level alpha, Level beta) {
  if (ion < 1 || ion > kIons) throw std::invalid_argument("ion index must be 1, 2 or 3");
  check_level(alpha);
  check_level(beta);
  const int d = spec.dimension();
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(static_cast<std::size_t>(d / kLevels));
  for (int col = 0; col < d; ++col) {
    BasisLabel lab = spec.label(col);
    if (lab.ions[ion - 1] != beta) continue;
    lab.ions[ion - 1] = alpha;
    triplets.emplace_back(spec.index(lab), col, 1.0);
  }
  SparseMatrix m(d, d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return Operator(std::move(m));
}

Operator phonon_annihilator(const HilbertSpec& spec) {
  const int d = spec.dimension();
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (int col = 0; col < d; ++col) {
    const int n = col % spec.phonon_levels();
    if (n == 0) continue;
    triplets.emplace_back(col - 1, col, std::sqrt(static_cast<double>(n)));
  }
  SparseMatrix m(d, d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return Operator(std::move(m));
}

Operator phonon_number(const HilbertSpec& spec) {
  const int d = spec.dimension();
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (int i = 0; i < d; ++i) {
    const int n = i % spec.phonon_levels();
    if (n != 0) triplets.emplace_back(i, i, static_cast<double>(n));
  }
  SparseMatrix m(d, d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return Operator(std::move(m));
}

Operator expm_unitary(const Operator& hamiltonian, double t) {
  const double scale = std::max(1.0, hamiltonian.max_abs());
  if (hamiltonian.hermiticity_error() > 1e-12 * scale)
    throw std::invalid_argument("expm_unitary: Hamiltonian is not Hermitian");
  const int d = hamiltonian.dimension();
  if (t == 0.0) return Operator(DenseMatrix(DenseMatrix::Identity(d, d)));

  DenseMatrix h = hamiltonian.to_dense();
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(h);
  if (eig.info() != Eigen::Success) throw std::runtime_error("expm_unitary: eigensolver failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  Eigen::VectorXcd phases(d);
  for (int k = 0; k < d; ++k) phases(k) = std::polar(1.0, -lambda(k) * t);
  const DenseMatrix& v = eig.eigenvectors();
  return Operator(DenseMatrix(v * phases.asDiagonal() * v.adjoint()));
}

// ---------------------------------------------------------------------------
// Logical basis

std::array<int, 3> logical_bits(int index) {
  check_logical_index(index);
  return {index & 1, (index >> 1) & 1, (index >> 2) & 1};
}

BasisLabel computational_label(int index) {
  const auto q = logical_bits(index);
  BasisLabel lab{};
  lab.ions[0] = q[0] ? Level::e : Level::g;
  lab.ions[1] = q[1] ? Level::l : Level::g;
  lab.ions[2] = q[2] ? Level::l : Level::g;
  lab.phonons = 0;
  return lab;
}

cplx logical_phase(int index) {
  check_logical_index(index);
  return index >= 6 ? cplx(0.0, -1.0) : cplx(1.0, 0.0);
}

Ket computational_embed(const HilbertSpec& spec, int index) {
  Ket v = Ket::Zero(spec.dimension());
  v(spec.index(computational_label(index))) = 1.0;
  return v;
}

Ket logical_embed(const HilbertSpec& spec, int index) {
  Ket v = Ket::Zero(spec.dimension());
  v(spec.index(computational_label(index))) = logical_phase(index);
  return v;
}

LogicalMatrix logical_project(const HilbertSpec& spec, const DensityMatrix& rho) {
  if (rho.rows() != spec.dimension() || rho.cols() != spec.dimension())
    throw std::invalid_argument("logical_project: density matrix has wrong dimension");
  LogicalMatrix out;
  for (int i = 0; i < kLogicalDim; ++i) {
    const int ri = spec.index(computational_label(i));
    for (int j = 0; j < kLogicalDim; ++j) {
      const int cj = spec.index(computational_label(j));
      out(i, j) = std::conj(logical_phase(i)) * rho(ri, cj) * logical_phase(j);
    }
  }
  return out;
}

DensityMatrix embed_computational(const HilbertSpec& spec, const LogicalMatrix& rho) {
  DensityMatrix out = DensityMatrix::Zero(spec.dimension(), spec.dimension());
  for (int i = 0; i < kLogicalDim; ++i)
    for (int j = 0; j < kLogicalDim; ++j)
      out(spec.index(computational_label(i)), spec.index(computational_label(j))) = rho(i, j);
  return out;
}

}  // namespace iontoffoli
