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

#include "iontoffoli/qpt.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "iontoffoli/parallel.hpp"
#include "json.hpp"

namespace iontoffoli {

namespace {

using Mat2 = Eigen::Matrix2cd;

std::array<Mat2, 4> single_qubit_basis() {
  Mat2 i = Mat2::Identity();
  Mat2 x, y, z;
  x << 0.0, 1.0, 1.0, 0.0;
  y << 0.0, -1.0, 1.0, 0.0;  // -i sigma_y
  z << 1.0, 0.0, 0.0, -1.0;
  return {i, x, y, z};
}

constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};

}  // namespace

OperatorBasis::OperatorBasis() {
  const auto p = single_qubit_basis();
  labels_.reserve(kChiDim);
  for (int a1 = 0; a1 < 4; ++a1)
    for (int a2 = 0; a2 < 4; ++a2)
      for (int a3 = 0; a3 < 4; ++a3) {
        const int m = 16 * a1 + 4 * a2 + a3;
        // Qubit 1 is the least significant bit of the logical index, so it
        // is the rightmost Kronecker factor.
        LogicalMatrix k;
        for (int r = 0; r < kLogicalDim; ++r)
          for (int c = 0; c < kLogicalDim; ++c)
            k(r, c) = p[a3]((r >> 2) & 1, (c >> 2) & 1) * p[a2]((r >> 1) & 1, (c >> 1) & 1) *
                      p[a1](r & 1, c & 1);
        ops_[m] = k;
        labels_.push_back(std::string{kLetters[a1], kLetters[a2], kLetters[a3]});
      }
}

const OperatorBasis& OperatorBasis::instance() {
  static const OperatorBasis basis;
  return basis;
}

int OperatorBasis::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw std::invalid_argument("unknown basis label: " + label);
  return static_cast<int>(it - labels_.begin());
}

Eigen::Matrix<cplx, kChiDim, 1> OperatorBasis::coefficients(const LogicalMatrix& m) const {
  Eigen::Matrix<cplx, kChiDim, 1> c;
  for (int k = 0; k < kChiDim; ++k) c(k) = (ops_[k].adjoint() * m).trace() / 8.0;
  return c;
}

double ProcessMatrix::hermiticity_error() const { return (chi - chi.adjoint()).cwiseAbs().maxCoeff(); }

double ProcessMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd h = 0.5 * (chi + chi.adjoint());
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

ProcessMatrix chi_of_kraus(const std::vector<LogicalMatrix>& kraus) {
  const auto& basis = OperatorBasis::instance();
  ProcessMatrix out;
  for (const auto& a : kraus) {
    const auto c = basis.coefficients(a);
    out.chi += c * c.adjoint();
  }
  return out;
}

ProcessMatrix chi_of_unitary(const LogicalMatrix& u) {
  const double err = (u.adjoint() * u - LogicalMatrix::Identity()).cwiseAbs().maxCoeff();
  if (!(err <= 1e-8)) throw std::invalid_argument("chi_of_unitary: input is not unitary");
  return chi_of_kraus({u});
}

std::vector<LogicalMatrix> tomography_inputs() {
  std::vector<LogicalMatrix> in;
  in.reserve(kChiDim);
  for (int i = 0; i < kLogicalDim; ++i) {
    LogicalMatrix p = LogicalMatrix::Zero();
    p(i, i) = 1.0;
    in.push_back(p);
  }
  for (int i = 0; i < kLogicalDim; ++i)
    for (int j = i + 1; j < kLogicalDim; ++j) {
      LogicalMatrix plus = LogicalMatrix::Zero();
      plus(i, i) = plus(j, j) = plus(i, j) = plus(j, i) = 0.5;
      LogicalMatrix yplus = LogicalMatrix::Zero();
      yplus(i, i) = yplus(j, j) = 0.5;
      yplus(i, j) = -0.5 * kI;
      yplus(j, i) = 0.5 * kI;
      in.push_back(plus);
      in.push_back(yplus);
    }
  return in;
}

std::array<LogicalMatrix, kChiDim> unit_responses_from_probes(const std::vector<LogicalMatrix>& outputs) {
  if (outputs.size() != static_cast<std::size_t>(kChiDim))
    throw std::invalid_argument("unit_responses_from_probes: expected 64 probe outputs");
  std::array<LogicalMatrix, kChiDim> units;
  for (int i = 0; i < kLogicalDim; ++i) units[9 * i] = outputs[i];
  int k = kLogicalDim;
  for (int i = 0; i < kLogicalDim; ++i)
    for (int j = i + 1; j < kLogicalDim; ++j, k += 2) {
      // 2 P+ - Eii - Ejj = Eij + Eji and 2 Py - Eii - Ejj = -i Eij + i Eji.
      const LogicalMatrix sym = 2.0 * outputs[k] - units[9 * i] - units[9 * j];
      const LogicalMatrix anti = 2.0 * outputs[k + 1] - units[9 * i] - units[9 * j];
      units[8 * i + j] = 0.5 * (sym + kI * anti);
      units[8 * j + i] = 0.5 * (sym - kI * anti);
    }
  return units;
}

ProcessMatrix chi_from_unit_responses(const std::array<LogicalMatrix, kChiDim>& units) {
  const auto& basis = OperatorBasis::instance();
  // Choi matrix J[(a,i),(b,j)] = map(E_ij)_ab and basis vectors v_m[(a,i)] = (K_m)_ai.
  Eigen::MatrixXcd choi(kChiDim, kChiDim);
  Eigen::MatrixXcd vecs(kChiDim, kChiDim);
  for (int i = 0; i < kLogicalDim; ++i)
    for (int j = 0; j < kLogicalDim; ++j)
      for (int a = 0; a < kLogicalDim; ++a)
        for (int b = 0; b < kLogicalDim; ++b) choi(8 * a + i, 8 * b + j) = units[8 * i + j](a, b);
  for (int m = 0; m < kChiDim; ++m)
    for (int a = 0; a < kLogicalDim; ++a)
      for (int i = 0; i < kLogicalDim; ++i) vecs(8 * a + i, m) = basis.op(m)(a, i);
  // The v_m are orthogonal with squared norm 8.
  ProcessMatrix out;
  out.chi = vecs.adjoint() * choi * vecs / 64.0;
  out.chi = 0.5 * (out.chi + out.chi.adjoint()).eval();
  return out;
}

LogicalMatrix apply_chi(const ProcessMatrix& chi, const LogicalMatrix& rho) {
  const auto& basis = OperatorBasis::instance();
  std::array<LogicalMatrix, kChiDim> left;
  for (int m = 0; m < kChiDim; ++m) left[m] = basis.op(m) * rho;
  LogicalMatrix out = LogicalMatrix::Zero();
  for (int n = 0; n < kChiDim; ++n) {
    LogicalMatrix acc = LogicalMatrix::Zero();
    for (int m = 0; m < kChiDim; ++m)
      if (chi.chi(m, n) != cplx(0.0)) acc += chi.chi(m, n) * left[m];
    out += acc * basis.op(n).adjoint();
  }
  return out;
}

double reconstruction_residual(const ProcessMatrix& chi, const LinearMap& map, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  LogicalMatrix g;
  for (int r = 0; r < kLogicalDim; ++r)
    for (int c = 0; c < kLogicalDim; ++c) g(r, c) = cplx(normal(rng), normal(rng));
  LogicalMatrix rho = g * g.adjoint();
  rho /= rho.trace();
  return (apply_chi(chi, rho) - map(rho)).cwiseAbs().maxCoeff();
}

ProcessMatrix chi_of_map(const LinearMap& map, int threads, std::uint64_t check_seed) {
  const auto inputs = tomography_inputs();
  std::vector<LogicalMatrix> outputs(inputs.size());
  parallel_for(static_cast<int>(inputs.size()), threads, [&](int k) { outputs[k] = map(inputs[k]); });
  ProcessMatrix chi = chi_from_unit_responses(unit_responses_from_probes(outputs));
  const double residual = reconstruction_residual(chi, map, check_seed);
  if (!(residual <= 1e-6)) {
    std::ostringstream msg;
    msg << "chi_of_map: reconstruction residual " << residual << " on held-out input exceeds 1e-6";
    throw InconsistencyError(msg.str());
  }
  return chi;
}

double gate_fidelity(const ProcessMatrix& target, const ProcessMatrix& chi) {
  const cplx f = (target.chi * chi.chi).trace();
  if (std::abs(f.imag()) > 1e-10) throw std::runtime_error("gate_fidelity: non-negligible imaginary part");
  return f.real();
}

double avg_state_fidelity(double gate_fidelity, int d) { return (d * gate_fidelity + 1.0) / (d + 1.0); }

RowDiscrepancy discrepancy_rows(const ProcessMatrix& chi, const ProcessMatrix& target) {
  RowDiscrepancy out;
  const Eigen::MatrixXd diff = (chi.chi - target.chi).cwiseAbs();
  for (int r = 0; r < kChiDim; ++r) {
    out.rows[r] = diff.row(r).maxCoeff();
    out.max = std::max(out.max, out.rows[r]);
  }
  return out;
}

double max_entry_difference(const ProcessMatrix& a, const ProcessMatrix& b) {
  return (a.chi - b.chi).cwiseAbs().maxCoeff();
}

std::string chi_to_json(const ProcessMatrix& chi) {
  nlohmann::ordered_json j;
  j["schema"] = kChiSchema;
  j["labels"] = OperatorBasis::instance().labels();
  std::vector<std::vector<double>> re(kChiDim, std::vector<double>(kChiDim));
  std::vector<std::vector<double>> im(kChiDim, std::vector<double>(kChiDim));
  for (int r = 0; r < kChiDim; ++r)
    for (int c = 0; c < kChiDim; ++c) {
      re[r][c] = chi.chi(r, c).real();
      im[r][c] = chi.chi(r, c).imag();
    }
  j["re"] = re;
  j["im"] = im;
  return j.dump(1);
}

ProcessMatrix chi_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("chi_from_json: ") + e.what());
  }
  if (j.value("schema", "") != kChiSchema) throw std::invalid_argument("chi_from_json: unexpected schema");
  if (j.at("labels").get<std::vector<std::string>>() != OperatorBasis::instance().labels())
    throw std::invalid_argument("chi_from_json: basis labels do not match");
  const auto re = j.at("re").get<std::vector<std::vector<double>>>();
  const auto im = j.at("im").get<std::vector<std::vector<double>>>();
  if (re.size() != kChiDim || im.size() != kChiDim) throw std::invalid_argument("chi_from_json: bad shape");
  ProcessMatrix out;
  for (int r = 0; r < kChiDim; ++r) {
    if (re[r].size() != kChiDim || im[r].size() != kChiDim) throw std::invalid_argument("chi_from_json: bad shape");
    for (int c = 0; c < kChiDim; ++c) out.chi(r, c) = cplx(re[r][c], im[r][c]);
  }
  return out;
}

std::string chi_to_csv(const ProcessMatrix& chi) {
  const auto& labels = OperatorBasis::instance().labels();
  std::ostringstream os;
  os << "# schema=" << kChiSchema << "\n";
  os << "row_label,col_label,re,im,modulus\n";
  os << std::setprecision(17);
  for (int r = 0; r < kChiDim; ++r)
    for (int c = 0; c < kChiDim; ++c) {
      const cplx v = chi.chi(r, c);
      os << labels[r] << ',' << labels[c] << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v) << '\n';
    }
  return os.str();
}

}  // namespace iontoffoli
