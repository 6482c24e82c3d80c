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

#include "iontoffoli/open_system.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "iontoffoli/parallel.hpp"

namespace iontoffoli {

namespace {

// Blocks never exceed 8 x 8: at most three ions outside l, each g or e.
using Block = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 8, 8>;
using RealBlock = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 8, 8>;
using Gather = Eigen::Matrix<cplx, Eigen::Dynamic, kLogicalDim, Eigen::ColMajor, 8, kLogicalDim>;

constexpr double kSupportThreshold = 1e-14;
constexpr int kTailInterval = 25;

int pattern_of(const BasisLabel& label) {
  int p = 0;
  for (int j = 0; j < kIons; ++j)
    if (label.ions[j] == Level::l) p |= 1 << j;
  return p;
}

int excitation_of(const BasisLabel& label) {
  int n = label.phonons;
  for (Level s : label.ions)
    if (s == Level::e) ++n;
  return n;
}

int max_step_count(double t, double norm, double max_step_norm) {
  const double raw = std::ceil(t * norm / max_step_norm);
  if (!(raw < 1e9)) throw std::invalid_argument("evolve: step count is not finite");
  return std::max(1, static_cast<int>(raw));
}

double row_sum_norm(const Operator& h) {
  const SparseMatrix s = h.to_sparse();
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(s.rows());
  for (int k = 0; k < s.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) rows(it.row()) += std::abs(it.value());
  return rows.size() ? rows.maxCoeff() : 0.0;
}

/// Block structure of the composite space. A sector is a fixed l-pattern p
/// (bit j set when ion j+1 sits in l) and a fixed excitation number N.
class SectorLayout {
 public:
  explicit SectorLayout(const HilbertSpec& spec)
      : cutoff_(spec.phonon_cutoff()), levels_(spec.phonon_cutoff() + kIons + 1), members_(8 * levels_),
        phonons_(8 * levels_), sector_(spec.dimension()), position_(spec.dimension()) {
    for (int i = 0; i < spec.dimension(); ++i) {
      const BasisLabel lab = spec.label(i);
      const int s = id(pattern_of(lab), excitation_of(lab));
      sector_[i] = s;
      position_[i] = static_cast<int>(members_[s].size());
      members_[s].push_back(i);
      phonons_[s].push_back(lab.phonons);
    }
  }

  int cutoff() const { return cutoff_; }
  int levels() const { return levels_; }
  int id(int pattern, int n) const { return pattern * levels_ + n; }
  int top(int pattern) const { return cutoff_ + kIons - std::popcount(static_cast<unsigned>(pattern)); }
  int dim(int pattern, int n) const {
    return n < 0 || n >= levels_ ? 0 : static_cast<int>(members_[id(pattern, n)].size());
  }
  const std::vector<int>& members(int s) const { return members_[s]; }
  const std::vector<int>& phonons(int s) const { return phonons_[s]; }
  int sector_of(int full) const { return sector_[full]; }
  int position_of(int full) const { return position_[full]; }

 private:
  int cutoff_;
  int levels_;
  std::vector<std::vector<int>> members_;
  std::vector<std::vector<int>> phonons_;
  std::vector<int> sector_;
  std::vector<int> position_;
};

/// rho restricted to the blocks (pl, NL; pr, NL - k) for consecutive NL.
struct Chain {
  int pl = 0;
  int pr = 0;
  int k = 0;
  int first = 0;  ///< NL of blocks[0]
  std::vector<Block> blocks;
};

/// RK4 propagation of block chains. The Lindblad generator maps the chain
/// (pl, pr, k) into itself, coupling neighbouring blocks through heating.
class SectorPropagator {
 public:
  SectorPropagator(const HilbertSpec& spec, const Operator& h, const NoiseParams& params)
      : spec_(spec), layout_(spec), params_(params) {
    const int ns = 8 * layout_.levels();
    h_.resize(ns);
    lower_.resize(ns);
    for (int s = 0; s < ns; ++s) {
      const int d = static_cast<int>(layout_.members(s).size());
      h_[s] = Block::Zero(d, d);
    }
    const SparseMatrix hs = h.to_sparse();
    for (int c = 0; c < hs.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(hs, c); it; ++it) {
        const int r = static_cast<int>(it.row()), col = static_cast<int>(it.col());
        const int s = layout_.sector_of(r);
        if (s != layout_.sector_of(col)) throw std::invalid_argument("Hamiltonian couples different sectors");
        h_[s](layout_.position_of(r), layout_.position_of(col)) = it.value();
      }
    // lower_[id(p, N)] maps sector (p, N) to (p, N - 1).
    for (int p = 0; p < 8; ++p)
      for (int n = 1; n < layout_.levels(); ++n) {
        const int s = layout_.id(p, n), t = layout_.id(p, n - 1);
        Block a = Block::Zero(layout_.dim(p, n - 1), layout_.dim(p, n));
        const auto& mem = layout_.members(s);
        for (std::size_t c = 0; c < mem.size(); ++c) {
          BasisLabel lab = spec.label(mem[c]);
          if (lab.phonons == 0) continue;
          const double amp = std::sqrt(static_cast<double>(lab.phonons));
          --lab.phonons;
          const int target = spec.index(lab);
          if (layout_.sector_of(target) != t) throw std::logic_error("sector layout mismatch");
          a(layout_.position_of(target), static_cast<int>(c)) = amp;
        }
        lower_[s] = a;
      }
  }

  const SectorLayout& layout() const { return layout_; }

  /// Valid NL range of the chain (pl, pr, k); empty when lo > hi.
  std::pair<int, int> range(int pl, int pr, int k) const {
    return {std::max(0, k), std::min(layout_.top(pl), layout_.top(pr) + k)};
  }

  Chain empty_chain(int pl, int pr, int k) const {
    Chain c{pl, pr, k, 0, {}};
    const auto [lo, hi] = range(pl, pr, k);
    c.first = lo;
    for (int nl = lo; nl <= hi; ++nl) c.blocks.push_back(Block::Zero(layout_.dim(pl, nl), layout_.dim(pr, nl - k)));
    return c;
  }

  /// Chains of |l><r|, dropping sectors whose weight is below the threshold.
  std::vector<Chain> decompose_outer(const Ket& l, const Ket& r) const {
    const double scale = l.cwiseAbs().maxCoeff() * r.cwiseAbs().maxCoeff();
    std::vector<Chain> out;
    if (scale == 0.0) return out;
    const auto support = [&](const Ket& v) {
      std::vector<int> sectors;
      const double vmax = v.cwiseAbs().maxCoeff();
      for (int i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > kSupportThreshold * vmax) sectors.push_back(layout_.sector_of(i));
      std::sort(sectors.begin(), sectors.end());
      sectors.erase(std::unique(sectors.begin(), sectors.end()), sectors.end());
      return sectors;
    };
    const auto sl = support(l), sr = support(r);
    for (int a : sl)
      for (int b : sr) {
        const int pl = a / layout_.levels(), nl = a % layout_.levels();
        const int pr = b / layout_.levels(), nr = b % layout_.levels();
        Chain* chain = find_or_add(out, pl, pr, nl - nr);
        Block& blk = chain->blocks[nl - chain->first];
        const auto& ml = layout_.members(a);
        const auto& mr = layout_.members(b);
        for (std::size_t i = 0; i < ml.size(); ++i)
          for (std::size_t j = 0; j < mr.size(); ++j) blk(i, j) += l(ml[i]) * std::conj(r(mr[j]));
      }
    return out;
  }

  /// Chains of a full matrix. With `hermitian`, only chains with pl < pr or
  /// (pl == pr, k >= 0) are kept; the rest follow by adjoint.
  std::vector<Chain> decompose(const DensityMatrix& rho, bool hermitian) const {
    const double scale = rho.cwiseAbs().maxCoeff();
    std::vector<Chain> out;
    if (scale == 0.0) return out;
    const int kmax = layout_.levels() - 1;
    for (int pl = 0; pl < 8; ++pl)
      for (int pr = hermitian ? pl : 0; pr < 8; ++pr)
        for (int k = (hermitian && pl == pr) ? 0 : -kmax; k <= kmax; ++k) {
          Chain c = empty_chain(pl, pr, k);
          double weight = 0.0;
          for (std::size_t e = 0; e < c.blocks.size(); ++e) {
            const int nl = c.first + static_cast<int>(e);
            const auto& ml = layout_.members(layout_.id(pl, nl));
            const auto& mr = layout_.members(layout_.id(pr, nl - k));
            for (std::size_t i = 0; i < ml.size(); ++i)
              for (std::size_t j = 0; j < mr.size(); ++j) {
                c.blocks[e](i, j) = rho(ml[i], mr[j]);
                weight = std::max(weight, std::abs(rho(ml[i], mr[j])));
              }
          }
          if (weight > kSupportThreshold * scale) out.push_back(std::move(c));
        }
    return out;
  }

  void accumulate(const Chain& c, DensityMatrix& rho, bool with_adjoint) const {
    for (std::size_t e = 0; e < c.blocks.size(); ++e) {
      const int nl = c.first + static_cast<int>(e);
      const auto& ml = layout_.members(layout_.id(c.pl, nl));
      const auto& mr = layout_.members(layout_.id(c.pr, nl - c.k));
      const bool mirror = with_adjoint && !(c.pl == c.pr && c.k == 0);
      for (std::size_t i = 0; i < ml.size(); ++i)
        for (std::size_t j = 0; j < mr.size(); ++j) {
          rho(ml[i], mr[j]) = c.blocks[e](i, j);
          if (mirror) rho(mr[j], ml[i]) = std::conj(c.blocks[e](i, j));
        }
    }
  }

  cplx trace(const Chain& c) const {
    cplx t = 0.0;
    if (c.pl != c.pr || c.k != 0) return t;
    for (const auto& b : c.blocks) t += b.trace();
    return t;
  }

  double tail(const Chain& c) const {
    double t = 0.0;
    if (c.pl != c.pr || c.k != 0) return t;
    for (std::size_t e = 0; e < c.blocks.size(); ++e) {
      const auto& ph = layout_.phonons(layout_.id(c.pl, c.first + static_cast<int>(e)));
      for (std::size_t i = 0; i < ph.size(); ++i)
        if (ph[i] == layout_.cutoff()) t += std::abs(c.blocks[e](i, i));
    }
    return t;
  }

  /// <w_a| rho |w_b> summed over the blocks of the chain.
  void sandwich(const Chain& c, const std::array<Ket, kLogicalDim>& w, LogicalMatrix& out) const {
    for (std::size_t e = 0; e < c.blocks.size(); ++e) {
      const int nl = c.first + static_cast<int>(e);
      const auto& ml = layout_.members(layout_.id(c.pl, nl));
      const auto& mr = layout_.members(layout_.id(c.pr, nl - c.k));
      Gather gl(ml.size(), kLogicalDim), gr(mr.size(), kLogicalDim);
      for (int a = 0; a < kLogicalDim; ++a) {
        for (std::size_t i = 0; i < ml.size(); ++i) gl(i, a) = w[a](ml[i]);
        for (std::size_t j = 0; j < mr.size(); ++j) gr(j, a) = w[a](mr[j]);
      }
      out.noalias() += gl.adjoint() * c.blocks[e] * gr;
    }
  }

  struct Stats {
    double tail_max = 0.0;
    double hermiticity = 0.0;
  };

  /// RK4 over `steps` steps of size dt. A self-adjoint chain (pl == pr,
  /// k == 0) is re-Hermitized after every step when `hermitian` is set.
  Stats evolve(Chain& c, int steps, double dt, bool hermitian) const {
    const Ops ops = build_ops(c);
    const std::size_t len = c.blocks.size();
    std::vector<Block> k1(len), k2(len), k3(len), k4(len), tmp(len);
    const bool self_adjoint = hermitian && c.pl == c.pr && c.k == 0;
    Stats stats;
    stats.tail_max = tail(c);
    for (int step = 0; step < steps; ++step) {
      rhs(ops, c.blocks, k1);
      for (std::size_t e = 0; e < len; ++e) tmp[e] = c.blocks[e] + (0.5 * dt) * k1[e];
      rhs(ops, tmp, k2);
      for (std::size_t e = 0; e < len; ++e) tmp[e] = c.blocks[e] + (0.5 * dt) * k2[e];
      rhs(ops, tmp, k3);
      for (std::size_t e = 0; e < len; ++e) tmp[e] = c.blocks[e] + dt * k3[e];
      rhs(ops, tmp, k4);
      for (std::size_t e = 0; e < len; ++e) c.blocks[e] += (dt / 6.0) * (k1[e] + 2.0 * k2[e] + 2.0 * k3[e] + k4[e]);
      if (self_adjoint) {
        double herm = 0.0;
        for (auto& b : c.blocks) {
          herm = std::max(herm, (b - b.adjoint()).cwiseAbs().maxCoeff());
          b = (0.5 * (b + b.adjoint())).eval();
        }
        stats.hermiticity = herm;
      }
      if ((step + 1) % kTailInterval == 0 || step + 1 == steps) stats.tail_max = std::max(stats.tail_max, tail(c));
    }
    return stats;
  }

 private:
  struct Ops {
    std::vector<const Block*> hl, hr;
    std::vector<const Block*> al_down, ar_down;  ///< lowering out of (NL, NR) into (NL-1, NR-1)
    std::vector<RealBlock> diag;
  };

  Chain* find_or_add(std::vector<Chain>& chains, int pl, int pr, int k) const {
    for (auto& c : chains)
      if (c.pl == pl && c.pr == pr && c.k == k) return &c;
    chains.push_back(empty_chain(pl, pr, k));
    return &chains.back();
  }

  Ops build_ops(const Chain& c) const {
    Ops ops;
    const double down = params_.kappa * (params_.nbar + 1.0);
    const double up = params_.kappa * params_.nbar;
    const int cutoff = layout_.cutoff();
    for (std::size_t e = 0; e < c.blocks.size(); ++e) {
      const int nl = c.first + static_cast<int>(e), nr = nl - c.k;
      const int sl = layout_.id(c.pl, nl), sr = layout_.id(c.pr, nr);
      ops.hl.push_back(&h_[sl]);
      ops.hr.push_back(&h_[sr]);
      ops.al_down.push_back(nl > 0 ? &lower_[sl] : nullptr);
      ops.ar_down.push_back(nr > 0 ? &lower_[sr] : nullptr);
      const auto& phl = layout_.phonons(sl);
      const auto& phr = layout_.phonons(sr);
      RealBlock d(phl.size(), phr.size());
      for (std::size_t i = 0; i < phl.size(); ++i)
        for (std::size_t j = 0; j < phr.size(); ++j) {
          const double nli = phl[i], nrj = phr[j];
          const double mli = phl[i] < cutoff ? nli + 1.0 : 0.0;
          const double mrj = phr[j] < cutoff ? nrj + 1.0 : 0.0;
          d(i, j) = -0.5 * down * (nli + nrj) - 0.5 * up * (mli + mrj) - params_.gamma * (nli - nrj) * (nli - nrj);
        }
      ops.diag.push_back(std::move(d));
    }
    return ops;
  }

  void rhs(const Ops& ops, const std::vector<Block>& x, std::vector<Block>& out) const {
    const double down = params_.kappa * (params_.nbar + 1.0);
    const double up = params_.kappa * params_.nbar;
    const std::size_t len = x.size();
    for (std::size_t e = 0; e < len; ++e) {
      Block& o = out[e];
      o.noalias() = (*ops.hl[e]) * x[e];
      o.noalias() -= x[e] * (*ops.hr[e]);
      o *= -kI;
      o += ops.diag[e].cwiseProduct(x[e]);
      // a rho a^dag feeds (NL, NR) from (NL+1, NR+1).
      if (down != 0.0 && e + 1 < len) o.noalias() += down * ((*ops.al_down[e + 1]) * x[e + 1] * ops.ar_down[e + 1]->adjoint());
      // a^dag rho a feeds (NL, NR) from (NL-1, NR-1).
      if (up != 0.0 && e > 0) o.noalias() += up * (ops.al_down[e]->adjoint() * x[e - 1] * (*ops.ar_down[e]));
    }
  }

  HilbertSpec spec_;
  SectorLayout layout_;
  NoiseParams params_;
  std::vector<Block> h_;
  std::vector<Block> lower_;
};

struct FullOps {
  SparseMatrix h, a, ad;
  Eigen::VectorXd n, m;
};

FullOps full_ops(const HilbertSpec& spec, const Operator& h) {
  FullOps ops;
  ops.h = h.to_sparse();
  ops.a = phonon_annihilator(spec).to_sparse();
  ops.ad = SparseMatrix(ops.a.adjoint());
  const int d = spec.dimension();
  ops.n.resize(d);
  ops.m.resize(d);
  for (int i = 0; i < d; ++i) {
    const int ph = spec.label(i).phonons;
    ops.n(i) = ph;
    ops.m(i) = ph < spec.phonon_cutoff() ? ph + 1.0 : 0.0;
  }
  return ops;
}

DensityMatrix full_rhs(const FullOps& ops, const DensityMatrix& rho, const NoiseParams& p) {
  const double down = p.kappa * (p.nbar + 1.0);
  const double up = p.kappa * p.nbar;
  DensityMatrix out = -kI * (ops.h * rho - rho * ops.h);
  const auto d = rho.rows();
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) {
      const double dn = ops.n(i) - ops.n(j);
      out(i, j) += (-0.5 * down * (ops.n(i) + ops.n(j)) - 0.5 * up * (ops.m(i) + ops.m(j)) - p.gamma * dn * dn) *
                   rho(i, j);
    }
  if (down != 0.0) out += down * (ops.a * (rho * ops.ad));
  if (up != 0.0) out += up * (ops.ad * (rho * ops.a));
  return out;
}

bool is_hermitian(const DensityMatrix& rho) {
  const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

double tail_of(const HilbertSpec& spec, const DensityMatrix& rho) {
  double t = 0.0;
  for (int i = 0; i < spec.dimension(); ++i)
    if (spec.label(i).phonons == spec.phonon_cutoff()) t += std::abs(rho(i, i));
  return t;
}

double min_eigenvalue_of(const DensityMatrix& rho) {
  const DensityMatrix h = 0.5 * (rho + rho.adjoint());
  return Eigen::SelfAdjointEigenSolver<DensityMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

void validate_report(const EvolutionReport& r, const IntegratorConfig& cfg, bool hermitian) {
  std::ostringstream msg;
  if (!std::isfinite(r.trace_drift)) msg << "non-finite state; reduce max_step_norm";
  else if (r.trace_drift > cfg.trace_tolerance)
    msg << "trace drift " << r.trace_drift << " exceeds " << cfg.trace_tolerance << "; reduce max_step_norm";
  else if (hermitian && std::isfinite(r.min_eigenvalue) && r.min_eigenvalue < -cfg.min_eigenvalue_tolerance)
    msg << "minimum eigenvalue " << r.min_eigenvalue << " below " << -cfg.min_eigenvalue_tolerance
        << "; reduce max_step_norm or raise the phonon cutoff";
  else if (hermitian && cfg.check_tail && r.tail_population > cfg.tail_tolerance)
    msg << "top Fock state population " << r.tail_population << " exceeds " << cfg.tail_tolerance
        << "; raise the phonon cutoff";
  else return;
  throw IntegratorFailure("evolve: " + msg.str(), r);
}

int steps_for(const HilbertSpec& spec, const Operator& h, const NoiseParams& p, double t,
              const IntegratorConfig& cfg) {
  if (t == 0.0) return 1;
  const double h_norm = cfg.hamiltonian_norm > 0.0 ? cfg.hamiltonian_norm : row_sum_norm(h);
  // Largest dissipative rate on the truncated mode.
  const double levels = spec.phonon_levels();
  const double noise_norm = p.kappa * (2.0 * p.nbar + 1.0) * levels + p.gamma * (levels - 1.0) * (levels - 1.0);
  const double norm = std::max(h_norm, noise_norm);
  if (norm == 0.0) return 1;
  return max_step_count(t, norm, cfg.max_step_norm);
}

void check_inputs(const HilbertSpec& spec, const DensityMatrix& rho0, double t, const Operator& h,
                  const NoiseParams& params, const IntegratorConfig& cfg) {
  params.validate();
  cfg.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("evolve: time must be finite and >= 0");
  if (rho0.rows() != spec.dimension() || rho0.cols() != spec.dimension() || h.dimension() != spec.dimension())
    throw std::invalid_argument("evolve: dimension mismatch");
}

DensityMatrix evolve_sectors(const HilbertSpec& spec, const DensityMatrix& rho0, double t, const Operator& h,
                             const NoiseParams& params, const IntegratorConfig& cfg, EvolutionReport& report) {
  const bool hermitian = is_hermitian(rho0);
  const SectorPropagator prop(spec, h, params);
  auto chains = prop.decompose(rho0, hermitian);
  const int steps = steps_for(spec, h, params, t, cfg);
  const double dt = t / steps;
  cplx tr0 = rho0.trace(), tr1 = 0.0;
  double tail = 0.0, herm = 0.0;
  for (auto& c : chains) {
    const auto stats = prop.evolve(c, steps, dt, hermitian);
    tail += stats.tail_max;
    herm = std::max(herm, stats.hermiticity);
    tr1 += prop.trace(c);
  }
  DensityMatrix out = DensityMatrix::Zero(spec.dimension(), spec.dimension());
  for (const auto& c : chains) prop.accumulate(c, out, hermitian);
  report.steps = steps;
  report.dt = dt;
  report.trace_drift = std::abs(tr1 - tr0);
  report.hermiticity_drift = herm;
  report.tail_population = tail;
  report.min_eigenvalue = hermitian ? min_eigenvalue_of(out) : std::numeric_limits<double>::quiet_NaN();
  report.sector_path = true;
  validate_report(report, cfg, hermitian);
  return out;
}

}  // namespace

void NoiseParams::validate() const {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be finite and >= 0");
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw std::invalid_argument("nbar must be finite and >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and >= 0");
}

void IntegratorConfig::validate() const {
  if (!(max_step_norm > 0.0) || max_step_norm > 1.0) throw std::invalid_argument("max_step_norm must be in (0, 1]");
  if (!(hamiltonian_norm >= 0.0)) throw std::invalid_argument("hamiltonian_norm must be >= 0");
  if (!(trace_tolerance > 0.0) || !(min_eigenvalue_tolerance > 0.0) || !(tail_tolerance > 0.0))
    throw std::invalid_argument("integrator tolerances must be positive");
}

DensityMatrix lindblad_rhs(const HilbertSpec& spec, const DensityMatrix& rho, const Operator& h,
                           const NoiseParams& params) {
  params.validate();
  if (rho.rows() != spec.dimension() || rho.cols() != spec.dimension() || h.dimension() != spec.dimension())
    throw std::invalid_argument("lindblad_rhs: dimension mismatch");
  return full_rhs(full_ops(spec, h), rho, params);
}

bool conserves_sectors(const HilbertSpec& spec, const Operator& h) {
  if (h.dimension() != spec.dimension()) return false;
  const SparseMatrix s = h.to_sparse();
  for (int c = 0; c < s.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(s, c); it; ++it) {
      if (it.value() == cplx(0.0)) continue;
      const BasisLabel a = spec.label(static_cast<int>(it.row())), b = spec.label(static_cast<int>(it.col()));
      if (pattern_of(a) != pattern_of(b) || excitation_of(a) != excitation_of(b)) return false;
    }
  return true;
}

DensityMatrix evolve_full_space(const HilbertSpec& spec, const DensityMatrix& rho0, double t, const Operator& h,
                                const NoiseParams& params, const IntegratorConfig& cfg, EvolutionReport* report) {
  check_inputs(spec, rho0, t, h, params, cfg);
  const bool hermitian = is_hermitian(rho0);
  const FullOps ops = full_ops(spec, h);
  const int steps = steps_for(spec, h, params, t, cfg);
  const double dt = t / steps;
  DensityMatrix rho = rho0;
  EvolutionReport r;
  r.tail_population = tail_of(spec, rho);
  for (int step = 0; step < steps; ++step) {
    const DensityMatrix k1 = full_rhs(ops, rho, params);
    const DensityMatrix k2 = full_rhs(ops, rho + (0.5 * dt) * k1, params);
    const DensityMatrix k3 = full_rhs(ops, rho + (0.5 * dt) * k2, params);
    const DensityMatrix k4 = full_rhs(ops, rho + dt * k3, params);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (hermitian) {
      r.hermiticity_drift = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
      rho = (0.5 * (rho + rho.adjoint())).eval();
    }
    if ((step + 1) % kTailInterval == 0 || step + 1 == steps)
      r.tail_population = std::max(r.tail_population, tail_of(spec, rho));
  }
  r.steps = steps;
  r.dt = dt;
  r.trace_drift = std::abs(rho.trace() - rho0.trace());
  r.min_eigenvalue = hermitian ? min_eigenvalue_of(rho) : std::numeric_limits<double>::quiet_NaN();
  r.sector_path = false;
  if (report) *report = r;
  validate_report(r, cfg, hermitian);
  return rho;
}

DensityMatrix evolve(const HilbertSpec& spec, const DensityMatrix& rho0, double t, const Operator& h,
                     const NoiseParams& params, const IntegratorConfig& cfg, EvolutionReport* report) {
  check_inputs(spec, rho0, t, h, params, cfg);
  if (!conserves_sectors(spec, h)) return evolve_full_space(spec, rho0, t, h, params, cfg, report);
  EvolutionReport r;
  try {
    DensityMatrix out = evolve_sectors(spec, rho0, t, h, params, cfg, r);
    if (report) *report = r;
    return out;
  } catch (const IntegratorFailure&) {
    if (report) *report = r;
    throw;
  }
}

std::array<Ket, kLogicalDim> encoded_inputs(const HilbertSpec& spec, const Operator& r) {
  std::array<Ket, kLogicalDim> w;
  for (int i = 0; i < kLogicalDim; ++i) w[i] = r.apply(computational_embed(spec, i));
  return w;
}

IntegratorConfig gate_integrator(const RabiConfig& config) {
  IntegratorConfig cfg;
  cfg.hamiltonian_norm = schedule(config).theta_123;
  return cfg;
}

NoisyGate::NoisyGate(const HilbertSpec& spec, const RabiConfig& config, const NoiseParams& params,
                     const IntegratorConfig& integrator, int threads, std::optional<GateTiming> timing) {
  params.validate();
  integrator.validate();
  const GateTiming tm = timing.value_or(nominal_timing(config));
  const Operator h = tavis_cummings_h(spec, config);
  const SectorPropagator prop(spec, h, params);
  const auto w = encoded_inputs(spec, composite_R(spec, tm.pulse_coupling, tm.pulse_duration).op);

  std::array<cplx, kLogicalDim> phase;
  for (int i = 0; i < kLogicalDim; ++i) phase[i] = logical_phase(i);

  const int steps = steps_for(spec, h, params, tm.tc_duration, integrator);
  const double dt = tm.tc_duration / steps;

  // Lambda(E_ji) = Lambda(E_ij)^dagger, so only i <= j is propagated.
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < kLogicalDim; ++i)
    for (int j = i; j < kLogicalDim; ++j) pairs.emplace_back(i, j);
  std::vector<EvolutionReport> reports(pairs.size());

  parallel_for(static_cast<int>(pairs.size()), threads, [&](int idx) {
    const auto [i, j] = pairs[idx];
    auto chains = prop.decompose_outer(w[i], w[j]);
    const cplx tr0 = i == j ? cplx(w[i].squaredNorm()) : w[j].dot(w[i]);
    cplx tr1 = 0.0;
    EvolutionReport& r = reports[idx];
    LogicalMatrix raw = LogicalMatrix::Zero();
    for (auto& c : chains) {
      const auto stats = prop.evolve(c, steps, dt, i == j);
      r.tail_population += stats.tail_max;
      r.hermiticity_drift = std::max(r.hermiticity_drift, stats.hermiticity);
      tr1 += prop.trace(c);
      prop.sandwich(c, w, raw);
    }
    r.steps = steps;
    r.dt = dt;
    r.sector_path = true;
    r.trace_drift = std::abs(tr1 - tr0);
    r.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    // Output read in the logical basis: <b_a| . |b_b> = conj(ph_a) ph_b <w_a| . |w_b>.
    LogicalMatrix unit;
    for (int a = 0; a < kLogicalDim; ++a)
      for (int b = 0; b < kLogicalDim; ++b) unit(a, b) = std::conj(phase[a]) * phase[b] * raw(a, b);
    if (i == j) {
      r.min_eigenvalue = Eigen::SelfAdjointEigenSolver<LogicalMatrix>(0.5 * (unit + unit.adjoint()),
                                                                       Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
      unit = (0.5 * (unit + unit.adjoint())).eval();
    }
    units_[8 * i + j] = unit;
    if (i != j) units_[8 * j + i] = unit.adjoint();
    validate_report(r, integrator, i == j);
  });

  report_ = EvolutionReport{};
  report_.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    report_.steps = r.steps;
    report_.dt = r.dt;
    report_.sector_path = true;
    report_.trace_drift = std::max(report_.trace_drift, r.trace_drift);
    report_.hermiticity_drift = std::max(report_.hermiticity_drift, r.hermiticity_drift);
    report_.tail_population = std::max(report_.tail_population, r.tail_population);
    if (std::isfinite(r.min_eigenvalue)) report_.min_eigenvalue = std::min(report_.min_eigenvalue, r.min_eigenvalue);
  }
}

LogicalMatrix NoisyGate::apply_linear(const LogicalMatrix& rho) const {
  LogicalMatrix out = LogicalMatrix::Zero();
  for (int i = 0; i < kLogicalDim; ++i)
    for (int j = 0; j < kLogicalDim; ++j)
      if (rho(i, j) != cplx(0.0)) out += rho(i, j) * units_[8 * i + j];
  return out;
}

NoisyGate::Result NoisyGate::apply(const LogicalMatrix& rho) const {
  Result r;
  r.rho = apply_linear(rho);
  r.leakage = (rho.trace() - r.rho.trace()).real();
  return r;
}

NoisyGate::Result noisy_gate_map(const LogicalMatrix& rho_logical, const HilbertSpec& spec, const RabiConfig& config,
                                 const NoiseParams& params, const IntegratorConfig& integrator) {
  const GateTiming tm = nominal_timing(config);
  const Operator r = composite_R(spec, tm.pulse_coupling, tm.pulse_duration).op;
  const DenseMatrix rd = r.to_dense();
  const DensityMatrix embedded = embed_computational(spec, rho_logical);
  const DensityMatrix rho0 = rd * embedded * rd.adjoint();
  const DensityMatrix evolved =
      evolve(spec, rho0, tm.tc_duration, tavis_cummings_h(spec, config), params, integrator);
  const DensityMatrix back = rd.adjoint() * evolved * rd;
  NoisyGate::Result out;
  out.rho = logical_project(spec, back);
  out.leakage = (rho_logical.trace() - out.rho.trace()).real();
  return out;
}

}  // namespace iontoffoli
