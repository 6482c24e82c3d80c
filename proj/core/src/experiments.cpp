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

#include "iontoffoli/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "iontoffoli/parallel.hpp"
#include "iontoffoli/qpt.hpp"
#include "json.hpp"

#ifndef IONTOFFOLI_VERSION
#define IONTOFFOLI_VERSION "unknown"
#endif

namespace iontoffoli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kConfigSchema = "iontoffoli.config/1";
constexpr const char* kManifestSchema = "iontoffoli.manifest/1";

/// Typed access to one JSON object; every key must be consumed.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  const json* find(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void get(const char* key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "a number");
      out = v->get<double>();
    }
  }
  void get(const char* key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, "an integer");
      out = v->get<int>();
    }
  }
  void get(const char* key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        fail(key, "a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }
  void get(const char* key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "a boolean");
      out = v->get<bool>();
    }
  }
  void get(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "a string");
      out = v->get<std::string>();
    }
  }
  void get(const char* key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) fail(key, "an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }
  template <std::size_t N>
  void get(const char* key, std::array<double, N>& out) {
    if (!find(key)) return;
    std::vector<double> tmp;
    get(key, tmp);
    if (tmp.size() != N) fail(key, "an array of " + std::to_string(N) + " numbers");
    std::copy(tmp.begin(), tmp.end(), out.begin());
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError(where_ + ": unknown key \"" + item.key() + "\"");
  }

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(where_ + "." + key + ": expected " + what);
  }

  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void parse_system(const json& j, ExperimentConfig& c) {
  Reader r(j, "system");
  r.get("eta", c.rabi.eta);
  r.get("omega1", c.rabi.omega1);
  r.get("ratios", c.rabi.ratios);
  r.get("pulse_rabi", c.rabi.pulse_rabi);
  r.get("trap_frequency", c.rabi.trap_frequency);
  r.get("phonon_cutoff", c.phonon_cutoff);
  r.finish();
}

void parse_integrator(const json& j, IntegratorConfig& c) {
  Reader r(j, "integrator");
  r.get("max_step_norm", c.max_step_norm);
  r.get("trace_tolerance", c.trace_tolerance);
  r.get("min_eigenvalue_tolerance", c.min_eigenvalue_tolerance);
  r.get("tail_tolerance", c.tail_tolerance);
  r.get("check_tail", c.check_tail);
  r.finish();
}

void parse_ratio_search(const json& j, ExperimentConfig& c) {
  Reader r(j, "ratio_search");
  auto& s = c.ratio_search;
  r.get("lower", s.lower);
  r.get("upper", s.upper);
  r.get("resolution", s.resolution);
  r.get("tolerance", s.tolerance);
  r.get("max_evaluations", s.max_evaluations);
  r.get("refine_candidates", s.refine_candidates);
  r.get("joint_time", s.joint_time);
  r.get("time_scale_bounds", s.time_scale_bounds);
  if (const json* v = r.find("refine_seed"); v && !v->is_null()) {
    std::array<double, 2> seed{};
    r.get("refine_seed", seed);
    c.refine_seed = seed;
  }
  r.finish();
}

void parse_dephasing(const json& j, DephasingSweepConfig& c) {
  Reader r(j, "dephasing_sweep");
  r.get("gamma_ratios", c.gamma_ratios);
  r.get("kappa", c.kappa);
  r.get("nbar", c.nbar);
  r.get("convergence_check", c.convergence_check);
  r.finish();
}

void parse_heating(const json& j, HeatingSweepConfig& c) {
  Reader r(j, "heating_sweep");
  r.get("nbar_values", c.nbar_values);
  r.get("kappa", c.kappa);
  r.get("gamma", c.gamma);
  r.get("cutoff_low", c.cutoff_low);
  r.get("cutoff_high", c.cutoff_high);
  r.get("nbar_threshold", c.nbar_threshold);
  r.get("convergence_check", c.convergence_check);
  r.finish();
}

void parse_mc(const json& j, McBlock& c) {
  Reader r(j, "mc");
  std::string semantics = to_string(c.fluctuation.semantics);
  r.get("delta", c.fluctuation.delta);
  r.get("n_samples", c.fluctuation.n_samples);
  r.get("semantics", semantics);
  r.get("fluctuate_pulse_coupling", c.fluctuation.fluctuate_pulse_coupling);
  r.get("noise_enabled", c.noise_enabled);
  r.get("kappa", c.noise.kappa);
  r.get("nbar", c.noise.nbar);
  r.get("gamma", c.noise.gamma);
  r.finish();
  try {
    c.fluctuation.semantics = spread_semantics_from_string(semantics);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("mc.semantics: ") + e.what());
  }
}

ExperimentConfig parse_object(const json& j) {
  ExperimentConfig c;
  Reader r(j, "config");
  std::string schema = kConfigSchema;
  r.get("schema", schema);
  if (schema != kConfigSchema) throw ConfigError("config: unsupported schema \"" + schema + "\"");
  if (const json* v = r.find("experiment"); v && !v->is_null()) {
    std::string name;
    r.get("experiment", name);
    try {
      c.kind = experiment_kind_from_string(name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.experiment: ") + e.what());
    }
  }
  r.get("seed", c.seed);
  if (const json* v = r.find("system")) parse_system(*v, c);
  if (const json* v = r.find("integrator")) parse_integrator(*v, c.integrator);
  if (const json* v = r.find("ratio_search")) parse_ratio_search(*v, c);
  if (const json* v = r.find("dephasing_sweep")) parse_dephasing(*v, c.dephasing);
  if (const json* v = r.find("heating_sweep")) parse_heating(*v, c.heating);
  if (const json* v = r.find("mc")) parse_mc(*v, c.mc);
  r.finish();
  c.validate();
  return c;
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["schema"] = kConfigSchema;
  j["experiment"] = c.kind ? json(to_string(*c.kind)) : json(nullptr);
  j["seed"] = c.seed;
  j["system"] = {{"eta", c.rabi.eta},
                 {"omega1", c.rabi.omega1},
                 {"ratios", c.rabi.ratios},
                 {"pulse_rabi", c.rabi.pulse_rabi},
                 {"trap_frequency", c.rabi.trap_frequency},
                 {"phonon_cutoff", c.phonon_cutoff}};
  j["integrator"] = {{"max_step_norm", c.integrator.max_step_norm},
                     {"trace_tolerance", c.integrator.trace_tolerance},
                     {"min_eigenvalue_tolerance", c.integrator.min_eigenvalue_tolerance},
                     {"tail_tolerance", c.integrator.tail_tolerance},
                     {"check_tail", c.integrator.check_tail}};
  const auto& s = c.ratio_search;
  j["ratio_search"] = {{"lower", s.lower},
                       {"upper", s.upper},
                       {"resolution", s.resolution},
                       {"tolerance", s.tolerance},
                       {"max_evaluations", s.max_evaluations},
                       {"refine_candidates", s.refine_candidates},
                       {"joint_time", s.joint_time},
                       {"time_scale_bounds", s.time_scale_bounds},
                       {"refine_seed", c.refine_seed ? json(*c.refine_seed) : json(nullptr)}};
  j["dephasing_sweep"] = {
      {"gamma_ratios", c.dephasing.gamma_ratios}, {"kappa", c.dephasing.kappa}, {"nbar", c.dephasing.nbar},
      {"convergence_check", c.dephasing.convergence_check}};
  j["heating_sweep"] = {{"nbar_values", c.heating.nbar_values},   {"kappa", c.heating.kappa},
                        {"gamma", c.heating.gamma},               {"cutoff_low", c.heating.cutoff_low},
                        {"cutoff_high", c.heating.cutoff_high},   {"nbar_threshold", c.heating.nbar_threshold},
                        {"convergence_check", c.heating.convergence_check}};
  j["mc"] = {{"delta", c.mc.fluctuation.delta},
             {"n_samples", c.mc.fluctuation.n_samples},
             {"semantics", to_string(c.mc.fluctuation.semantics)},
             {"fluctuate_pulse_coupling", c.mc.fluctuation.fluctuate_pulse_coupling},
             {"noise_enabled", c.mc.noise_enabled},
             {"kappa", c.mc.noise.kappa},
             {"nbar", c.mc.noise.nbar},
             {"gamma", c.mc.noise.gamma}};
  return j;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_header(const char* schema, const char* columns) {
  return std::string("# schema=") + schema + "\n" + columns + "\n";
}

std::ostringstream precise_stream() {
  std::ostringstream os;
  os << std::setprecision(17);
  return os;
}

IntegratorConfig integrator_for(const ExperimentConfig& c) {
  IntegratorConfig integ = c.integrator;
  if (integ.hamiltonian_norm == 0.0) integ.hamiltonian_norm = schedule(c.rabi).theta_123;
  return integ;
}

int threads_of(const RunOptions& o) { return resolve_threads(o.threads); }

struct GatePoint {
  double gate_fidelity;
  double state_fidelity;
  double leakage;
  RowDiscrepancy discrepancy;
};

GatePoint noisy_point(const ExperimentConfig& c, int cutoff, const NoiseParams& noise, int threads) {
  const HilbertSpec spec(cutoff);
  const NoisyGate gate(spec, c.rabi, noise, integrator_for(c), threads);
  const ProcessMatrix chi = gate.chi();
  const ProcessMatrix target = chi_of_unitary(ideal_toffoli());
  if (chi.min_eigenvalue() < -c.integrator.min_eigenvalue_tolerance)
    throw NumericalFailure("process matrix has a negative eigenvalue below tolerance");
  GatePoint p;
  p.gate_fidelity = gate_fidelity(target, chi);
  p.state_fidelity = avg_state_fidelity(p.gate_fidelity);
  p.leakage = 1.0 - chi.trace().real();
  p.discrepancy = discrepancy_rows(chi, target);
  return p;
}

void write_json(const std::filesystem::path& dir, const std::string& name, const json& j,
                std::vector<std::string>& outputs) {
  write_file_atomic(dir / name, j.dump(2) + "\n");
  outputs.push_back(name);
}

void write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text,
                std::vector<std::string>& outputs) {
  write_file_atomic(dir / name, text);
  outputs.push_back(name);
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::unitary_qpt: return "unitary-qpt";
    case ExperimentKind::ratio_search: return "ratio-search";
    case ExperimentKind::dephasing_sweep: return "dephasing-sweep";
    case ExperimentKind::heating_sweep: return "heating-sweep";
    case ExperimentKind::mc: return "mc";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "unitary-qpt") return ExperimentKind::unitary_qpt;
  if (name == "ratio-search") return ExperimentKind::ratio_search;
  if (name == "dephasing-sweep") return ExperimentKind::dephasing_sweep;
  if (name == "heating-sweep") return ExperimentKind::heating_sweep;
  if (name == "mc" || name == "mc-fluctuations") return ExperimentKind::mc;
  throw std::invalid_argument("unknown experiment \"" + name + "\"");
}

void ExperimentConfig::validate() const {
  try {
    rabi.validate();
    integrator.validate();
    ratio_search.validate();
    mc.fluctuation.validate();
    mc.noise.validate();
    NoiseParams{dephasing.kappa, dephasing.nbar, 0.0}.validate();
    NoiseParams{heating.kappa, 0.0, heating.gamma}.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (phonon_cutoff < 1) throw ConfigError("system.phonon_cutoff must be >= 1");
  if (heating.cutoff_low < 1 || heating.cutoff_high < 1) throw ConfigError("heating_sweep cutoffs must be >= 1");
  if (dephasing.gamma_ratios.empty()) throw ConfigError("dephasing_sweep.gamma_ratios must not be empty");
  for (double g : dephasing.gamma_ratios)
    if (!(g >= 0.0) || !std::isfinite(g)) throw ConfigError("dephasing_sweep.gamma_ratios must be >= 0");
  if (heating.nbar_values.empty()) throw ConfigError("heating_sweep.nbar_values must not be empty");
  for (double n : heating.nbar_values)
    if (!(n >= 0.0) || !std::isfinite(n)) throw ConfigError("heating_sweep.nbar_values must be >= 0");
  if (refine_seed && !((*refine_seed)[0] > 0.0 && (*refine_seed)[1] > 0.0))
    throw ConfigError("ratio_search.refine_seed must be positive");
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (j.is_object() && j.contains("schema") && j["schema"] == kManifestSchema) {
    if (!j.contains("config")) throw ConfigError("manifest has no config section");
    return parse_object(j["config"]);
  }
  return parse_object(j);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const ExperimentConfig& config) { return config_json(config).dump(2); }

std::string library_version() { return IONTOFFOLI_VERSION; }

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RunSummary run_unitary_qpt(const ExperimentConfig& c, const RunOptions& o) {
  const HilbertSpec spec(c.phonon_cutoff);
  const Operator u = toffoli_unitary(spec, c.rabi);
  if (u.unitarity_error() > 1e-10) throw NumericalFailure("gate propagator is not unitary");
  const LogicalMatrix m = logical_matrix(spec, u);
  const ProcessMatrix chi = chi_of_map([&](const LogicalMatrix& rho) -> LogicalMatrix { return m * rho * m.adjoint(); },
                                       threads_of(o));
  const ProcessMatrix target = chi_of_unitary(ideal_toffoli());
  const double fg = gate_fidelity(target, chi);
  const double fs = avg_state_fidelity(fg);
  const double oracle_diff = (m - oracle_logical_matrix(nominal_timing(c.rabi).tc_duration, c.rabi)).cwiseAbs().maxCoeff();

  RunSummary out;
  write_text(o.out_dir, "chi_unitary.json", chi_to_json(chi) + "\n", out.outputs);
  write_text(o.out_dir, "chi_moduli.csv", chi_to_csv(chi), out.outputs);
  auto lm = precise_stream();
  lm << csv_header("iontoffoli.logical_matrix/1", "row,col,re,im,modulus");
  for (int i = 0; i < kLogicalDim; ++i)
    for (int j = 0; j < kLogicalDim; ++j)
      lm << i << ',' << j << ',' << m(i, j).real() << ',' << m(i, j).imag() << ',' << std::abs(m(i, j)) << '\n';
  write_text(o.out_dir, "logical_matrix.csv", lm.str(), out.outputs);
  json f;
  f["schema"] = "iontoffoli.fidelities/1";
  f["gate_fidelity"] = fg;
  f["state_fidelity"] = fs;
  f["infidelity"] = 1.0 - fs;
  f["leakage"] = 1.0 - chi.trace().real();
  f["chi_max_difference"] = max_entry_difference(chi, target);
  f["oracle_max_difference"] = oracle_diff;
  f["phonon_cutoff"] = c.phonon_cutoff;
  write_json(o.out_dir, "fidelities.json", f, out.outputs);
  std::ostringstream h;
  h << "unitary-qpt: F_s = " << std::setprecision(8) << fs << ", 1 - F_s = " << std::setprecision(4) << 1.0 - fs;
  out.headline = h.str();
  return out;
}

RunSummary run_ratio_search(const ExperimentConfig& c, const RunOptions& o) {
  RatioSearchConfig s = c.ratio_search;
  s.base = c.rabi;
  s.threads = threads_of(o);
  RatioSearchResult best = optimize(s);
  const RatioObjective f(c.rabi);
  const double fresh = f(best.r2, best.r3, best.time_scale);
  if (std::abs(fresh - best.infidelity) > 1e-12) throw NumericalFailure("optimizer result disagrees with a fresh evaluation");
  const double reference = f(std::sqrt(143.0), 16.0);

  json opt;
  opt["schema"] = "iontoffoli.ratio_optimum/1";
  opt["r2"] = best.r2;
  opt["r3"] = best.r3;
  opt["time_scale"] = best.time_scale;
  opt["infidelity"] = best.infidelity;
  opt["fresh_infidelity"] = fresh;
  opt["reference"] = {{"r2", std::sqrt(143.0)}, {"r3", 16.0}, {"infidelity", reference}};
  opt["evaluations"] = best.trace.size();
  std::vector<Evaluation> trace = best.trace;
  if (c.refine_seed) {
    RatioSearchResult r = refine(s, *c.refine_seed);
    for (auto& e : r.trace) e.stage = "refine";
    trace.insert(trace.end(), r.trace.begin(), r.trace.end());
    opt["refine"] = {{"seed", *c.refine_seed}, {"r2", r.r2}, {"r3", r.r3}, {"infidelity", r.infidelity}};
  }

  RunSummary out;
  write_text(o.out_dir, "search_trace.csv", trace_to_csv(trace), out.outputs);
  write_json(o.out_dir, "optimum.json", opt, out.outputs);
  std::ostringstream h;
  h << "ratio-search: best (" << std::setprecision(8) << best.r2 << ", " << best.r3 << ") infidelity "
    << std::setprecision(4) << best.infidelity;
  out.headline = h.str();
  return out;
}

RunSummary run_dephasing_sweep(const ExperimentConfig& c, const RunOptions& o) {
  const int threads = threads_of(o);
  auto csv = precise_stream();
  csv << csv_header("iontoffoli.dephasing_sweep/1",
                    "gamma_ratio,gamma,gate_fidelity,state_fidelity,leakage,max_row_discrepancy");
  RunSummary out;
  std::vector<double> fs;
  const std::string name = "dephasing_sweep.csv";
  for (double ratio : c.dephasing.gamma_ratios) {
    const NoiseParams noise{c.dephasing.kappa, c.dephasing.nbar, ratio * c.rabi.eta_omega1()};
    GatePoint p;
    try {
      p = noisy_point(c, c.phonon_cutoff, noise, threads);
    } catch (...) {
      write_file_atomic(o.out_dir / name, csv.str());  // partial results
      throw;
    }
    csv << ratio << ',' << noise.gamma << ',' << p.gate_fidelity << ',' << p.state_fidelity << ',' << p.leakage << ','
        << p.discrepancy.max << '\n';
    write_file_atomic(o.out_dir / name, csv.str());
    fs.push_back(p.state_fidelity);
  }
  out.outputs.push_back(name);
  bool monotone = true;
  for (std::size_t k = 1; k < fs.size(); ++k) monotone = monotone && fs[k] <= fs[k - 1];
  json summary;
  summary["schema"] = "iontoffoli.dephasing_summary/1";
  summary["state_fidelity_first"] = fs.front();
  summary["state_fidelity_last"] = fs.back();
  summary["monotone_non_increasing"] = monotone;
  summary["phonon_cutoff"] = c.phonon_cutoff;
  double shift = 0.0;
  if (c.dephasing.convergence_check) {
    const NoiseParams noise{c.dephasing.kappa, c.dephasing.nbar, c.dephasing.gamma_ratios.back() * c.rabi.eta_omega1()};
    const GatePoint p = noisy_point(c, c.phonon_cutoff + 5, noise, threads);
    shift = std::abs(p.state_fidelity - fs.back());
    summary["cutoff_convergence"] = {{"phonon_cutoff", c.phonon_cutoff + 5}, {"state_fidelity", p.state_fidelity},
                                     {"shift", shift}};
  }
  write_json(o.out_dir, "dephasing_summary.json", summary, out.outputs);
  if (shift > 1e-4) throw NumericalFailure("phonon cutoff not converged: fidelity shift " + std::to_string(shift));
  std::ostringstream h;
  h << "dephasing-sweep: F_s from " << std::setprecision(6) << fs.front() << " to " << fs.back();
  out.headline = h.str();
  return out;
}

RunSummary run_heating_sweep(const ExperimentConfig& c, const RunOptions& o) {
  const int threads = threads_of(o);
  const auto& hs = c.heating;
  auto csv = precise_stream();
  csv << csv_header("iontoffoli.heating_sweep/1",
                    "nbar,phonon_cutoff,gate_fidelity,state_fidelity,max_row_discrepancy,leakage");
  const std::string name = "heating_sweep.csv";
  RunSummary out;
  std::vector<std::pair<double, GatePoint>> points;
  for (double nbar : hs.nbar_values) {
    const int cutoff = nbar <= hs.nbar_threshold ? hs.cutoff_low : hs.cutoff_high;
    GatePoint p;
    try {
      p = noisy_point(c, cutoff, NoiseParams{hs.kappa, nbar, hs.gamma}, threads);
    } catch (...) {
      write_file_atomic(o.out_dir / name, csv.str());
      throw;
    }
    csv << nbar << ',' << cutoff << ',' << p.gate_fidelity << ',' << p.state_fidelity << ',' << p.discrepancy.max
        << ',' << p.leakage << '\n';
    write_file_atomic(o.out_dir / name, csv.str());
    points.emplace_back(nbar, p);
  }
  out.outputs.push_back(name);

  const auto top = std::max_element(points.begin(), points.end(),
                                     [](const auto& a, const auto& b) { return a.first < b.first; });
  const auto& labels = OperatorBasis::instance().labels();
  auto rows = precise_stream();
  rows << csv_header("iontoffoli.row_discrepancy/1", "row,row_label,max_abs_difference");
  for (int r = 0; r < kChiDim; ++r) rows << r << ',' << labels[r] << ',' << top->second.discrepancy.rows[r] << '\n';
  write_text(o.out_dir, "row_discrepancy.csv", rows.str(), out.outputs);

  json summary;
  summary["schema"] = "iontoffoli.heating_summary/1";
  summary["nbar_top"] = top->first;
  summary["state_fidelity_top"] = top->second.state_fidelity;
  summary["max_row_discrepancy_top"] = top->second.discrepancy.max;
  for (const auto& [nbar, p] : points)
    if (nbar == 1.0) summary["ratio_top_to_nbar1"] = top->second.state_fidelity / p.state_fidelity;
  double shift = 0.0;
  if (hs.convergence_check) {
    const int cutoff = top->first <= hs.nbar_threshold ? hs.cutoff_low : hs.cutoff_high;
    const GatePoint p = noisy_point(c, cutoff + 5, NoiseParams{hs.kappa, top->first, hs.gamma}, threads);
    shift = std::abs(p.state_fidelity - top->second.state_fidelity);
    summary["cutoff_convergence"] = {{"phonon_cutoff", cutoff + 5}, {"state_fidelity", p.state_fidelity},
                                     {"shift", shift}};
  }
  write_json(o.out_dir, "heating_summary.json", summary, out.outputs);
  if (shift > 1e-4) throw NumericalFailure("phonon cutoff not converged: fidelity shift " + std::to_string(shift));
  std::ostringstream h;
  h << "heating-sweep: F_s(nbar=" << top->first << ") = " << std::setprecision(6) << top->second.state_fidelity
    << ", max row discrepancy " << std::setprecision(3) << top->second.discrepancy.max;
  out.headline = h.str();
  return out;
}

RunSummary run_mc(const ExperimentConfig& c, const RunOptions& o) {
  FluctuationConfig fluct = c.mc.fluctuation;
  fluct.seed = c.seed;
  McOptions opts;
  if (c.mc.noise_enabled) opts.noise = c.mc.noise;
  opts.phonon_cutoff = c.phonon_cutoff;
  opts.integrator = integrator_for(c);
  opts.threads = threads_of(o);
  const McResult r = mc_average_fidelity(c.rabi, fluct, opts);

  RunSummary out;
  write_text(o.out_dir, "mc_draws.csv", draws_to_csv(r.draws), out.outputs);
  json s;
  s["schema"] = "iontoffoli.mc_summary/1";
  s["mean_state_fidelity"] = r.mean;
  s["std_error"] = r.std_error;
  s["delta"] = fluct.delta;
  s["half_width"] = fluct.half_width();
  s["semantics"] = to_string(fluct.semantics);
  s["n_samples"] = fluct.n_samples;
  s["seed"] = fluct.seed;
  s["noise_enabled"] = c.mc.noise_enabled;
  if (c.mc.noise_enabled) {
    s["noise"] = {{"kappa", c.mc.noise.kappa}, {"nbar", c.mc.noise.nbar}, {"gamma", c.mc.noise.gamma}};
    s["phonon_cutoff"] = c.phonon_cutoff;
  }
  write_json(o.out_dir, "mc_summary.json", s, out.outputs);
  std::ostringstream h;
  h << "mc: mean F_s = " << std::setprecision(6) << r.mean << " +- " << std::setprecision(3) << r.std_error << " ("
    << fluct.n_samples << " draws, " << to_string(fluct.semantics) << ")";
  out.headline = h.str();
  return out;
}

RunSummary run_experiment(ExperimentKind kind, ExperimentConfig config, const RunOptions& options) {
  if (config.kind && *config.kind != kind)
    throw ConfigError("config is for experiment \"" + to_string(*config.kind) + "\", not \"" + to_string(kind) + "\"");
  config.kind = kind;
  if (options.seed) config.seed = *options.seed;
  if (options.phonon_cutoff) {
    config.phonon_cutoff = *options.phonon_cutoff;
    config.heating.cutoff_low = config.heating.cutoff_high = *options.phonon_cutoff;
  }
  if (options.threads && *options.threads < 1) throw ConfigError("--threads must be >= 1");
  config.validate();

  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + options.out_dir.string() + ": " + ec.message());

  const std::string started = utc_now();
  RunSummary summary;
  switch (kind) {
    case ExperimentKind::unitary_qpt: summary = run_unitary_qpt(config, options); break;
    case ExperimentKind::ratio_search: summary = run_ratio_search(config, options); break;
    case ExperimentKind::dephasing_sweep: summary = run_dephasing_sweep(config, options); break;
    case ExperimentKind::heating_sweep: summary = run_heating_sweep(config, options); break;
    case ExperimentKind::mc: summary = run_mc(config, options); break;
  }

  json manifest;
  manifest["schema"] = kManifestSchema;
  manifest["experiment"] = to_string(kind);
  manifest["library_version"] = library_version();
  manifest["seed"] = config.seed;
  manifest["threads"] = resolve_threads(options.threads);
  manifest["started_utc"] = started;
  manifest["finished_utc"] = utc_now();
  manifest["outputs"] = summary.outputs;
  manifest["config"] = config_json(config);
  write_json(options.out_dir, "manifest.json", manifest, summary.outputs);
  return summary;
}

}  // namespace iontoffoli
