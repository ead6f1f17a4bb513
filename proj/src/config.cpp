// Copyright 2026 The thermalbath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "thermalbath/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "thermalbath/bath.hpp"
#include "thermalbath/random.hpp"

namespace thermalbath {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& section, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError("config: '" + section + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("config: unknown key '" + section + "." + key + "'");
    }
  }
}

template <typename T>
void read(const json& obj, const std::string& section, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config: '" + section + "." + key + "' has the wrong type");
  }
}

void read_size(const json& obj, const std::string& section, const char* key, std::size_t& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError("config: '" + section + "." + key + "' must be a non-negative integer");
  }
  out = v.get<std::size_t>();
}

template <typename E>
void read_enum(const json& obj, const std::string& section, const char* key, E& out,
               std::initializer_list<std::pair<const char*, E>> names) {
  if (!obj.contains(key)) return;
  std::string s;
  read(obj, section, key, s);
  for (const auto& [name, value] : names) {
    if (s == name) {
      out = value;
      return;
    }
  }
  throw ConfigError("config: '" + section + "." + key + "' has unknown value '" + s + "'");
}

const char* name_of(SystemKind k) {
  return k == SystemKind::ising_chain ? "ising_chain" : "transverse_ising";
}
const char* name_of(BathMode m) { return m == BathMode::resonators ? "resonators" : "exact_kms"; }
const char* name_of(WindowMode m) {
  return m == WindowMode::uniform_bound ? "uniform_bound" : "spectral";
}

void positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("config: ") + what + " must be positive");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(root, "root", {"system", "bath", "target", "run"});
  ExperimentConfig c;

  if (root.contains("system")) {
    const json& s = root["system"];
    check_keys(s, "system",
               {"model", "n", "omegas", "J", "J_range", "a", "b", "ensemble_size", "rng_seed",
                "coupled_qubits"});
    read_enum(s, "system", "model", c.system.model,
              {{"ising_chain", SystemKind::ising_chain},
               {"transverse_ising", SystemKind::transverse_ising}});
    read_size(s, "system", "n", c.system.n);
    if (s.contains("omegas")) {
      if (s["omegas"].is_number()) {
        c.system.omegas.assign(c.system.n, s["omegas"].get<double>());
      } else {
        read(s, "system", "omegas", c.system.omegas);
      }
    } else {
      c.system.omegas.assign(c.system.n, 2.5);
    }
    if (s.contains("J")) {
      std::vector<double> j;
      read(s, "system", "J", j);
      c.system.j = j;
    }
    if (s.contains("J_range")) {
      std::vector<double> r;
      read(s, "system", "J_range", r);
      if (r.size() != 2) throw ConfigError("config: 'system.J_range' must have two entries");
      c.system.j_low = r[0];
      c.system.j_high = r[1];
    }
    read(s, "system", "a", c.system.transverse_a);
    read(s, "system", "b", c.system.transverse_b);
    read_size(s, "system", "ensemble_size", c.system.ensemble_size);
    read(s, "system", "rng_seed", c.system.rng_seed);
    if (s.contains("coupled_qubits")) {
      std::vector<std::size_t> q;
      read(s, "system", "coupled_qubits", q);
      c.system.coupled_qubits = q;
    }
  }

  if (root.contains("bath")) {
    const json& b = root["bath"];
    check_keys(b, "bath",
               {"mode", "n_resonators", "resonator_frequency", "kappa", "photon_number",
                "detuning", "g", "spectrum_model", "base_rate", "kms_temperature"});
    read_enum(b, "bath", "mode", c.bath.mode,
              {{"resonators", BathMode::resonators}, {"exact_kms", BathMode::exact_kms}});
    read_size(b, "bath", "n_resonators", c.bath.n_resonators);
    read(b, "bath", "resonator_frequency", c.bath.resonator_frequency);
    read(b, "bath", "kappa", c.bath.kappa);
    read(b, "bath", "photon_number", c.bath.photon_number);
    read(b, "bath", "detuning", c.bath.detuning);
    read(b, "bath", "g", c.bath.g);
    read_enum(b, "bath", "spectrum_model", c.bath.spectrum_model,
              {{"collective", SpectrumModel::collective},
               {"transition", SpectrumModel::transition},
               {"composite", SpectrumModel::composite}});
    read(b, "bath", "base_rate", c.bath.base_rate);
    if (b.contains("kms_temperature")) {
      double t = 0.0;
      read(b, "bath", "kms_temperature", t);
      c.bath.kms_temperature = t;
    }
  }

  if (root.contains("target")) {
    const json& t = root["target"];
    check_keys(t, "target", {"temperature_GHz", "window", "window_mode"});
    read(t, "target", "temperature_GHz", c.target.temperature);
    if (t.contains("window")) {
      std::vector<double> w;
      read(t, "target", "window", w);
      if (w.size() != 2) throw ConfigError("config: 'target.window' must have two entries");
      c.target.window = EnergyWindow{w[0], w[1]};
    }
    read_enum(t, "target", "window_mode", c.target.window_mode,
              {{"uniform_bound", WindowMode::uniform_bound}, {"spectral", WindowMode::spectral}});
  }

  if (root.contains("run")) {
    const json& r = root["run"];
    check_keys(r, "run",
               {"objective", "grid", "report_grid", "rate_points", "bins", "seeds", "optimize",
                "hold_photon_number", "cap_filter", "max_resonators", "free_parameters",
                "tolerances", "prefactor_log", "trajectory_steps", "jobs", "output_dir"});
    read_enum(r, "run", "objective", c.run.objective,
              {{"minimax", Objective::minimax}, {"integral", Objective::integral}});
    read_size(r, "run", "grid", c.run.grid);
    read_size(r, "run", "report_grid", c.run.report_grid);
    read_size(r, "run", "rate_points", c.run.rate_points);
    read_size(r, "run", "bins", c.run.bins);
    read_size(r, "run", "seeds", c.run.seeds);
    read(r, "run", "optimize", c.run.optimize);
    read(r, "run", "hold_photon_number", c.run.hold_photon_number);
    read(r, "run", "cap_filter", c.run.cap_filter);
    read_size(r, "run", "max_resonators", c.run.max_resonators);
    if (r.contains("free_parameters")) {
      const json& list = r["free_parameters"];
      if (!list.is_array()) throw ConfigError("config: 'run.free_parameters' must be an array");
      c.run.free_parameters.clear();
      for (const json& p : list) {
        check_keys(p, "run.free_parameters[]", {"kind", "resonator", "lower", "upper"});
        FreeParameterConfig fp;
        read_enum(p, "run.free_parameters[]", "kind", fp.kind,
                  {{"drive_amplitude", ParameterKind::drive_amplitude},
                   {"detuning", ParameterKind::detuning},
                   {"kappa", ParameterKind::kappa},
                   {"photon_number", ParameterKind::photon_number}});
        read_size(p, "run.free_parameters[]", "resonator", fp.resonator);
        read(p, "run.free_parameters[]", "lower", fp.lower);
        read(p, "run.free_parameters[]", "upper", fp.upper);
        c.run.free_parameters.push_back(fp);
      }
    }
    if (r.contains("tolerances")) {
      const json& tol = r["tolerances"];
      check_keys(tol, "run.tolerances", {"fixed_point", "trace_distance", "cp"});
      read(tol, "run.tolerances", "fixed_point", c.run.fixed_point_tolerance);
      read(tol, "run.tolerances", "trace_distance", c.run.trace_distance_tolerance);
      read(tol, "run.tolerances", "cp", c.run.cp_tolerance);
    }
    read_enum(r, "run", "prefactor_log", c.run.prefactor_log,
              {{"natural", LogBase::natural}, {"base2", LogBase::base2}});
    read_size(r, "run", "trajectory_steps", c.run.trajectory_steps);
    read_size(r, "run", "jobs", c.run.jobs);
    read(r, "run", "output_dir", c.run.output_dir);
  }

  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  json root;
  json& s = root["system"];
  s["model"] = name_of(c.system.model);
  s["n"] = c.system.n;
  s["omegas"] = c.system.omegas;
  if (c.system.j) s["J"] = *c.system.j;
  s["J_range"] = {c.system.j_low, c.system.j_high};
  s["a"] = c.system.transverse_a;
  s["b"] = c.system.transverse_b;
  s["ensemble_size"] = c.system.ensemble_size;
  s["rng_seed"] = c.system.rng_seed;
  if (c.system.coupled_qubits) s["coupled_qubits"] = *c.system.coupled_qubits;

  json& b = root["bath"];
  b["mode"] = name_of(c.bath.mode);
  b["n_resonators"] = c.bath.n_resonators;
  b["resonator_frequency"] = c.bath.resonator_frequency;
  b["kappa"] = c.bath.kappa;
  b["photon_number"] = c.bath.photon_number;
  b["detuning"] = c.bath.detuning;
  b["g"] = c.bath.g;
  b["spectrum_model"] = to_string(c.bath.spectrum_model);
  b["base_rate"] = c.bath.base_rate;
  if (c.bath.kms_temperature) b["kms_temperature"] = *c.bath.kms_temperature;

  json& t = root["target"];
  t["temperature_GHz"] = c.target.temperature;
  if (c.target.window) t["window"] = {c.target.window->omega_min, c.target.window->omega_max};
  t["window_mode"] = name_of(c.target.window_mode);

  json& r = root["run"];
  r["objective"] = to_string(c.run.objective);
  r["grid"] = c.run.grid;
  r["report_grid"] = c.run.report_grid;
  r["rate_points"] = c.run.rate_points;
  r["bins"] = c.run.bins;
  r["seeds"] = c.run.seeds;
  r["optimize"] = c.run.optimize;
  r["hold_photon_number"] = c.run.hold_photon_number;
  r["cap_filter"] = c.run.cap_filter;
  r["max_resonators"] = c.run.max_resonators;
  r["free_parameters"] = json::array();
  for (const auto& p : c.run.free_parameters) {
    r["free_parameters"].push_back(
        {{"kind", to_string(p.kind)}, {"resonator", p.resonator}, {"lower", p.lower},
         {"upper", p.upper}});
  }
  r["tolerances"] = {{"fixed_point", c.run.fixed_point_tolerance},
                     {"trace_distance", c.run.trace_distance_tolerance},
                     {"cp", c.run.cp_tolerance}};
  r["prefactor_log"] = c.run.prefactor_log == LogBase::natural ? "natural" : "base2";
  r["trajectory_steps"] = c.run.trajectory_steps;
  r["jobs"] = c.run.jobs;
  r["output_dir"] = c.run.output_dir;
  return root.dump(2);
}

void validate(const ExperimentConfig& c) {
  const SystemConfig& s = c.system;
  if (s.n == 0 || s.n > 8) throw ConfigError("config: system.n must be in [1, 8]");
  if (s.omegas.size() != s.n) throw ConfigError("config: system.omegas needs n entries");
  for (double w : s.omegas) positive(w, "system.omegas");
  if (s.j && s.j->size() != s.n - 1) throw ConfigError("config: system.J needs n - 1 entries");
  if (!(s.j_low <= s.j_high)) throw ConfigError("config: system.J_range must be ordered");
  if (s.ensemble_size < 1) throw ConfigError("config: system.ensemble_size must be >= 1");
  if (s.coupled_qubits) {
    if (s.coupled_qubits->empty()) throw ConfigError("config: system.coupled_qubits is empty");
    for (std::size_t q : *s.coupled_qubits) {
      if (q >= s.n) throw ConfigError("config: system.coupled_qubits entry out of range");
    }
  }

  const BathConfig& b = c.bath;
  positive(b.resonator_frequency, "bath.resonator_frequency");
  positive(b.kappa, "bath.kappa");
  if (!(b.photon_number >= 0.0)) throw ConfigError("config: bath.photon_number must be >= 0");
  if (!(b.resonator_frequency + b.detuning > 0.0)) {
    throw ConfigError("config: bath drive frequency resonator_frequency + detuning must be positive");
  }
  if (!std::isfinite(b.g)) throw ConfigError("config: bath.g must be finite");
  if (b.n_resonators < 1) throw ConfigError("config: bath.n_resonators must be >= 1");
  if (b.mode == BathMode::exact_kms) positive(b.base_rate, "bath.base_rate");
  if (b.kms_temperature) positive(*b.kms_temperature, "bath.kms_temperature");

  positive(c.target.temperature, "target.temperature_GHz");
  if (c.target.window) {
    try {
      validate(*c.target.window);
    } catch (const ArgumentError& e) {
      throw ConfigError(std::string("config: target.window: ") + e.what());
    }
  }

  const RunConfig& r = c.run;
  if (r.grid == 0 || r.report_grid == 0 || r.rate_points == 0 || r.bins == 0) {
    throw ConfigError("config: run grid sizes must be positive");
  }
  if (r.seeds == 0) throw ConfigError("config: run.seeds must be >= 1");
  if (r.max_resonators == 0) throw ConfigError("config: run.max_resonators must be >= 1");
  if (r.jobs == 0) throw ConfigError("config: run.jobs must be >= 1");
  for (const auto& p : r.free_parameters) {
    if (p.resonator >= b.n_resonators) {
      throw ConfigError("config: free parameter refers to a missing resonator");
    }
    if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper)) {
      throw ConfigError("config: free parameter bounds must be finite with lower < upper");
    }
  }
  if (r.output_dir.empty()) throw ConfigError("config: run.output_dir is empty");
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> member_couplings(const SystemConfig& system, std::size_t member) {
  if (system.j) return *system.j;
  Rng rng(system.rng_seed + member);
  std::vector<double> j(system.n > 0 ? system.n - 1 : 0);
  for (double& v : j) v = rng.uniform(system.j_low, system.j_high);
  return j;
}

Operator member_hamiltonian(const SystemConfig& system, std::size_t member) {
  const std::vector<double> j = member_couplings(system, member);
  if (system.model == SystemKind::transverse_ising) {
    return transverse_ising_hamiltonian(system.n, system.transverse_a, system.transverse_b, j);
  }
  return ising_chain_hamiltonian(system.n, system.omegas, j);
}

std::vector<Operator> member_coupling_operators(const SystemConfig& system) {
  const std::vector<Operator> all = pauli_x_couplings(system.n);
  if (!system.coupled_qubits) return all;
  std::vector<Operator> out;
  for (std::size_t q : *system.coupled_qubits) out.push_back(all[q]);
  return out;
}

EnergyWindow member_window(const ExperimentConfig& config, const SpectralDecomposition& decomp,
                           std::span<const Operator> couplings) {
  if (config.target.window) return *config.target.window;
  const SystemConfig& s = config.system;
  if (config.target.window_mode == WindowMode::uniform_bound &&
      s.model == SystemKind::ising_chain) {
    double bound = std::max(std::abs(s.j_low), std::abs(s.j_high));
    if (s.j) {
      bound = 0.0;
      for (double v : *s.j) bound = std::max(bound, std::abs(v));
    }
    return chain_window_uniform_bound(s.omegas, bound);
  }
  return energy_window(decomp, couplings);
}

ResonatorDesign base_design(const ExperimentConfig& config) {
  const BathConfig& b = config.bath;
  const std::size_t channels = member_coupling_operators(config.system).size();
  ResonatorDesign design;
  for (std::size_t nu = 0; nu < b.n_resonators; ++nu) {
    Resonator r;
    r.frequency = b.resonator_frequency;
    r.kappa = b.kappa;
    r.drive_frequency = b.resonator_frequency + b.detuning;
    r.drive_amplitude = drive_amplitude_for(b.photon_number, b.detuning, b.kappa);
    design.resonators.push_back(r);
  }
  design.couplings = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(channels),
                                               static_cast<Eigen::Index>(b.n_resonators), b.g);
  return design;
}

DesignProblem design_problem(const ExperimentConfig& config, const Operator& hamiltonian,
                             const std::vector<Operator>& couplings, const EnergyWindow& window) {
  DesignProblem p;
  p.temperature = config.target.temperature;
  p.window = window;
  p.objective = config.run.objective;
  p.model = config.bath.spectrum_model;
  p.base = base_design(config);
  p.hold_photon_number = config.run.hold_photon_number;
  p.grid = config.run.grid;
  p.report_grid = config.run.report_grid;
  for (const auto& fp : config.run.free_parameters) {
    p.free_parameters.push_back({fp.kind, fp.resonator, fp.lower, fp.upper});
  }
  p.system = SystemModel{hamiltonian, couplings};
  return p;
}

}  // namespace thermalbath
