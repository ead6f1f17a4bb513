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

#include "thermalbath/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "thermalbath/bath.hpp"
#include "thermalbath/designopt.hpp"
#include "thermalbath/dispersive.hpp"
#include "thermalbath/errors.hpp"
#include "thermalbath/lindblad.hpp"
#include "thermalbath/precision.hpp"

namespace thermalbath {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class OutputDir {
 public:
  explicit OutputDir(const std::string& root) : root_(root) {
    fs::create_directories(root_ / "members");
  }

  void write(const std::string& rel, const std::string& body) {
    std::ofstream out(root_ / rel, std::ios::binary);
    if (!out) throw Error("cannot write '" + (root_ / rel).string() + "'");
    out << body;
  }

  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
};

class CsvTable {
 public:
  explicit CsvTable(const std::string& header) { body_ << header << '\n'; }

  CsvTable& row(std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
      if (!first) body_ << ',';
      body_ << c;
      first = false;
    }
    body_ << '\n';
    return *this;
  }

  std::string str() const { return body_.str(); }

 private:
  std::ostringstream body_;
};

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::string member_name(std::size_t i, const std::string& what) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "member_%03zu", i);
  return "members/" + std::string(buf) + "_" + what + ".csv";
}

struct Member {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::vector<double> j;
  Operator hamiltonian;
  std::vector<Operator> couplings;
  SpectralDecomposition decomp;
  EnergyWindow window;
};

Member make_member(const ExperimentConfig& config, std::size_t i) {
  const Operator h = member_hamiltonian(config.system, i);
  Member m{i,
           config.system.rng_seed + i,
           member_couplings(config.system, i),
           h,
           member_coupling_operators(config.system),
           spectral_decomposition(h),
           {}};
  m.window = member_window(config, m.decomp, m.couplings);
  return m;
}

/// Runs body(i) for every member on up to `jobs` threads; results stay indexed.
template <typename R>
std::vector<R> for_members(std::size_t count, std::size_t jobs,
                           const std::function<R(std::size_t)>& body) {
  std::vector<R> out(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        out[i] = body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(count, 1));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

json window_json(const EnergyWindow& w) { return json::array({w.omega_min, w.omega_max}); }

json design_json(const ResonatorDesign& design) {
  json res = json::array();
  for (std::size_t nu = 0; nu < design.n_resonators(); ++nu) {
    const Resonator& r = design.resonators[nu];
    res.push_back({{"drive_amplitude", r.drive_amplitude},
                   {"drive_frequency", r.drive_frequency},
                   {"kappa", r.kappa},
                   {"resonator_frequency", r.frequency},
                   {"detuning", r.detuning()},
                   {"photon_number", photon_number(design, nu)}});
  }
  json g = json::array();
  for (Eigen::Index a = 0; a < design.couplings.rows(); ++a) {
    json row = json::array();
    for (Eigen::Index nu = 0; nu < design.couplings.cols(); ++nu) row.push_back(design.couplings(a, nu));
    g.push_back(row);
  }
  return {{"resonators", res}, {"couplings", g}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json criterion_json(const Criterion& c) {
  return {{"ok", c.ok}, {"ratio", std::isfinite(c.ratio) ? json(c.ratio) : json("inf")},
          {"threshold", c.threshold}};
}

json regime_json(const RegimeReport& r) {
  return {{"dispersive", criterion_json(r.dispersive)}, {"born", criterion_json(r.born)},
          {"markov", criterion_json(r.markov)},         {"leakage", criterion_json(r.leakage)},
          {"purcell", criterion_json(r.purcell)},       {"max_rate", r.max_rate},
          {"all_ok", r.all_ok()}};
}

json result_json(const DesignResult& r, Objective objective) {
  json starts = json::array();
  for (const StartRecord& s : r.starts) {
    starts.push_back({{"x0", std::vector<double>(s.x0.data(), s.x0.data() + s.x0.size())},
                      {"initial_value", std::isfinite(s.initial_value) ? json(s.initial_value) : json("inf")},
                      {"final_value", std::isfinite(s.final_value) ? json(s.final_value) : json("inf")},
                      {"iterations", s.iterations},
                      {"converged", s.converged}});
  }
  return {{"design", design_json(r.design)},
          {"objective", to_string(objective)},
          {"objective_value", r.objective_value},
          {"minimax_value", r.minimax_value},
          {"integral_value", optional_json(r.integral_value)},
          {"kms_report",
           {{"max_abs", r.kms_report.max_abs},
            {"argmax_omega", r.kms_report.argmax_omega},
            {"ratio_integral", optional_json(r.kms_report.ratio_integral)},
            {"n_samples", r.kms_report.n_samples}}},
          {"gibbs_fidelity", optional_json(r.gibbs_fidelity)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"best_start", r.best_start},
          {"starts", starts}};
}

/// The design for a member: optimized when run.optimize, the configured one otherwise.
DesignResult member_design(const ExperimentConfig& config, const Member& m) {
  DesignProblem problem = design_problem(config, m.hamiltonian, m.couplings, m.window);
  if (config.run.optimize && !config.run.free_parameters.empty()) {
    return optimize(problem, config.run.seeds, m.seed, 1);
  }
  DesignResult r;
  r.design = problem.base;
  r.converged = true;
  r.objective_value = evaluate_objective(problem, r.design);
  r.minimax_value = evaluate_objective(problem, r.design, Objective::minimax, problem.report_grid);
  try {
    r.integral_value =
        evaluate_objective(problem, r.design, Objective::integral, problem.report_grid);
  } catch (const RatioUndefinedError&) {
  }
  KmsResidualOptions opts;
  opts.n_samples = problem.report_grid;
  opts.compute_ratio = r.integral_value.has_value();
  r.kms_report = kms_residual(build_spectrum(problem.model, r.design), problem.temperature,
                              problem.window, opts);
  try {
    r.gibbs_fidelity = design_fidelity(problem, r.design);
  } catch (const NonErgodicError&) {
  }
  return r;
}

SingleResonator single_resonator(const ResonatorDesign& design) {
  const Resonator& r = design.resonators.front();
  return {photon_number(design, 0), r.kappa, r.detuning(), r.frequency};
}

struct CurveRow {
  RatePoint point;
  double heating_capped = 0.0;
  double cooling_capped = 0.0;
};

std::vector<CurveRow> capped_curve(const ExperimentConfig& config, const EnergyWindow& window,
                                   const SingleResonator& res) {
  const std::vector<RatePoint> curve =
      rate_curve(window, res, config.bath.g, config.run.rate_points);
  const double cap = res.kappa / 10.0;
  const double factor = rate_cap_factor(curve, cap);
  std::vector<CurveRow> rows;
  for (const RatePoint& p : curve) {
    rows.push_back({p, p.heating * factor, std::min(p.cooling * factor, cap)});
  }
  return rows;
}

std::string curve_csv(const ExperimentConfig& config, const std::vector<CurveRow>& rows) {
  CsvTable t(config.run.cap_filter ? csv::kRatesCapped : csv::kRates);
  for (const CurveRow& r : rows) {
    if (config.run.cap_filter) {
      t.row({num(r.point.omega), num(r.point.heating), num(r.point.cooling), num(r.point.sweep()),
             num(r.heating_capped), num(r.cooling_capped),
             num(r.heating_capped + r.cooling_capped)});
    } else {
      t.row({num(r.point.omega), num(r.point.heating), num(r.point.cooling),
             num(r.point.sweep())});
    }
  }
  return t.str();
}

void write_manifest(OutputDir& out, Command command, const ExperimentConfig& config,
                    std::vector<std::string> files) {
  files.push_back("summary.json");
  std::sort(files.begin(), files.end());
  // Output location and thread count do not change results.
  json cfg = json::parse(serialize_config(config));
  cfg["run"].erase("output_dir");
  cfg["run"].erase("jobs");
  const std::string canonical = cfg.dump();
  json m = {{"tool", "thermalbath"},
            {"version", kVersion},
            {"command", to_string(command)},
            {"config_hash", "fnv1a64:" + fnv1a_hex(canonical)},
            {"config", cfg},
            {"csv_schema_version", csv::kSchemaVersion},
            {"files", files}};
  out.write("manifest.json", m.dump(2) + "\n");
}

RunOutcome finish(OutputDir& out, Command command, const ExperimentConfig& config,
                  std::vector<std::string> files, const json& summary) {
  RunOutcome o;
  o.summary = summary.dump(2) + "\n";
  out.write("summary.json", o.summary);
  write_manifest(out, command, config, files);
  files.push_back("summary.json");
  files.push_back("manifest.json");
  std::sort(files.begin(), files.end());
  o.files = std::move(files);
  return o;
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // no negative zero
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9e", v);
  return buf;
}

Command command_from_string(const std::string& name) {
  for (Command c : {Command::chain_example, Command::verify, Command::design, Command::rates,
                    Command::steady_state}) {
    if (to_string(c) == name) return c;
  }
  throw ArgumentError("unknown command '" + name + "'");
}

std::string to_string(Command command) {
  switch (command) {
    case Command::chain_example: return "chain-example";
    case Command::verify: return "verify";
    case Command::design: return "design";
    case Command::rates: return "rates";
    case Command::steady_state: return "steady-state";
  }
  return "chain-example";
}

RunOutcome run_chain_example(const ExperimentConfig& config) {
  if (config.bath.mode != BathMode::resonators) {
    throw ConfigError("chain-example requires bath.mode = resonators");
  }
  OutputDir out(config.run.output_dir);

  struct MemberReport {
    json record;
    std::vector<CurveRow> curve;
    std::vector<std::array<double, 3>> transitions;  // omega, heating, cooling
    std::optional<double> fidelity;
    EnergyWindow window;
    std::vector<std::string> files;
  };

  const auto reports = for_members<MemberReport>(
      config.system.ensemble_size, config.run.jobs, [&](std::size_t i) {
        const Member m = make_member(config, i);
        MemberReport rep;
        rep.window = m.window;
        const DesignResult dr = member_design(config, m);
        const SingleResonator res = single_resonator(dr.design);

        json regime;
        try {
          regime = regime_json(build_dispersive_model(m.decomp, m.couplings, dr.design).validity);
        } catch (const DispersiveError& e) {
          regime = {{"error", e.what()}, {"all_ok", false}};
        }

        rep.curve = capped_curve(config, m.window, res);
        const std::string rates_file = member_name(i, "rates");
        out.write(rates_file, curve_csv(config, rep.curve));

        CsvTable tt(csv::kTransitions);
        for (const auto& [omega, count] : gen_count(m.decomp, m.couplings).per_omega) {
          if (omega <= 0.0) continue;
          const double heat = rate_model(-omega, res, config.bath.g);
          const double cool = rate_model(omega, res, config.bath.g);
          rep.transitions.push_back({omega, heat, cool});
          tt.row({num(omega), num(count), num(heat), num(cool)});
        }
        const std::string trans_file = member_name(i, "transitions");
        out.write(trans_file, tt.str());

        rep.fidelity = dr.gibbs_fidelity;
        rep.files = {rates_file, trans_file};
        rep.record = {{"member", i},
                      {"seed", m.seed},
                      {"J", m.j},
                      {"window", window_json(m.window)},
                      {"detuning", res.detuning},
                      {"photon_number", res.photon_number},
                      {"objective_value", dr.objective_value},
                      {"minimax_value", dr.minimax_value},
                      {"integral_value", optional_json(dr.integral_value)},
                      {"converged", dr.converged},
                      {"gibbs_fidelity", optional_json(dr.gibbs_fidelity)},
                      {"regime", regime},
                      {"rate_cap_GHz", res.kappa / 10.0}};
        return rep;
      });

  std::vector<std::string> files;
  json members = json::array();
  double fsum = 0.0;
  double fmin = 1.0;
  std::size_t fcount = 0;
  double lo = reports.front().window.omega_min;
  double hi = reports.front().window.omega_max;
  bool same_window = true;
  for (const MemberReport& r : reports) {
    files.insert(files.end(), r.files.begin(), r.files.end());
    members.push_back(r.record);
    if (r.fidelity) {
      fsum += *r.fidelity;
      fmin = std::min(fmin, *r.fidelity);
      ++fcount;
    }
    same_window = same_window && r.window.omega_min == lo && r.window.omega_max == hi;
    lo = std::min(lo, r.window.omega_min);
    hi = std::max(hi, r.window.omega_max);
  }

  // Per-transition scatter averaged in omega bins.
  const std::size_t nb = config.run.bins;
  std::vector<double> heat(nb, 0.0), cool(nb, 0.0);
  std::vector<std::size_t> count(nb, 0);
  const double width = (hi - lo) / static_cast<double>(nb);
  for (const MemberReport& r : reports) {
    for (const auto& [omega, h, c] : r.transitions) {
      std::size_t b = 0;
      if (width > 0.0) {
        b = std::min(nb - 1, static_cast<std::size_t>(std::max(0.0, (omega - lo) / width)));
      }
      heat[b] += h;
      cool[b] += c;
      ++count[b];
    }
  }
  CsvTable binned(csv::kBinned);
  for (std::size_t b = 0; b < nb; ++b) {
    const double n = static_cast<double>(std::max<std::size_t>(count[b], 1));
    binned.row({num(lo + width * static_cast<double>(b)),
                num(lo + width * static_cast<double>(b + 1)), num(count[b]), num(heat[b] / n),
                num(cool[b] / n), num((heat[b] + cool[b]) / n)});
  }
  out.write("members/ensemble_binned.csv", binned.str());
  files.push_back("members/ensemble_binned.csv");

  if (same_window) {
    CsvTable mean(csv::kEnsembleRates);
    const std::size_t npts = reports.front().curve.size();
    const double nm = static_cast<double>(reports.size());
    for (std::size_t k = 0; k < npts; ++k) {
      double h = 0, c = 0, hc = 0, cc = 0;
      for (const MemberReport& r : reports) {
        h += r.curve[k].point.heating;
        c += r.curve[k].point.cooling;
        hc += r.curve[k].heating_capped;
        cc += r.curve[k].cooling_capped;
      }
      mean.row({num(reports.front().curve[k].point.omega), num(h / nm), num(c / nm),
                num((h + c) / nm), num(hc / nm), num(cc / nm)});
    }
    out.write("members/ensemble_rates.csv", mean.str());
    files.push_back("members/ensemble_rates.csv");
  }

  json summary = {{"command", "chain-example"},
                  {"ensemble_size", reports.size()},
                  {"temperature_GHz", config.target.temperature},
                  {"window", json::array({lo, hi})},
                  {"fidelity_count", fcount},
                  {"mean_fidelity", fcount ? json(fsum / static_cast<double>(fcount)) : json(nullptr)},
                  {"min_fidelity", fcount ? json(fmin) : json(nullptr)},
                  {"rate_cap_GHz", config.bath.kappa / 10.0},
                  {"members", members}};
  return finish(out, Command::chain_example, config, files, summary);
}

RunOutcome run_verify(const ExperimentConfig& config) {
  OutputDir out(config.run.output_dir);
  struct Check {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
  };

  const auto results = for_members<std::vector<Check>>(
      config.system.ensemble_size, config.run.jobs, [&](std::size_t i) {
        const Member m = make_member(config, i);
        const double temp = config.target.temperature;
        std::vector<Check> checks;

        BathSpectrum spectrum;
        if (config.bath.mode == BathMode::exact_kms) {
          spectrum = BathSpectrum::exact_kms(m.couplings.size(), config.bath.base_rate,
                                             config.bath.kms_temperature.value_or(temp));
        } else {
          spectrum = build_spectrum(config.bath.spectrum_model, member_design(config, m).design);
        }
        const LindbladGenerator gen = build_generator(m.decomp, m.couplings, spectrum);
        const GibbsState gibbs = gibbs_state(m.decomp, temp);

        const ErgodicityReport erg = ergodicity_check(m.decomp, m.couplings);
        checks.push_back({"ergodicity", static_cast<double>(erg.components.size()), 1.0,
                          erg.ergodic});

        const double trace_defect = trace_preservation_defect(gen);
        checks.push_back({"trace_preservation", trace_defect, config.run.fixed_point_tolerance,
                          trace_defect <= config.run.fixed_point_tolerance});
        const double herm = hermiticity_preservation_defect(gen, gibbs.density);
        checks.push_back({"hermiticity_preservation", herm, config.run.fixed_point_tolerance,
                          herm <= config.run.fixed_point_tolerance});

        const double norm = gen.superoperator().norm();
        const double dt = norm > 0.0 ? 1e-3 / norm : 1.0;
        const double choi = choi_min_eigenvalue(gen, dt);
        checks.push_back({"complete_positivity", choi, -config.run.cp_tolerance,
                          choi >= -config.run.cp_tolerance});

        if (config.bath.mode == BathMode::exact_kms) {
          const double fp = verify_fixed_point(gen, gibbs.density);
          checks.push_back({"gibbs_fixed_point", fp, config.run.fixed_point_tolerance,
                            fp <= config.run.fixed_point_tolerance});
        }

        try {
          const SteadyState ss = steady_state(gen);
          checks.push_back({"steady_state_residual", ss.residual, config.run.fixed_point_tolerance,
                            ss.residual <= config.run.fixed_point_tolerance});
          if (config.bath.mode == BathMode::exact_kms) {
            const double td = trace_norm(ss.rho - gibbs.density);
            checks.push_back({"gibbs_trace_distance", td, config.run.trace_distance_tolerance,
                              td <= config.run.trace_distance_tolerance});
          }
          PrecisionOptions popts;
          popts.prefactor_log = config.run.prefactor_log;
          if (config.system.model == SystemKind::ising_chain) {
            popts.hamiltonian_class = HamiltonianClass::ising;
          }
          const PrecisionReport pr =
              precision_bound(gen, spectrum, m.decomp, m.couplings, temp, m.window, popts);
          checks.push_back({"precision_bound", pr.lhs, pr.rhs_bound, pr.holds});
        } catch (const NonErgodicError& e) {
          checks.push_back({"steady_state_unique", static_cast<double>(e.kernel_dimension()), 1.0,
                            false});
        } catch (const GapUnresolvedError&) {
          checks.push_back({"precision_bound_gap", 0.0, 0.0, false});
        }
        return checks;
      });

  CsvTable table(csv::kVerify);
  RunOutcome partial;
  json per_check = json::object();
  for (std::size_t i = 0; i < results.size(); ++i) {
    for (const Check& c : results[i]) {
      table.row({num(i), c.name, num(c.value), num(c.threshold), c.pass ? "1" : "0"});
      json& slot = per_check[c.name];
      if (slot.is_null()) slot = {{"passed", 0}, {"failed", 0}};
      slot[c.pass ? "passed" : "failed"] = slot[c.pass ? "passed" : "failed"].get<int>() + 1;
      if (!c.pass) partial.failures.push_back("member " + std::to_string(i) + ": " + c.name);
    }
  }
  out.write("members/verify.csv", table.str());
  json summary = {{"command", "verify"},
                  {"ensemble_size", results.size()},
                  {"checks", per_check},
                  {"failures", partial.failures},
                  {"passed", partial.failures.empty()}};
  RunOutcome o = finish(out, Command::verify, config, {"members/verify.csv"}, summary);
  o.failures = std::move(partial.failures);
  o.exit_code = o.failures.empty() ? 0 : 1;
  return o;
}

RunOutcome run_design(const ExperimentConfig& config) {
  if (config.bath.mode != BathMode::resonators) {
    throw ConfigError("design requires bath.mode = resonators");
  }
  if (config.run.free_parameters.empty()) {
    throw ConfigError("design requires at least one run.free_parameters entry");
  }
  OutputDir out(config.run.output_dir);
  const Member m = make_member(config, 0);
  const DesignProblem problem = design_problem(config, m.hamiltonian, m.couplings, m.window);
  std::vector<std::string> files;

  DesignResult result;
  json pareto = json::array();
  if (config.run.max_resonators > 1) {
    const auto sweep = sweep_resonator_count(problem, config.run.max_resonators, config.run.seeds,
                                             m.seed, config.run.jobs);
    CsvTable t(csv::kPareto);
    for (const SweepPoint& p : sweep) {
      t.row({num(p.n_resonators), num(p.result.objective_value), num(p.result.minimax_value),
             p.result.integral_value ? num(*p.result.integral_value) : "nan",
             p.result.gibbs_fidelity ? num(*p.result.gibbs_fidelity) : "nan",
             p.result.converged ? "1" : "0"});
      pareto.push_back({{"n_resonators", p.n_resonators},
                        {"objective_value", p.result.objective_value}});
    }
    out.write("pareto.csv", t.str());
    files.push_back("pareto.csv");
    result = sweep.back().result;
  } else {
    result = optimize(problem, config.run.seeds, m.seed, config.run.jobs);
  }

  const std::vector<double> grid =
      uniform_grid(m.window.omega_min, m.window.omega_max, config.run.rate_points);
  auto kms_csv = [&](const ResonatorDesign& design) {
    const BathSpectrum s = build_spectrum(problem.model, design);
    CsvTable t(csv::kKms);
    for (double w : grid) {
      const Eigen::MatrixXd gp = s.gamma_matrix(w);
      const Eigen::MatrixXd gn = s.gamma_matrix(-w);
      const double boltz = std::exp(-w / problem.temperature);
      const double violation = (boltz * gp.transpose() - gn).cwiseAbs().maxCoeff();
      const double ratio = gp(0, 0) > 0.0 ? std::abs(gn(0, 0) / gp(0, 0) - boltz)
                                          : std::numeric_limits<double>::quiet_NaN();
      t.row({num(w), num(gp(0, 0)), num(gn(0, 0)), num(violation), num(ratio)});
    }
    return t.str();
  };
  out.write("kms_before.csv", kms_csv(problem.base));
  out.write("kms_after.csv", kms_csv(result.design));
  files.push_back("kms_before.csv");
  files.push_back("kms_after.csv");

  json result_doc = result_json(result, problem.objective);
  result_doc["problem"] = {{"temperature_GHz", problem.temperature},
                           {"window", window_json(problem.window)},
                           {"spectrum_model", to_string(problem.model)},
                           {"grid", problem.grid},
                           {"report_grid", problem.report_grid},
                           {"seeds", config.run.seeds},
                           {"rng_seed", m.seed}};
  out.write("design.json", result_doc.dump(2) + "\n");
  files.push_back("design.json");

  json summary = {{"command", "design"},
                  {"objective_value", result.objective_value},
                  {"converged", result.converged},
                  {"detuning", result.design.resonators.front().detuning()},
                  {"gibbs_fidelity", optional_json(result.gibbs_fidelity)},
                  {"pareto", pareto}};
  return finish(out, Command::design, config, files, summary);
}

RunOutcome run_rates(const ExperimentConfig& config) {
  OutputDir out(config.run.output_dir);
  const Member m = make_member(config, 0);
  const SingleResonator res = single_resonator(base_design(config));
  out.write("members/rates.csv", curve_csv(config, capped_curve(config, m.window, res)));
  json summary = {{"command", "rates"},
                  {"window", window_json(m.window)},
                  {"rate_cap_GHz", res.kappa / 10.0},
                  {"detuning", res.detuning},
                  {"photon_number", res.photon_number}};
  const double peak = -res.detuning;
  if (std::abs(std::abs(peak) - res.resonator_frequency) > 1e-6) {
    summary["rate_at_minus_detuning_GHz"] = rate_model(peak, res, config.bath.g);
  }
  return finish(out, Command::rates, config, {"members/rates.csv"}, summary);
}

RunOutcome run_steady_state(const ExperimentConfig& config) {
  OutputDir out(config.run.output_dir);
  struct Row {
    json record;
    std::string file;
    std::string traj_file;
  };
  const auto rows = for_members<Row>(
      config.system.ensemble_size, config.run.jobs, [&](std::size_t i) {
        const Member m = make_member(config, i);
        const double temp = config.target.temperature;
        BathSpectrum spectrum;
        std::vector<Operator> couplings = m.couplings;
        if (config.bath.mode == BathMode::exact_kms) {
          spectrum = BathSpectrum::exact_kms(m.couplings.size(), config.bath.base_rate,
                                             config.bath.kms_temperature.value_or(temp));
        } else {
          const ResonatorDesign design = member_design(config, m).design;
          spectrum = build_spectrum(config.bath.spectrum_model, design);
          if (config.bath.spectrum_model == SpectrumModel::composite) {
            couplings = coupling_operators(m.decomp, m.couplings, design).composite;
          }
        }
        const LindbladGenerator gen = build_generator(m.decomp, couplings, spectrum);
        Row row;
        row.record = {{"member", i}, {"seed", m.seed}, {"J", m.j}};
        try {
          const SteadyState ss = steady_state(gen);
          const GibbsState gibbs = gibbs_state(m.decomp, temp);
          CsvTable t(csv::kDensity);
          for (Eigen::Index r = 0; r < ss.rho.rows(); ++r) {
            for (Eigen::Index c = 0; c < ss.rho.cols(); ++c) {
              t.row({num(static_cast<std::size_t>(r)), num(static_cast<std::size_t>(c)),
                     num(ss.rho(r, c).real()), num(ss.rho(r, c).imag())});
            }
          }
          row.file = member_name(i, "rho");
          out.write(row.file, t.str());
          row.record["fidelity"] = fidelity(ss.rho, gibbs.density);
          row.record["trace_distance"] = trace_norm(ss.rho - gibbs.density);
          row.record["residual"] = ss.residual;
          row.record["path"] =
              ss.path == SteadyStatePath::least_squares ? "least_squares" : "eigenvector";
          if (config.run.trajectory_steps > 0) {
            try {
              const double lambda = spectral_gap(gen);
              row.record["gap_GHz"] = lambda;
              const auto d = static_cast<Eigen::Index>(m.decomp.dim());
              const Operator mixed = Operator::Identity(d, d) / static_cast<double>(d);
              const Trajectory traj =
                  propagate(gen, mixed, 20.0 / lambda, config.run.trajectory_steps);
              std::string header = csv::kTrajectoryPrefix;
              for (Eigen::Index k = 0; k < d; ++k) header += ",population_" + std::to_string(k);
              std::ostringstream body;
              body << header << '\n';
              for (std::size_t s = 0; s < traj.times.size(); ++s) {
                const Operator eig = m.decomp.to_eigenbasis(traj.states[s]);
                body << num(traj.times[s]) << ',' << num(trace_norm(traj.states[s] - gibbs.density));
                for (Eigen::Index k = 0; k < d; ++k) body << ',' << num(eig(k, k).real());
                body << '\n';
              }
              row.traj_file = member_name(i, "trajectory");
              out.write(row.traj_file, body.str());
            } catch (const GapUnresolvedError&) {
            }
          }
        } catch (const NonErgodicError& e) {
          row.record["error"] = e.what();
        }
        return row;
      });
  std::vector<std::string> files;
  json members = json::array();
  for (const Row& r : rows) {
    if (!r.file.empty()) files.push_back(r.file);
    if (!r.traj_file.empty()) files.push_back(r.traj_file);
    members.push_back(r.record);
  }
  json summary = {{"command", "steady-state"}, {"members", members}};
  return finish(out, Command::steady_state, config, files, summary);
}

RunOutcome run(Command command, const ExperimentConfig& config) {
  switch (command) {
    case Command::chain_example: return run_chain_example(config);
    case Command::verify: return run_verify(config);
    case Command::design: return run_design(config);
    case Command::rates: return run_rates(config);
    case Command::steady_state: return run_steady_state(config);
  }
  return run_chain_example(config);
}

}  // namespace thermalbath
