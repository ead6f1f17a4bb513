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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "thermalbath/config.hpp"
#include "thermalbath/experiments.hpp"

using namespace thermalbath;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<double>> read_csv(const fs::path& p, std::string* header = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("thermalbath_test_config_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("defaults and round trip") {
  const auto c = parse_config("{}");
  CHECK(c.system.n == 3);
  CHECK(c.system.omegas == std::vector<double>{2.5, 2.5, 2.5});
  CHECK(c.bath.resonator_frequency == 3.1);
  CHECK(c.bath.kappa == 0.62);
  CHECK(c.bath.g == 0.3);
  CHECK(c.run.objective == Objective::integral);
  CHECK(parse_config(serialize_config(c)) == c);

  const auto custom = parse_config(R"({
    "system": {"model": "transverse_ising", "n": 2, "omegas": 1.5, "J": [0.3], "a": 0.7, "b": 1.1,
               "ensemble_size": 3, "rng_seed": 9, "coupled_qubits": [0]},
    "bath": {"mode": "exact_kms", "base_rate": 0.02, "kms_temperature": 3.0, "spectrum_model": "composite"},
    "target": {"temperature_GHz": 2.0, "window": [1.0, 4.0], "window_mode": "spectral"},
    "run": {"objective": "minimax", "grid": 101, "free_parameters": [
              {"kind": "kappa", "resonator": 0, "lower": 0.1, "upper": 0.5}],
            "tolerances": {"fixed_point": 1e-8, "trace_distance": 1e-5, "cp": 1e-7},
            "prefactor_log": "base2", "jobs": 2, "output_dir": "x"}
  })");
  CHECK(custom.system.omegas == std::vector<double>{1.5, 1.5});
  CHECK(custom.system.model == SystemKind::transverse_ising);
  CHECK(custom.run.prefactor_log == LogBase::base2);
  CHECK(custom.run.free_parameters.at(0).kind == ParameterKind::kappa);
  CHECK(custom.target.window.has_value());
  CHECK(parse_config(serialize_config(custom)) == custom);
  CHECK(serialize_config(parse_config(serialize_config(custom))) == serialize_config(custom));
}

TEST_CASE("invalid configs are rejected") {
  CHECK_THROWS_AS(parse_config("{\"foo\": 1}"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"system": {"spin": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"system": {"ensemble_size": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"system": {"omegas": [2.5, -1.0, 2.5]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"system": {"n": 2, "omegas": [2.5, 2.5, 2.5]}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"bath": {"kappa": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"target": {"temperature_GHz": -1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"run": {"objective": "fastest"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"run": {"grid": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"system": {"n": "three"}})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/thermalbath.json"), ConfigError);
}

TEST_CASE("FNV-1a reference vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("ensemble members") {
  const auto c = parse_config(R"({"system": {"ensemble_size": 50, "rng_seed": 4}})");
  for (std::size_t i = 0; i < 50; ++i) {
    const auto j = member_couplings(c.system, i);
    REQUIRE(j.size() == 2);
    for (double v : j) {
      CHECK(v >= -0.1);
      CHECK(v <= 0.1);
    }
    CHECK(j == member_couplings(c.system, i));
    // Member i uses the stream seeded with base + i.
    const auto shifted = parse_config(R"({"system": {"ensemble_size": 50, "rng_seed": 5}})");
    if (i + 1 < 50) CHECK(member_couplings(c.system, i + 1) == member_couplings(shifted.system, i));

    const Operator h = member_hamiltonian(c.system, i);
    const auto d = spectral_decomposition(h);
    const auto s = member_coupling_operators(c.system);
    const auto w = member_window(c, d, s);
    CHECK(w.omega_min == 4.6);
    CHECK(w.omega_max == 5.4);
    const auto exact = energy_window(d, s);
    CHECK(exact.omega_min >= 4.6 - 1e-12);
    CHECK(exact.omega_max <= 5.4 + 1e-12);
  }
  const auto fixed = parse_config(R"({"system": {"J": [0.05, -0.02]}})");
  CHECK(member_couplings(fixed.system, 3) == std::vector<double>{0.05, -0.02});
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.022064) == "2.206400000e-02");
  CHECK(format_number(-0.0) == "0.000000000e+00");
  CHECK(format_number(5.0) == "5.000000000e+00");
  CHECK(command_from_string("steady-state") == Command::steady_state);
  CHECK(to_string(Command::chain_example) == "chain-example");
  CHECK_THROWS(command_from_string("plot"));
}

namespace {

// Runs one fixed-J member and checks every emitted rate against the formula.
void check_member_rates(const std::string& json_text, const std::string& name,
                        std::size_t expected_rows) {
  const fs::path dir = scratch(name);
  auto c = parse_config(json_text);
  c.run.output_dir = dir.string();
  const auto outcome = run_chain_example(c);
  CHECK(outcome.exit_code == 0);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  const auto& m = summary["members"][0];
  const double detuning = m["detuning"];
  const double nbar = m["photon_number"];
  const double lo = m["window"][0];
  const double hi = m["window"][1];
  CHECK(detuning < 0.0);
  std::string header;
  const auto rows = read_csv(dir / "members" / "member_000_rates.csv", &header);
  CHECK(header == csv::kRatesCapped);
  REQUIRE(rows.size() == expected_rows);
  CHECK(rows.front()[0] == doctest::Approx(lo));
  CHECK(rows.back()[0] == doctest::Approx(hi));
  for (const auto& r : rows) {
    CHECK(r[2] == doctest::Approx(oracle::rate(r[0], nbar, 0.62, detuning, 3.1, 0.3)).epsilon(1e-8));
    CHECK(r[1] == doctest::Approx(oracle::rate(-r[0], nbar, 0.62, detuning, 3.1, 0.3)).epsilon(1e-8));
    CHECK(r[5] <= 0.062 * (1 + 1e-9));
  }
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["command"] == "chain-example");
  CHECK(std::string(manifest["config_hash"]).rfind("fnv1a64:", 0) == 0);
  for (const auto& f : manifest["files"]) CHECK(fs::exists(dir / std::string(f)));
  fs::remove_all(dir);
}

}  // namespace

TEST_CASE("single fixed member reproduces the rate model") {
  // Uncoupled chain: every flip costs exactly 5 GHz, so the window is one point.
  check_member_rates(R"({"system": {"J": [0.0, 0.0], "ensemble_size": 1}, "run": {"seeds": 2}})",
                     "chain_flat", 1);
  check_member_rates(R"({"system": {"J": [0.05, -0.08], "ensemble_size": 1}, "run": {"seeds": 2}})",
                     "chain_coupled", 81);
}

TEST_CASE("verify passes on an exact spectrum and fails on a disconnected one") {
  const fs::path dir = scratch("verify");
  auto ok = parse_config(R"({"system": {"n": 2, "omegas": [1.0, 1.3], "J": [0.2]},
                             "bath": {"mode": "exact_kms", "base_rate": 0.05},
                             "target": {"temperature_GHz": 1.0}})");
  ok.run.output_dir = (dir / "ok").string();
  const auto a = run_verify(ok);
  CHECK(a.exit_code == 0);
  CHECK(a.failures.empty());

  auto bad = ok;
  bad.system.coupled_qubits = std::vector<std::size_t>{1};
  bad.run.output_dir = (dir / "bad").string();
  const auto b = run_verify(bad);
  CHECK(b.exit_code == 1);
  CHECK(std::any_of(b.failures.begin(), b.failures.end(),
                    [](const std::string& f) { return f.find("ergodicity") != std::string::npos; }));
  fs::remove_all(dir);
}

TEST_CASE("design sweep over resonator count") {
  const fs::path dir = scratch("design");
  auto c = parse_config(R"({"system": {"J": [0.04, -0.06]}, "run": {"seeds": 2, "max_resonators": 3}})");
  c.run.output_dir = dir.string();
  CHECK(run_design(c).exit_code == 0);
  const auto design = nlohmann::json::parse(slurp(dir / "design.json"));
  (void)design;
  const auto pareto = read_csv(dir / "pareto.csv");
  REQUIRE(pareto.size() == 3);
  for (std::size_t i = 1; i < pareto.size(); ++i) CHECK(pareto[i][1] <= pareto[i - 1][1]);
  fs::remove_all(dir);
}
