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

// thermalbath <command> [--config PATH] [--seed U64] [--jobs N] [--out DIR]
//             [--objective minimax|integral] [--grid N]
//
// Exit codes: 0 success, 1 verification failure, 2 config error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "thermalbath/config.hpp"
#include "thermalbath/errors.hpp"
#include "thermalbath/experiments.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> out;
  std::optional<std::string> objective;
  std::optional<std::size_t> grid;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "Experiment config (JSON)");
  sub->add_option("--seed", o.seed, "Base RNG seed; member i uses seed + i");
  sub->add_option("--jobs", o.jobs, "Concurrent ensemble members")->check(CLI::PositiveNumber);
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--objective", o.objective, "Design objective")
      ->check(CLI::IsMember({"minimax", "integral"}));
  sub->add_option("--grid", o.grid, "Objective grid points per window side")
      ->check(CLI::PositiveNumber);
}

thermalbath::ExperimentConfig resolve(const Overrides& o) {
  using namespace thermalbath;
  ExperimentConfig c = o.config_path.empty() ? parse_config("{}") : load_config(o.config_path);
  if (o.seed) c.system.rng_seed = *o.seed;
  if (o.jobs) c.run.jobs = *o.jobs;
  if (o.out) c.run.output_dir = *o.out;
  if (o.objective) c.run.objective = objective_from_string(*o.objective);
  if (o.grid) c.run.grid = *o.grid;
  validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Engineered thermal baths for quantum systems"};
  app.set_version_flag("--version", thermalbath::kVersion);
  app.require_subcommand(1);
  Overrides o;
  const std::pair<const char*, const char*> commands[] = {
      {"chain-example", "Ising-chain ensemble: optimized detuning, rates, fidelity"},
      {"verify", "Fixed-point, ergodicity, positivity and precision-bound checks"},
      {"design", "Optimize resonator parameters against the thermalization condition"},
      {"rates", "Heating and cooling rate curves over the energy window"},
      {"steady-state", "Steady states of the engineered generator"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const thermalbath::Command command =
        thermalbath::command_from_string(app.get_subcommands().front()->get_name());
    const thermalbath::ExperimentConfig config = resolve(o);
    const thermalbath::RunOutcome outcome = thermalbath::run(command, config);
    for (const std::string& f : outcome.failures) std::cerr << "FAILED " << f << '\n';
    std::cout << config.run.output_dir << '\n';
    return outcome.exit_code;
  } catch (const thermalbath::ArgumentError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
