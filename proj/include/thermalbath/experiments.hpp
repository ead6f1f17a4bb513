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

// Experiment runners behind the command-line tool. Every run writes one
// directory:
//
//   manifest.json   command, config hash, canonical config, file list
//   summary.json    ensemble-level results
//   members/*.csv   per-member tables
//
// No timestamps or host data are written, so a fixed seed reproduces every
// byte.

#ifndef THERMALBATH_EXPERIMENTS_HPP
#define THERMALBATH_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "thermalbath/config.hpp"

namespace thermalbath {

inline constexpr const char* kVersion = "0.1.0";

namespace csv {
inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kRates =
    "omega_GHz,heating_GHz,cooling_GHz,sweep_GHz";
inline constexpr const char* kRatesCapped =
    "omega_GHz,heating_GHz,cooling_GHz,sweep_GHz,heating_capped_GHz,cooling_capped_GHz,"
    "sweep_capped_GHz";
inline constexpr const char* kTransitions = "omega_GHz,multiplicity,heating_GHz,cooling_GHz";
inline constexpr const char* kBinned =
    "omega_lo_GHz,omega_hi_GHz,count,heating_mean_GHz,cooling_mean_GHz,sweep_mean_GHz";
inline constexpr const char* kEnsembleRates =
    "omega_GHz,heating_mean_GHz,cooling_mean_GHz,sweep_mean_GHz,heating_capped_mean_GHz,"
    "cooling_capped_mean_GHz";
inline constexpr const char* kVerify = "member,check,value,threshold,pass";
inline constexpr const char* kKms =
    "omega_GHz,gamma_pos_GHz,gamma_neg_GHz,violation_GHz,ratio_deviation";
inline constexpr const char* kPareto =
    "n_resonators,objective,minimax,integral,gibbs_fidelity,converged";
inline constexpr const char* kDensity = "row,col,re,im";
/// Followed by one population_k column per eigenvector (ascending energy).
inline constexpr const char* kTrajectoryPrefix = "t_ns,trace_distance_to_gibbs";
}  // namespace csv

enum class Command { chain_example, verify, design, rates, steady_state };

Command command_from_string(const std::string& name);
std::string to_string(Command command);

struct RunOutcome {
  int exit_code = 0;                  // 0 ok, 1 verification failure
  std::vector<std::string> files;     // relative to the output directory
  std::vector<std::string> failures;  // failing check names (verify)
  std::string summary;                // summary.json contents
};

RunOutcome run_chain_example(const ExperimentConfig& config);
RunOutcome run_verify(const ExperimentConfig& config);
RunOutcome run_design(const ExperimentConfig& config);
RunOutcome run_rates(const ExperimentConfig& config);
RunOutcome run_steady_state(const ExperimentConfig& config);

RunOutcome run(Command command, const ExperimentConfig& config);

/// "%.9e": ten significant digits.
std::string format_number(double v);

}  // namespace thermalbath

#endif  // THERMALBATH_EXPERIMENTS_HPP
