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

// Experiment configuration. JSON with four sections; unknown keys are rejected.
//
//   {
//     "system": {"model": "ising_chain", "n": 3, "omegas": [2.5, 2.5, 2.5],
//                "J_range": [-0.1, 0.1], "ensemble_size": 20, "rng_seed": 1},
//     "bath":   {"mode": "resonators", "resonator_frequency": 3.1, "kappa": 0.62,
//                "photon_number": 1.0, "detuning": -1.0, "g": 0.3},
//     "target": {"temperature_GHz": 5.0},
//     "run":    {"objective": "integral", "grid": 401, "output_dir": "out"}
//   }

#ifndef THERMALBATH_CONFIG_HPP
#define THERMALBATH_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thermalbath/designopt.hpp"
#include "thermalbath/errors.hpp"
#include "thermalbath/operators.hpp"
#include "thermalbath/precision.hpp"

namespace thermalbath {

/// Raised for malformed or inconsistent configuration; the CLI maps it to exit code 2.
class ConfigError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

enum class SystemKind { ising_chain, transverse_ising };
enum class BathMode { resonators, exact_kms };
enum class WindowMode { uniform_bound, spectral };

struct SystemConfig {
  SystemKind model = SystemKind::ising_chain;
  std::size_t n = 3;
  std::vector<double> omegas{2.5, 2.5, 2.5};
  std::optional<std::vector<double>> j;  // fixed nearest-neighbour couplings, length n - 1
  double j_low = -0.1;
  double j_high = 0.1;
  double transverse_a = 1.0;  // transverse_ising only
  double transverse_b = 1.0;
  std::size_t ensemble_size = 1;
  std::uint64_t rng_seed = 1;
  std::optional<std::vector<std::size_t>> coupled_qubits;  // default: all

  bool operator==(const SystemConfig&) const = default;
};

struct FreeParameterConfig {
  ParameterKind kind = ParameterKind::detuning;
  std::size_t resonator = 0;
  double lower = -3.0;
  double upper = 3.0;

  bool operator==(const FreeParameterConfig&) const = default;
};

struct BathConfig {
  BathMode mode = BathMode::resonators;
  std::size_t n_resonators = 1;
  double resonator_frequency = 3.1;
  double kappa = 0.62;
  double photon_number = 1.0;
  double detuning = -1.0;
  double g = 0.3;
  SpectrumModel spectrum_model = SpectrumModel::transition;
  double base_rate = 0.01;  // exact_kms
  std::optional<double> kms_temperature;  // exact_kms, default: target temperature

  bool operator==(const BathConfig&) const = default;
};

struct TargetConfig {
  double temperature = 5.0;
  std::optional<EnergyWindow> window;
  WindowMode window_mode = WindowMode::uniform_bound;

  bool operator==(const TargetConfig& o) const {
    const bool same_window =
        window.has_value() == o.window.has_value() &&
        (!window || (window->omega_min == o.window->omega_min &&
                     window->omega_max == o.window->omega_max));
    return temperature == o.temperature && same_window && window_mode == o.window_mode;
  }
};

struct RunConfig {
  Objective objective = Objective::integral;
  std::size_t grid = 401;
  std::size_t report_grid = 2001;
  std::size_t rate_points = 81;
  std::size_t bins = 16;
  std::size_t seeds = 4;
  bool optimize = true;
  bool hold_photon_number = true;
  bool cap_filter = true;
  std::size_t max_resonators = 1;
  std::vector<FreeParameterConfig> free_parameters{FreeParameterConfig{}};
  double fixed_point_tolerance = 1e-9;
  double trace_distance_tolerance = 1e-6;
  double cp_tolerance = 1e-8;
  LogBase prefactor_log = LogBase::natural;
  std::size_t trajectory_steps = 40;
  std::size_t jobs = 1;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

struct ExperimentConfig {
  SystemConfig system;
  BathConfig bath;
  TargetConfig target;
  RunConfig run;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates; throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON (sorted keys, all fields explicit).
std::string serialize_config(const ExperimentConfig& config);

void validate(const ExperimentConfig& config);

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Couplings for ensemble member i: the fixed list, or U[j_low, j_high] draws
/// from Rng(rng_seed + i).
std::vector<double> member_couplings(const SystemConfig& system, std::size_t member);

Operator member_hamiltonian(const SystemConfig& system, std::size_t member);
std::vector<Operator> member_coupling_operators(const SystemConfig& system);

/// Window override, the uniform-bound chain window, or the spectral window of the member.
EnergyWindow member_window(const ExperimentConfig& config, const SpectralDecomposition& decomp,
                           std::span<const Operator> couplings);

ResonatorDesign base_design(const ExperimentConfig& config);
DesignProblem design_problem(const ExperimentConfig& config, const Operator& hamiltonian,
                             const std::vector<Operator>& couplings, const EnergyWindow& window);

}  // namespace thermalbath

#endif  // THERMALBATH_CONFIG_HPP
