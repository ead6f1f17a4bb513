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

// Resonator design search against the thermalization conditions.
//
//   minimax:  max_omega |exp(omega/T) gamma(-omega) - gamma(omega)|
//   integral: int_{omega_min}^{omega_max} |gamma(-omega)/gamma(omega) - exp(-omega/T)|
//
// and the two-group Lorentzian construction, which fits exp(omega/T) F(omega)
// on the negative window with one group of lines and F(omega) on the positive
// window with another.

#ifndef THERMALBATH_DESIGNOPT_HPP
#define THERMALBATH_DESIGNOPT_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermalbath/bath.hpp"
#include "thermalbath/operators.hpp"

namespace thermalbath {

enum class Objective { minimax, integral };
enum class SpectrumModel { collective, transition, composite };
enum class ParameterKind { drive_amplitude, detuning, kappa, photon_number };

std::string to_string(Objective objective);
std::string to_string(SpectrumModel model);
std::string to_string(ParameterKind kind);
Objective objective_from_string(const std::string& name);
SpectrumModel spectrum_model_from_string(const std::string& name);
ParameterKind parameter_kind_from_string(const std::string& name);

struct FreeParameter {
  ParameterKind kind = ParameterKind::detuning;
  std::size_t resonator = 0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Optional system for the end-to-end fidelity of a design.
struct SystemModel {
  Operator hamiltonian;
  std::vector<Operator> couplings;
};

struct DesignProblem {
  double temperature = 5.0;
  EnergyWindow window;
  std::vector<FreeParameter> free_parameters;
  Objective objective = Objective::integral;
  SpectrumModel model = SpectrumModel::transition;
  ResonatorDesign base;  // fixed fields and the first start
  /// Keep each resonator's photon number when its detuning or kappa moves.
  bool hold_photon_number = true;
  std::size_t grid = 401;
  std::size_t report_grid = 2001;
  std::optional<SystemModel> system;
};

void validate(const DesignProblem& problem);

BathSpectrum build_spectrum(SpectrumModel model, const ResonatorDesign& design);

/// Design with the free parameters set to x (one value per free parameter).
ResonatorDesign apply_parameters(const DesignProblem& problem, const Eigen::VectorXd& x);
Eigen::VectorXd extract_parameters(const DesignProblem& problem, const ResonatorDesign& design);

/// Propagates RatioUndefinedError for the integral form.
double evaluate_objective(const DesignProblem& problem, const ResonatorDesign& design);
double evaluate_objective(const DesignProblem& problem, const ResonatorDesign& design,
                          Objective objective, std::size_t grid);

struct NelderMeadOptions {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_step = 0.1;  // fraction of each bound interval
  double tolerance = 1e-8;    // simplex diameter relative to the bound box
  std::size_t max_iterations = 2000;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double initial_value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;  // diameter criterion met
};

/// Box-constrained Nelder-Mead; points are clamped into [lower, upper].
/// Non-finite or throwing evaluations count as +infinity.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const NelderMeadOptions& options = {});

/// Lawson-Hanson nonnegative least squares: argmin ||A x - b||, x >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

struct StartRecord {
  Eigen::VectorXd x0;
  double initial_value = 0.0;
  double final_value = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct DesignResult {
  ResonatorDesign design;
  double objective_value = 0.0;  // selected objective on the optimization grid
  double minimax_value = 0.0;    // both forms on the report grid
  std::optional<double> integral_value;
  KmsResidual kms_report;
  std::optional<double> gibbs_fidelity;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t best_start = 0;
  std::vector<StartRecord> starts;
};

/// Start 0 is the base design clamped into the bounds; further starts are uniform
/// in the bounds, drawn in order from Rng(rng_seed). Starts run on up to `jobs`
/// threads; the best is chosen by value, ties by start index.
DesignResult optimize(const DesignProblem& problem, std::size_t seeds, std::uint64_t rng_seed,
                      std::size_t jobs = 1, const NelderMeadOptions& options = {});

/// Fidelity of the steady state of the generator built from `design` with the
/// Gibbs state of the system Hamiltonian.
double design_fidelity(const DesignProblem& problem, const ResonatorDesign& design);

struct SweepPoint {
  std::size_t n_resonators = 0;
  DesignResult result;
};

/// Optimizes with 1..max_resonators resonators. Each added resonator copies the
/// first resonator's couplings and bounds and starts undriven, so the objective is
/// non-increasing in the count.
std::vector<SweepPoint> sweep_resonator_count(const DesignProblem& problem,
                                              std::size_t max_resonators, std::size_t seeds,
                                              std::uint64_t rng_seed, std::size_t jobs = 1);

struct GroupResidual {
  double own_window = 0.0;    // max relative error where the group carries the target
  double other_window = 0.0;  // max leakage relative to the target spectrum there
};

struct TwoGroupOptions {
  std::size_t fit_samples = 201;  // per window side
  double resonator_frequency = 0.0;  // 0: 2 * omega_max
  std::size_t report_grid = 2001;
};

struct TwoGroupResult {
  std::vector<LorentzianComponent> components;  // group a first, then group b
  ResonatorDesign design;  // one channel, unit couplings
  BathSpectrum spectrum;
  double width_scale = 1.0;  // widths are width_scale * span / n_per_group
  GroupResidual group_a;
  GroupResidual group_b;
  double kms_integral = 0.0;  // ratio-form residual of the assembled spectrum
  double kms_max = 0.0;
};

/// Throws ArgumentError for n_per_group = 0 or F not positive on the window,
/// InfeasibleFitError when a group's fit collapses to zero weight.
TwoGroupResult two_group_construction(double temperature, const EnergyWindow& window,
                                      const std::function<double(double)>& f,
                                      std::size_t n_per_group, const TwoGroupOptions& options = {});

}  // namespace thermalbath

#endif  // THERMALBATH_DESIGNOPT_HPP
