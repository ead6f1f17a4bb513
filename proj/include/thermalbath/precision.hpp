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

// Certificates for approximately thermalizing baths.
//
// For an engineered spectrum gamma and its Davies completion gamma*, the
// fixed point rho_eq of the engineered generator satisfies
//
//   ||rho_eq - rho_th||_1 <= 6 (log d + 1) / lambda * G(d)^2 * max_violation
//
// where lambda is the gap of the Davies generator and max_violation is the
// largest |exp(omega/T) gamma_ba(-omega) - gamma_ab(omega)| on
// [-omega_max, -omega_min].

#ifndef THERMALBATH_PRECISION_HPP
#define THERMALBATH_PRECISION_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "thermalbath/bath.hpp"
#include "thermalbath/lindblad.hpp"
#include "thermalbath/operators.hpp"

namespace thermalbath {

enum class HamiltonianClass { general, ising };
enum class LogBase { natural, base2 };

double log_in(LogBase base, double x);

/// Sum of singular values.
double trace_norm(const Operator& x);

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const Operator& rho, const Operator& sigma);

/// Closed-form transition count: d(d+1)/2 in general, n(n+1)/2 for an n-qubit
/// Ising Hamiltonian (d = 2^n, base-2 logarithm). Throws ArgumentError when d
/// is not a power of two for the Ising class.
std::size_t g_of_d(std::size_t d, HamiltonianClass cls);

struct GenCount {
  /// (Bohr frequency, number of (eps, eps', a) terms with a nonzero matrix element).
  std::vector<std::pair<double, std::size_t>> per_omega;
  /// Sum of the counts over negative Bohr frequencies.
  std::size_t total_negative = 0;
};

GenCount gen_count(const SpectralDecomposition& decomp, std::span<const Operator> couplings);

struct PrecisionOptions {
  HamiltonianClass hamiltonian_class = HamiltonianClass::general;
  /// Base of the logarithm in the (log d + 1) prefactor; G(d) always uses base 2.
  LogBase prefactor_log = LogBase::natural;
  KmsResidualOptions sampling{};
};

struct PrecisionReport {
  double lhs = 0.0;        // ||rho_eq - rho_th||_1
  double rhs_bound = 0.0;  // right-hand side of the certificate
  double lambda = 0.0;     // Davies-generator gap
  std::size_t g_of_d = 0;
  std::size_t gen_sum = 0;  // direct enumeration of sum_{omega<0} Gen(omega)
  double max_kms_violation = 0.0;
  bool holds = false;  // lhs <= rhs_bound + 1e-9
};

/// 6 (log d + 1) / lambda * G(d)^2 * violation.
double precision_rhs(double violation, double lambda, std::size_t d, HamiltonianClass cls,
                     LogBase prefactor_log = LogBase::natural);

/// Evaluates both sides of the certificate for `actual`, built from `spectrum`.
/// Propagates NonErgodicError / GapUnresolvedError.
PrecisionReport precision_bound(const LindbladGenerator& actual, const BathSpectrum& spectrum,
                                const SpectralDecomposition& decomp,
                                std::span<const Operator> couplings, double temperature,
                                const EnergyWindow& window, const PrecisionOptions& options = {});

/// epsilon * lambda / (6 (log d + 1) G(d)^2): the KMS violation allowed for a
/// target trace distance epsilon.
double required_precision(double epsilon, double lambda, std::size_t d, HamiltonianClass cls,
                          LogBase prefactor_log = LogBase::natural);

struct GibbsPerturbation {
  double bound = 0.0;   // 2 (exp(||H1 - H2||_1 / T) - 1)
  double actual = 0.0;  // ||rho1 - rho2||_1
};

GibbsPerturbation gibbs_perturbation_bound(const Operator& h1, const Operator& h2,
                                           double temperature);

}  // namespace thermalbath

#endif  // THERMALBATH_PRECISION_HPP
