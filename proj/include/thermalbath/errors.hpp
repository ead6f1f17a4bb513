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

#ifndef THERMALBATH_ERRORS_HPP
#define THERMALBATH_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace thermalbath {

/// Malformed input: shape mismatch, non-Hermitian operator, T <= 0, ...
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures of a well-formed computation.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The coupling operators never connect any pair of levels.
class BathCannotActError : public Error {
 public:
  BathCannotActError() : Error("bath cannot act: no coupled transitions") {}
};

/// The ratio form of the KMS residual hit gamma(omega) == 0.
class RatioUndefinedError : public Error {
 public:
  explicit RatioUndefinedError(double omega)
      : Error("ratio undefined: gamma vanishes at omega = " + std::to_string(omega)),
        omega_(omega) {}
  double omega() const noexcept { return omega_; }

 private:
  double omega_;
};

/// The rate matrix [gamma_ab(omega)] has a negative eigenvalue.
class NotCompletelyPositiveError : public Error {
 public:
  NotCompletelyPositiveError(double omega, double min_eigenvalue)
      : Error("not completely positive: rate matrix at omega = " + std::to_string(omega) +
              " has eigenvalue " + std::to_string(min_eigenvalue)),
        omega_(omega),
        min_eigenvalue_(min_eigenvalue) {}
  double omega() const noexcept { return omega_; }
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double omega_;
  double min_eigenvalue_;
};

class NonErgodicError : public Error {
 public:
  explicit NonErgodicError(std::size_t kernel_dimension)
      : Error("non-ergodic: steady state not unique (kernel dimension " +
              std::to_string(kernel_dimension) + ")"),
        kernel_dimension_(kernel_dimension) {}
  std::size_t kernel_dimension() const noexcept { return kernel_dimension_; }

 private:
  std::size_t kernel_dimension_;
};

class GapUnresolvedError : public Error {
 public:
  GapUnresolvedError() : Error("gap unresolved: every eigenvalue is within tolerance of zero") {}
};

class StepInstabilityError : public Error {
 public:
  StepInstabilityError(double drift, std::size_t suggested_steps)
      : Error("step instability: trace drift " + std::to_string(drift) +
              " exceeds 1e-6; retry with n_steps >= " + std::to_string(suggested_steps)),
        suggested_steps_(suggested_steps) {}
  std::size_t suggested_steps() const noexcept { return suggested_steps_; }

 private:
  std::size_t suggested_steps_;
};

/// A dispersive denominator (omega_r + Omega_j - Omega_k, or a rate-model pole) is too small.
class DispersiveError : public Error {
 public:
  using Error::Error;
};

/// Two-group Lorentzian fit could not represent the target.
class InfeasibleFitError : public Error {
 public:
  InfeasibleFitError(const std::string& what, double residual_a, double residual_b)
      : Error(what), residual_a_(residual_a), residual_b_(residual_b) {}
  double residual_a() const noexcept { return residual_a_; }
  double residual_b() const noexcept { return residual_b_; }

 private:
  double residual_a_;
  double residual_b_;
};

}  // namespace thermalbath

#endif  // THERMALBATH_ERRORS_HPP
