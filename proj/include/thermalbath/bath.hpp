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

// Engineered bath fluctuation spectra.
//
// A driven lossy resonator in its coherent steady state has photon-number
// fluctuations with a Lorentzian spectrum
//
//   Lambda(omega) = |alpha|^2 kappa / ((omega + Delta)^2 + (kappa/2)^2),
//
// the Fourier transform of the decaying autocorrelation
// |alpha|^2 exp((i Delta - kappa/2)|s|). A bath is a set of such modes
// coupled to system channels a through real couplings c_{a,nu}:
//
//   gamma_ab(omega) = sum_nu c_{a,nu} c_{b,nu} phi_nu(omega)^2 Lambda_nu(omega)
//
// where phi_nu is 1, or the dispersive transition factor
// 2 omega / (omega_r^2 - omega^2) for effective single-flip rates. Cross-mode
// terms (nu != nu') are dropped, so every [gamma_ab(omega)] is a sum of
// rank-one PSD matrices.

#ifndef THERMALBATH_BATH_HPP
#define THERMALBATH_BATH_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "thermalbath/operators.hpp"

namespace thermalbath {

struct LorentzianComponent {
  double weight = 0.0;  // |alpha|^2 times any coupling product, >= 0
  double center = 0.0;  // peak location, -Delta for a driven resonator
  double width = 1.0;   // kappa > 0
};

/// weight * width / ((omega - center)^2 + (width/2)^2)
double lorentzian(const LorentzianComponent& line, double omega);

struct Resonator {
  double drive_amplitude = 0.0;  // E_nu
  double drive_frequency = 0.0;  // omega_d
  double kappa = 1.0;            // photon leakage
  double frequency = 1.0;        // omega_r

  double detuning() const noexcept { return drive_frequency - frequency; }
};

struct ResonatorDesign {
  std::vector<Resonator> resonators;
  Eigen::MatrixXd couplings;  // g_{a,nu}: rows are system channels, columns resonators

  std::size_t n_resonators() const noexcept { return resonators.size(); }
  std::size_t n_channels() const noexcept { return static_cast<std::size_t>(couplings.rows()); }
};

/// Throws ArgumentError on kappa <= 0, non-positive frequencies or a coupling shape mismatch.
void validate(const ResonatorDesign& design);

/// alpha = E / (Delta + i kappa/2), Delta = omega_d - omega_r.
Complex coherent_amplitude(const ResonatorDesign& design, std::size_t nu);
double photon_number(const ResonatorDesign& design, std::size_t nu);

/// Drive amplitude giving `photon_number` photons at the given detuning and leakage.
double drive_amplitude_for(double photon_number, double detuning, double kappa);

/// Photon-number fluctuation line of resonator nu: weight |alpha|^2, center -Delta, width kappa.
LorentzianComponent photon_spectrum(const ResonatorDesign& design, std::size_t nu);

struct SpectralMode {
  LorentzianComponent line;
  /// When set, the rate carries the factor (2 omega / (omega_r^2 - omega^2))^2.
  std::optional<double> dispersive_frequency;

  /// Throws DispersiveError within 1e-6 GHz of the pole |omega| = omega_r.
  double form_factor(double omega) const;
  double value(double omega) const;
};

class BathSpectrum {
 public:
  BathSpectrum() = default;

  /// `coupling` has one row per channel and one column per mode.
  static BathSpectrum from_modes(std::vector<SpectralMode> modes, Eigen::MatrixXd coupling);
  /// Analytic reference: gamma_ab(omega) = delta_ab * g0 for omega >= 0 and
  /// delta_ab * g0 * exp(omega/T) for omega < 0.
  static BathSpectrum exact_kms(std::size_t channels, double base_rate, double temperature);
  static BathSpectrum zero(std::size_t channels);

  std::size_t channels() const noexcept { return channels_; }
  bool is_exact_kms() const noexcept { return exact_kms_; }
  double base_rate() const noexcept { return base_rate_; }
  double kms_temperature() const noexcept { return kms_temperature_; }
  std::optional<double> completion_temperature() const noexcept { return completion_temperature_; }
  const std::vector<SpectralMode>& modes() const noexcept { return modes_; }
  const Eigen::MatrixXd& coupling() const noexcept { return coupling_; }

  /// gamma_ab(omega); zero for indices outside the channel range.
  double gamma(std::size_t a, std::size_t b, double omega) const;
  Eigen::MatrixXd gamma_matrix(double omega) const;

  /// True when gamma_ab is not identically zero by construction.
  bool pair_active(std::size_t a, std::size_t b) const;

  /// gamma*_ab(omega) = gamma_ab(omega) for omega >= 0 and
  /// exp(omega/T) gamma_ba(-omega) for omega < 0. Idempotent.
  BathSpectrum davies_completion(double temperature) const;

  /// Multiplies every coupling by c (rates scale by c^2).
  BathSpectrum scaled_couplings(double c) const;

 private:
  double raw_gamma(std::size_t a, std::size_t b, double omega) const;

  std::size_t channels_ = 0;
  bool exact_kms_ = false;
  double base_rate_ = 0.0;
  double kms_temperature_ = 0.0;
  std::vector<SpectralMode> modes_;
  Eigen::MatrixXd coupling_;
  std::optional<double> completion_temperature_;
};

/// gamma_ab(omega) = sum_nu g_{a,nu} g_{b,nu} Lambda_nu(omega): the collective
/// spectrum seen by channels coupled linearly to the resonator photon number.
BathSpectrum collective_spectrum(const ResonatorDesign& design);

double collective_gamma(const BathSpectrum& spectrum, std::size_t a, std::size_t b, double omega);

enum class SamplingMode { grid, bohr_frequencies };

struct KmsResidualOptions {
  std::size_t n_samples = 2001;
  SamplingMode mode = SamplingMode::grid;
  /// Positive Bohr frequencies used when mode == bohr_frequencies; those
  /// outside the window are ignored.
  std::vector<double> bohr_frequencies;
  bool compute_ratio = true;
};

struct KmsResidual {
  /// max over omega in [-omega_max, -omega_min] and pairs (a, b) of
  /// |exp(omega/T) gamma_ba(-omega) - gamma_ab(omega)|.
  double max_abs = 0.0;
  double argmax_omega = 0.0;
  /// max over active pairs of the trapezoidal integral over [omega_min, omega_max]
  /// of |gamma_ba(-omega) / gamma_ab(omega) - exp(-omega/T)|. For a zero-width
  /// window this is the pointwise value.
  std::optional<double> ratio_integral;
  SamplingMode mode = SamplingMode::grid;
  std::size_t n_samples = 0;
};

/// Throws ArgumentError for T <= 0 or an invalid window, RatioUndefinedError
/// when an active gamma_ab(omega) vanishes on the positive window.
KmsResidual kms_residual(const BathSpectrum& spectrum, double temperature,
                         const EnergyWindow& window, const KmsResidualOptions& options = {});

double kms_max_violation(const BathSpectrum& spectrum, double temperature,
                         const EnergyWindow& window, const KmsResidualOptions& options = {});
double kms_ratio_integral(const BathSpectrum& spectrum, double temperature,
                          const EnergyWindow& window, std::size_t n_samples = 2001);

/// n uniformly spaced points on [lo, hi] (a single point when lo == hi or n == 1).
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

}  // namespace thermalbath

#endif  // THERMALBATH_BATH_HPP
