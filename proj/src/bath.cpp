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

#include "thermalbath/bath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thermalbath/errors.hpp"

namespace thermalbath {

namespace {

constexpr double kPoleTol = 1e-6;

void require_positive_temperature(double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ArgumentError("temperature must be positive and finite");
  }
}

}  // namespace

double lorentzian(const LorentzianComponent& line, double omega) {
  const double x = omega - line.center;
  const double hw = 0.5 * line.width;
  return line.weight * line.width / (x * x + hw * hw);
}

void validate(const ResonatorDesign& design) {
  if (static_cast<std::size_t>(design.couplings.cols()) != design.resonators.size()) {
    throw ArgumentError("resonator design: coupling matrix has " +
                        std::to_string(design.couplings.cols()) + " columns for " +
                        std::to_string(design.resonators.size()) + " resonators");
  }
  for (const Resonator& r : design.resonators) {
    if (!(r.kappa > 0.0)) throw ArgumentError("resonator design: kappa must be positive");
    if (!(r.frequency > 0.0)) throw ArgumentError("resonator design: omega_r must be positive");
    if (!(r.drive_frequency > 0.0)) {
      throw ArgumentError("resonator design: drive frequency must be positive");
    }
    if (!std::isfinite(r.drive_amplitude)) {
      throw ArgumentError("resonator design: drive amplitude must be finite");
    }
  }
  if (!design.couplings.allFinite()) throw ArgumentError("resonator design: non-finite coupling");
}

Complex coherent_amplitude(const ResonatorDesign& design, std::size_t nu) {
  const Resonator& r = design.resonators.at(nu);
  return Complex(r.drive_amplitude, 0.0) / Complex(r.detuning(), 0.5 * r.kappa);
}

double photon_number(const ResonatorDesign& design, std::size_t nu) {
  return std::norm(coherent_amplitude(design, nu));
}

double drive_amplitude_for(double photon_number, double detuning, double kappa) {
  if (photon_number < 0.0) throw ArgumentError("photon number must be non-negative");
  return std::sqrt(photon_number * (detuning * detuning + 0.25 * kappa * kappa));
}

LorentzianComponent photon_spectrum(const ResonatorDesign& design, std::size_t nu) {
  const Resonator& r = design.resonators.at(nu);
  return {photon_number(design, nu), -r.detuning(), r.kappa};
}

double SpectralMode::form_factor(double omega) const {
  if (!dispersive_frequency) return 1.0;
  const double wr = *dispersive_frequency;
  if (std::abs(std::abs(omega) - wr) < kPoleTol) {
    throw DispersiveError("rate model pole: |omega| = " + std::to_string(omega) +
                          " is within 1e-6 GHz of omega_r = " + std::to_string(wr));
  }
  const double f = 2.0 * omega / (wr * wr - omega * omega);
  return f * f;
}

double SpectralMode::value(double omega) const {
  if (line.weight == 0.0) return 0.0;
  return form_factor(omega) * lorentzian(line, omega);
}

BathSpectrum BathSpectrum::from_modes(std::vector<SpectralMode> modes, Eigen::MatrixXd coupling) {
  if (static_cast<std::size_t>(coupling.cols()) != modes.size()) {
    throw ArgumentError("bath spectrum: coupling columns must match the number of modes");
  }
  for (const SpectralMode& m : modes) {
    if (!(m.line.weight >= 0.0)) throw ArgumentError("Lorentzian weight must be >= 0");
    if (!(m.line.width > 0.0)) throw ArgumentError("Lorentzian width must be > 0");
  }
  BathSpectrum s;
  s.channels_ = static_cast<std::size_t>(coupling.rows());
  s.modes_ = std::move(modes);
  s.coupling_ = std::move(coupling);
  return s;
}

BathSpectrum BathSpectrum::exact_kms(std::size_t channels, double base_rate, double temperature) {
  require_positive_temperature(temperature);
  if (!(base_rate >= 0.0)) throw ArgumentError("exact-KMS base rate must be >= 0");
  BathSpectrum s;
  s.channels_ = channels;
  s.exact_kms_ = true;
  s.base_rate_ = base_rate;
  s.kms_temperature_ = temperature;
  return s;
}

BathSpectrum BathSpectrum::zero(std::size_t channels) {
  return from_modes({}, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(channels), 0));
}

double BathSpectrum::raw_gamma(std::size_t a, std::size_t b, double omega) const {
  if (a >= channels_ || b >= channels_) return 0.0;
  if (exact_kms_) {
    if (a != b) return 0.0;
    return omega >= 0.0 ? base_rate_ : base_rate_ * std::exp(omega / kms_temperature_);
  }
  double total = 0.0;
  const auto ai = static_cast<Eigen::Index>(a);
  const auto bi = static_cast<Eigen::Index>(b);
  for (std::size_t nu = 0; nu < modes_.size(); ++nu) {
    const double c = coupling_(ai, static_cast<Eigen::Index>(nu)) *
                     coupling_(bi, static_cast<Eigen::Index>(nu));
    if (c == 0.0) continue;
    total += c * modes_[nu].value(omega);
  }
  return total;
}

double BathSpectrum::gamma(std::size_t a, std::size_t b, double omega) const {
  if (completion_temperature_ && omega < 0.0) {
    return std::exp(omega / *completion_temperature_) * raw_gamma(b, a, -omega);
  }
  return raw_gamma(a, b, omega);
}

Eigen::MatrixXd BathSpectrum::gamma_matrix(double omega) const {
  const auto n = static_cast<Eigen::Index>(channels_);
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      g(a, b) = gamma(static_cast<std::size_t>(a), static_cast<std::size_t>(b), omega);
    }
  }
  return g;
}

bool BathSpectrum::pair_active(std::size_t a, std::size_t b) const {
  if (a >= channels_ || b >= channels_) return false;
  if (exact_kms_) return a == b;
  const auto ai = static_cast<Eigen::Index>(a);
  const auto bi = static_cast<Eigen::Index>(b);
  for (Eigen::Index nu = 0; nu < coupling_.cols(); ++nu) {
    if (coupling_(ai, nu) * coupling_(bi, nu) != 0.0) return true;
  }
  return false;
}

BathSpectrum BathSpectrum::davies_completion(double temperature) const {
  require_positive_temperature(temperature);
  BathSpectrum out = *this;
  out.completion_temperature_ = temperature;
  return out;
}

BathSpectrum BathSpectrum::scaled_couplings(double c) const {
  BathSpectrum out = *this;
  if (exact_kms_) {
    out.base_rate_ *= c * c;
  } else {
    out.coupling_ *= c;
  }
  return out;
}

BathSpectrum collective_spectrum(const ResonatorDesign& design) {
  validate(design);
  std::vector<SpectralMode> modes;
  modes.reserve(design.n_resonators());
  for (std::size_t nu = 0; nu < design.n_resonators(); ++nu) {
    modes.push_back({photon_spectrum(design, nu), std::nullopt});
  }
  return BathSpectrum::from_modes(std::move(modes), design.couplings);
}

double collective_gamma(const BathSpectrum& spectrum, std::size_t a, std::size_t b, double omega) {
  return spectrum.gamma(a, b, omega);
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  if (n <= 1 || lo == hi) return {lo};
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

double kms_max_violation(const BathSpectrum& spectrum, double temperature,
                         const EnergyWindow& window, const KmsResidualOptions& options) {
  return kms_residual(spectrum, temperature, window,
                      KmsResidualOptions{options.n_samples, options.mode, options.bohr_frequencies,
                                         false})
      .max_abs;
}

double kms_ratio_integral(const BathSpectrum& spectrum, double temperature,
                          const EnergyWindow& window, std::size_t n_samples) {
  KmsResidualOptions options;
  options.n_samples = n_samples;
  return *kms_residual(spectrum, temperature, window, options).ratio_integral;
}

KmsResidual kms_residual(const BathSpectrum& spectrum, double temperature,
                         const EnergyWindow& window, const KmsResidualOptions& options) {
  require_positive_temperature(temperature);
  validate(window);
  if (options.n_samples == 0) throw ArgumentError("kms_residual: n_samples must be >= 1");

  std::vector<double> positive;
  if (options.mode == SamplingMode::bohr_frequencies) {
    for (double w : options.bohr_frequencies) {
      if (window.contains(std::abs(w), 1e-12)) positive.push_back(std::abs(w));
    }
    std::sort(positive.begin(), positive.end());
    positive.erase(std::unique(positive.begin(), positive.end()), positive.end());
  } else {
    positive = uniform_grid(window.omega_min, window.omega_max, options.n_samples);
  }

  KmsResidual out;
  out.mode = options.mode;
  out.n_samples = positive.size();
  const std::size_t n = spectrum.channels();

  // omega = -w ranges over [-omega_max, -omega_min].
  for (double w : positive) {
    const double omega = -w;
    const double boltz = std::exp(omega / temperature);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        const double v = std::abs(boltz * spectrum.gamma(b, a, -omega) - spectrum.gamma(a, b, omega));
        if (v > out.max_abs) {
          out.max_abs = v;
          out.argmax_omega = omega;
        }
      }
    }
  }

  if (!options.compute_ratio) return out;

  const std::vector<double> grid =
      uniform_grid(window.omega_min, window.omega_max, options.n_samples);
  bool any_active = false;
  double worst = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (!spectrum.pair_active(a, b)) continue;
      any_active = true;
      std::vector<double> f(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double w = grid[i];
        const double den = spectrum.gamma(a, b, w);
        if (den == 0.0 || !std::isfinite(den)) throw RatioUndefinedError(w);
        f[i] = std::abs(spectrum.gamma(b, a, -w) / den - std::exp(-w / temperature));
      }
      double integral = 0.0;
      if (grid.size() == 1) {
        integral = f[0];
      } else {
        for (std::size_t i = 1; i < grid.size(); ++i) {
          integral += 0.5 * (f[i] + f[i - 1]) * (grid[i] - grid[i - 1]);
        }
      }
      worst = std::max(worst, integral);
    }
  }
  if (!any_active) throw RatioUndefinedError(window.omega_min);
  out.ratio_integral = worst;
  return out;
}

}  // namespace thermalbath
