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

// Dispersive reduction of qubits collectively coupled to driven lossy
// resonators, H = H_S + sum g_{a,nu} S_a (a_nu + a_nu^dagger) + omega_r sum a_nu^dagger a_nu.
//
// Only the second-order effective operators are built; the displacement
// unitary itself acts on an infinite-dimensional space and never appears.
//
//   R_a     = sum_jk <j|S_a|k> / (omega_r + Omega_j - Omega_k) |j><k|
//   A_nu    = sum_a g_{a,nu} R_a
//   H*      = H_S - sum_{a,nu} g_{a,nu}/2 [((1 + N_nu) A_nu^dagger - A_nu) S_a + h.c.]
//   Shat_nu = 1/2 sum_a g_{a,nu} [S_a, A_nu^dagger - A_nu]
//
// Shat_nu couples to the mean-subtracted photon number a^dagger a - <a^dagger a>,
// whose spectrum is the resonator Lorentzian.

#ifndef THERMALBATH_DISPERSIVE_HPP
#define THERMALBATH_DISPERSIVE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "thermalbath/bath.hpp"
#include "thermalbath/operators.hpp"

namespace thermalbath {

/// Throws DispersiveError when omega_r + Omega_j - Omega_k is within 1e-6 GHz
/// of zero on a nonzero matrix element.
Operator r_operator(const Operator& s, const SpectralDecomposition& decomp,
                    double resonator_frequency);

/// A_nu = sum_a g_{a,nu} R_a, with R_a built at resonator nu's frequency.
Operator a_operator(const SpectralDecomposition& decomp, std::span<const Operator> couplings,
                    const ResonatorDesign& design, std::size_t nu);

Operator modified_hamiltonian(const SpectralDecomposition& decomp,
                              std::span<const Operator> couplings, const ResonatorDesign& design,
                              std::span<const double> photon_numbers);

struct DispersiveCouplings {
  std::vector<Operator> s_hat;  // one per resonator
  /// [S_a, R_b^dagger - R_b] at index a * n + b (R_b at each resonator's frequency
  /// is identical when all resonators share omega_r; the first is used).
  std::vector<Operator> composite;
  /// g_{a,nu} g_{b,nu} / 2, rows indexed like `composite`, one column per resonator.
  Eigen::MatrixXd composite_weights;
};

DispersiveCouplings coupling_operators(const SpectralDecomposition& decomp,
                                       std::span<const Operator> couplings,
                                       const ResonatorDesign& design);

/// 1/4 sum_nu g_{a,nu} g_{b,nu} g_{a',nu} g_{b',nu} Lambda_nu(omega).
double effective_correlation(const ResonatorDesign& design, std::size_t a, std::size_t b,
                             std::size_t a_prime, std::size_t b_prime, double omega);

/// Composite-index spectrum (channels a * n + b) matching effective_correlation.
BathSpectrum composite_spectrum(const ResonatorDesign& design);

/// One channel per resonator with rate Lambda_nu; pairs with coupling_operators().s_hat.
BathSpectrum resonator_spectrum(const ResonatorDesign& design);

/// Effective single-flip spectrum: gamma_ab(omega) = sum_nu g_{a,nu}^2 g_{b,nu}^2
/// (2 omega / (omega_r^2 - omega^2))^2 Lambda_nu(omega). For one qubit and one
/// resonator this is rate_model.
BathSpectrum transition_spectrum(const ResonatorDesign& design);

struct SingleResonator {
  double photon_number = 1.0;
  double kappa = 0.62;
  double detuning = -5.0;
  double resonator_frequency = 3.1;
};

/// N kappa / ((omega + Delta)^2 + (kappa/2)^2) * (2 omega g^2 / (omega_r^2 - omega^2))^2.
/// Cooling across a gap Omega is rate_model(Omega), heating rate_model(-Omega).
/// Throws DispersiveError within 1e-6 GHz of |omega| = omega_r.
double rate_model(double omega, const SingleResonator& resonator, double g);

/// kappa g^2 / (omega_r - (Omega_j - Omega_k))^2.
double purcell_rate(double g, double kappa, double resonator_frequency, double omega_j,
                    double omega_k);

/// Purcell decay is negligible next to heating when N > (1 + Delta/Omega) / 4.
double purcell_photon_threshold(double detuning, double omega);
bool purcell_negligible(double photon_number, double detuning, double omega);

struct RegimeThresholds {
  double dispersive_margin = 5.0;
  double born = 0.1;
  double markov = 0.1;
  double leakage = 0.2;
};

struct Criterion {
  bool ok = true;
  double ratio = 0.0;
  double threshold = 0.0;
};

struct RegimeReport {
  Criterion dispersive;  // min |omega_r - (Omega_k - Omega_j)| / |<j|sum g S|k>|, >= threshold
  Criterion born;        // max|gamma| / omega_min, <= threshold
  Criterion markov;      // max|gamma| / min kappa, <= threshold
  Criterion leakage;     // max kappa / omega_r, <= threshold
  Criterion purcell;     // ratio: min photon number, threshold: max (1 + Delta/Omega)/4
  double max_rate = 0.0;

  bool all_ok() const noexcept {
    return dispersive.ok && born.ok && markov.ok && leakage.ok && purcell.ok;
  }
};

/// Diagnostics only; never throws on a violated criterion.
RegimeReport regime_check(const SpectralDecomposition& decomp,
                          std::span<const Operator> couplings, const ResonatorDesign& design,
                          const BathSpectrum& spectrum, const RegimeThresholds& thresholds = {});

struct DispersiveModel {
  std::vector<Operator> r_ops;
  std::vector<Operator> a_ops;
  Operator h_star;
  std::vector<Operator> s_hat;
  RegimeReport validity;
};

DispersiveModel build_dispersive_model(const SpectralDecomposition& decomp,
                                       std::span<const Operator> couplings,
                                       const ResonatorDesign& design,
                                       const RegimeThresholds& thresholds = {});

struct RatePoint {
  double omega = 0.0;
  double heating = 0.0;  // rate_model(-omega)
  double cooling = 0.0;  // rate_model(omega)
  double sweep() const noexcept { return heating + cooling; }
};

/// Heating/cooling curve over the window on n uniform points.
std::vector<RatePoint> rate_curve(const EnergyWindow& window, const SingleResonator& resonator,
                                  double g, std::size_t n);

/// Factor that scales the photon number so the largest cooling rate equals
/// `cap` (e.g. kappa/10); the maximal-drive curves are curve * factor.
double rate_cap_factor(std::span<const RatePoint> curve, double cap);

}  // namespace thermalbath

#endif  // THERMALBATH_DISPERSIVE_HPP
