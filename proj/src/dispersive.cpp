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

#include "thermalbath/dispersive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "thermalbath/errors.hpp"

namespace thermalbath {

namespace {

constexpr double kPoleTol = 1e-6;
constexpr double kMatrixElementTol = 1e-12;

void require_channels(std::span<const Operator> couplings, const ResonatorDesign& design) {
  validate(design);
  if (couplings.size() != design.n_channels()) {
    throw ArgumentError("dispersive model: " + std::to_string(couplings.size()) +
                        " coupling operators for a design with " +
                        std::to_string(design.n_channels()) + " channels");
  }
}

double g_at(const ResonatorDesign& design, std::size_t a, std::size_t nu) {
  return design.couplings(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(nu));
}

}  // namespace

Operator r_operator(const Operator& s, const SpectralDecomposition& decomp,
                    double resonator_frequency) {
  const Operator s_eig = decomp.to_eigenbasis(s);
  const Eigen::VectorXd& e = decomp.level_energies();
  Operator r = Operator::Zero(s_eig.rows(), s_eig.cols());
  for (Eigen::Index j = 0; j < s_eig.rows(); ++j) {
    for (Eigen::Index k = 0; k < s_eig.cols(); ++k) {
      if (std::abs(s_eig(j, k)) <= kMatrixElementTol) continue;
      const double den = resonator_frequency + e(j) - e(k);
      if (std::abs(den) < kPoleTol) {
        throw DispersiveError("dispersive assumption violated at (" + std::to_string(j) + "," +
                              std::to_string(k) + ")");
      }
      r(j, k) = s_eig(j, k) / den;
    }
  }
  return decomp.from_eigenbasis(r);
}

Operator a_operator(const SpectralDecomposition& decomp, std::span<const Operator> couplings,
                    const ResonatorDesign& design, std::size_t nu) {
  require_channels(couplings, design);
  const auto d = static_cast<Eigen::Index>(decomp.dim());
  Operator a = Operator::Zero(d, d);
  const double wr = design.resonators.at(nu).frequency;
  for (std::size_t alpha = 0; alpha < couplings.size(); ++alpha) {
    const double g = g_at(design, alpha, nu);
    if (g == 0.0) continue;
    a += g * r_operator(couplings[alpha], decomp, wr);
  }
  return a;
}

Operator modified_hamiltonian(const SpectralDecomposition& decomp,
                              std::span<const Operator> couplings, const ResonatorDesign& design,
                              std::span<const double> photon_numbers) {
  require_channels(couplings, design);
  if (photon_numbers.size() != design.n_resonators()) {
    throw ArgumentError("modified_hamiltonian: one photon number per resonator required");
  }
  Operator h = decomp.hamiltonian();
  for (std::size_t nu = 0; nu < design.n_resonators(); ++nu) {
    const Operator a = a_operator(decomp, couplings, design, nu);
    const Operator lift = (1.0 + photon_numbers[nu]) * a.adjoint() - a;
    for (std::size_t alpha = 0; alpha < couplings.size(); ++alpha) {
      const double g = g_at(design, alpha, nu);
      if (g == 0.0) continue;
      const Operator term = lift * couplings[alpha];
      h -= 0.5 * g * (term + term.adjoint());
    }
  }
  return h;
}

DispersiveCouplings coupling_operators(const SpectralDecomposition& decomp,
                                       std::span<const Operator> couplings,
                                       const ResonatorDesign& design) {
  require_channels(couplings, design);
  const std::size_t n = couplings.size();
  const std::size_t nr = design.n_resonators();
  DispersiveCouplings out;

  for (std::size_t nu = 0; nu < nr; ++nu) {
    const Operator a = a_operator(decomp, couplings, design, nu);
    const Operator k = a.adjoint() - a;
    Operator s_hat = Operator::Zero(a.rows(), a.cols());
    for (std::size_t alpha = 0; alpha < n; ++alpha) {
      const double g = g_at(design, alpha, nu);
      if (g == 0.0) continue;
      s_hat += 0.5 * g * (couplings[alpha] * k - k * couplings[alpha]);
    }
    out.s_hat.push_back(std::move(s_hat));
  }

  if (nr > 0) {
    const double wr = design.resonators.front().frequency;
    std::vector<Operator> r_ops;
    r_ops.reserve(n);
    for (const Operator& s : couplings) r_ops.push_back(r_operator(s, decomp, wr));
    out.composite_weights.resize(static_cast<Eigen::Index>(n * n), static_cast<Eigen::Index>(nr));
    for (std::size_t alpha = 0; alpha < n; ++alpha) {
      for (std::size_t beta = 0; beta < n; ++beta) {
        const Operator k = r_ops[beta].adjoint() - r_ops[beta];
        out.composite.push_back(couplings[alpha] * k - k * couplings[alpha]);
        for (std::size_t nu = 0; nu < nr; ++nu) {
          out.composite_weights(static_cast<Eigen::Index>(alpha * n + beta),
                                static_cast<Eigen::Index>(nu)) =
              0.5 * g_at(design, alpha, nu) * g_at(design, beta, nu);
        }
      }
    }
  }
  return out;
}

double effective_correlation(const ResonatorDesign& design, std::size_t a, std::size_t b,
                             std::size_t a_prime, std::size_t b_prime, double omega) {
  validate(design);
  double total = 0.0;
  for (std::size_t nu = 0; nu < design.n_resonators(); ++nu) {
    const double w = g_at(design, a, nu) * g_at(design, b, nu) * g_at(design, a_prime, nu) *
                     g_at(design, b_prime, nu);
    if (w == 0.0) continue;
    total += w * lorentzian(photon_spectrum(design, nu), omega);
  }
  return 0.25 * total;
}

BathSpectrum composite_spectrum(const ResonatorDesign& design) {
  validate(design);
  const std::size_t n = design.n_channels();
  const std::size_t nr = design.n_resonators();
  std::vector<SpectralMode> modes;
  Eigen::MatrixXd c(static_cast<Eigen::Index>(n * n), static_cast<Eigen::Index>(nr));
  for (std::size_t nu = 0; nu < nr; ++nu) {
    modes.push_back({photon_spectrum(design, nu), std::nullopt});
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        c(static_cast<Eigen::Index>(a * n + b), static_cast<Eigen::Index>(nu)) =
            0.5 * g_at(design, a, nu) * g_at(design, b, nu);
      }
    }
  }
  return BathSpectrum::from_modes(std::move(modes), std::move(c));
}

BathSpectrum resonator_spectrum(const ResonatorDesign& design) {
  validate(design);
  const auto nr = static_cast<Eigen::Index>(design.n_resonators());
  std::vector<SpectralMode> modes;
  for (std::size_t nu = 0; nu < design.n_resonators(); ++nu) {
    modes.push_back({photon_spectrum(design, nu), std::nullopt});
  }
  return BathSpectrum::from_modes(std::move(modes), Eigen::MatrixXd::Identity(nr, nr));
}

BathSpectrum transition_spectrum(const ResonatorDesign& design) {
  validate(design);
  std::vector<SpectralMode> modes;
  for (std::size_t nu = 0; nu < design.n_resonators(); ++nu) {
    modes.push_back({photon_spectrum(design, nu), design.resonators[nu].frequency});
  }
  return BathSpectrum::from_modes(std::move(modes), design.couplings.array().square().matrix());
}

double rate_model(double omega, const SingleResonator& resonator, double g) {
  const double wr = resonator.resonator_frequency;
  if (std::abs(std::abs(omega) - wr) < kPoleTol) {
    throw DispersiveError("rate model pole at |omega| = omega_r = " + std::to_string(wr));
  }
  const double x = omega + resonator.detuning;
  const double hw = 0.5 * resonator.kappa;
  const double line = resonator.photon_number * resonator.kappa / (x * x + hw * hw);
  const double factor = 2.0 * omega * g * g / (wr * wr - omega * omega);
  return line * factor * factor;
}

double purcell_rate(double g, double kappa, double resonator_frequency, double omega_j,
                    double omega_k) {
  const double den = resonator_frequency - (omega_j - omega_k);
  if (std::abs(den) < kPoleTol) {
    throw DispersiveError("Purcell rate pole: resonator resonant with the transition");
  }
  return kappa * g * g / (den * den);
}

double purcell_photon_threshold(double detuning, double omega) {
  return 0.25 * (1.0 + detuning / omega);
}

bool purcell_negligible(double photon_number, double detuning, double omega) {
  return photon_number > purcell_photon_threshold(detuning, omega);
}

RegimeReport regime_check(const SpectralDecomposition& decomp,
                          std::span<const Operator> couplings, const ResonatorDesign& design,
                          const BathSpectrum& spectrum, const RegimeThresholds& thresholds) {
  require_channels(couplings, design);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kSlack = 1e-9;
  const Eigen::VectorXd& e = decomp.level_energies();
  const auto d = static_cast<Eigen::Index>(decomp.dim());

  std::vector<Operator> s_eig;
  for (const Operator& s : couplings) s_eig.push_back(decomp.to_eigenbasis(s));

  // Coupled positive transitions.
  std::vector<double> transitions;
  for (const Operator& m : s_eig) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) {
        const double w = e(k) - e(j);
        if (w > 0.0 && std::abs(m(j, k)) > kMatrixElementTol) transitions.push_back(w);
      }
    }
  }

  RegimeReport report;
  double margin = kInf;
  double min_kappa = kInf;
  double leak = 0.0;
  double min_photons = kInf;
  double photon_threshold = -kInf;
  for (std::size_t nu = 0; nu < design.n_resonators(); ++nu) {
    const Resonator& res = design.resonators[nu];
    Operator total = Operator::Zero(d, d);
    for (std::size_t a = 0; a < couplings.size(); ++a) total += g_at(design, a, nu) * s_eig[a];
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) {
        const double elem = std::abs(total(j, k));
        if (elem <= kMatrixElementTol) continue;
        margin = std::min(margin, std::abs(res.frequency - (e(k) - e(j))) / elem);
      }
    }
    min_kappa = std::min(min_kappa, res.kappa);
    leak = std::max(leak, res.kappa / res.frequency);
    min_photons = std::min(min_photons, photon_number(design, nu));
    for (double w : transitions) {
      photon_threshold = std::max(photon_threshold, purcell_photon_threshold(res.detuning(), w));
    }
  }

  double max_rate = 0.0;
  double omega_min = kInf;
  if (!transitions.empty()) {
    const auto [lo, hi] = std::minmax_element(transitions.begin(), transitions.end());
    omega_min = *lo;
    for (double w : uniform_grid(*lo, *hi, 401)) {
      for (double sign : {1.0, -1.0}) {
        max_rate = std::max(max_rate, spectrum.gamma_matrix(sign * w).cwiseAbs().maxCoeff());
      }
    }
  }
  report.max_rate = max_rate;

  report.dispersive = {margin >= thresholds.dispersive_margin * (1.0 - kSlack), margin,
                       thresholds.dispersive_margin};
  const double born = std::isfinite(omega_min) ? max_rate / omega_min : 0.0;
  report.born = {born <= thresholds.born * (1.0 + kSlack), born, thresholds.born};
  const double markov = std::isfinite(min_kappa) ? max_rate / min_kappa : 0.0;
  report.markov = {markov <= thresholds.markov * (1.0 + kSlack), markov, thresholds.markov};
  report.leakage = {leak <= thresholds.leakage * (1.0 + kSlack), leak, thresholds.leakage};
  if (design.n_resonators() == 0 || transitions.empty()) {
    report.purcell = {true, std::isfinite(min_photons) ? min_photons : 0.0, 0.0};
  } else {
    report.purcell = {min_photons > photon_threshold, min_photons, photon_threshold};
  }
  return report;
}

DispersiveModel build_dispersive_model(const SpectralDecomposition& decomp,
                                       std::span<const Operator> couplings,
                                       const ResonatorDesign& design,
                                       const RegimeThresholds& thresholds) {
  require_channels(couplings, design);
  DispersiveModel model;
  const double wr = design.resonators.empty() ? 1.0 : design.resonators.front().frequency;
  for (const Operator& s : couplings) model.r_ops.push_back(r_operator(s, decomp, wr));
  std::vector<double> photons;
  for (std::size_t nu = 0; nu < design.n_resonators(); ++nu) {
    model.a_ops.push_back(a_operator(decomp, couplings, design, nu));
    photons.push_back(photon_number(design, nu));
  }
  model.h_star = modified_hamiltonian(decomp, couplings, design, photons);
  model.s_hat = coupling_operators(decomp, couplings, design).s_hat;
  model.validity =
      regime_check(decomp, couplings, design, transition_spectrum(design), thresholds);
  return model;
}

std::vector<RatePoint> rate_curve(const EnergyWindow& window, const SingleResonator& resonator,
                                  double g, std::size_t n) {
  std::vector<RatePoint> out;
  for (double w : uniform_grid(window.omega_min, window.omega_max, n)) {
    out.push_back({w, rate_model(-w, resonator, g), rate_model(w, resonator, g)});
  }
  return out;
}

double rate_cap_factor(std::span<const RatePoint> curve, double cap) {
  double peak = 0.0;
  for (const RatePoint& p : curve) peak = std::max(peak, p.cooling);
  if (peak == 0.0) return 0.0;
  return cap / peak;
}

}  // namespace thermalbath
