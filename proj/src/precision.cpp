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

#include "thermalbath/precision.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "thermalbath/errors.hpp"

namespace thermalbath {

namespace {

constexpr double kMatrixElementTol = 1e-12;

Operator psd_sqrt(const Operator& x) {
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (x + x.adjoint()));
  const Eigen::VectorXd s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double log_in(LogBase base, double x) {
  return base == LogBase::natural ? std::log(x) : std::log2(x);
}

double trace_norm(const Operator& x) {
  if (x.size() == 0) return 0.0;
  return Eigen::BDCSVD<Operator>(x).singularValues().sum();
}

double fidelity(const Operator& rho, const Operator& sigma) {
  const Operator sr = psd_sqrt(rho);
  const Operator inner = sr * sigma * sr;
  Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (inner + inner.adjoint()));
  const double root_sum = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::min(1.0, root_sum * root_sum);
}

std::size_t g_of_d(std::size_t d, HamiltonianClass cls) {
  if (d == 0) throw ArgumentError("g_of_d: dimension must be positive");
  if (cls == HamiltonianClass::general) return d * (d + 1) / 2;
  if (!std::has_single_bit(d)) {
    throw ArgumentError("g_of_d: Ising class requires d = 2^n");
  }
  const auto n = static_cast<std::size_t>(std::countr_zero(d));
  return n * (n + 1) / 2;
}

GenCount gen_count(const SpectralDecomposition& decomp, std::span<const Operator> couplings) {
  const auto& bohr = decomp.bohr_frequencies();
  const std::size_t m = decomp.energies().size();
  const auto& groups = decomp.level_group();
  const auto d = static_cast<Eigen::Index>(decomp.dim());
  std::vector<std::size_t> counts(bohr.size(), 0);

  for (const Operator& s : couplings) {
    const Operator s_eig = decomp.to_eigenbasis(s);
    // Largest |<a|S|c>| over each block Pi(eps_j) S Pi(eps_k).
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                                  static_cast<Eigen::Index>(m));
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        const auto j = static_cast<Eigen::Index>(groups[static_cast<std::size_t>(r)]);
        const auto k = static_cast<Eigen::Index>(groups[static_cast<std::size_t>(c)]);
        block(j, k) = std::max(block(j, k), std::abs(s_eig(r, c)));
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        if (block(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) > kMatrixElementTol) {
          ++counts[decomp.pair_bohr_index(j, k)];
        }
      }
    }
  }

  GenCount out;
  for (std::size_t b = 0; b < bohr.size(); ++b) {
    if (counts[b] == 0) continue;
    out.per_omega.emplace_back(bohr[b], counts[b]);
    if (bohr[b] < 0.0) out.total_negative += counts[b];
  }
  return out;
}

double precision_rhs(double violation, double lambda, std::size_t d, HamiltonianClass cls,
                     LogBase prefactor_log) {
  if (!(lambda > 0.0)) throw ArgumentError("precision bound: lambda must be positive");
  const double g = static_cast<double>(g_of_d(d, cls));
  return 6.0 * (log_in(prefactor_log, static_cast<double>(d)) + 1.0) / lambda * g * g * violation;
}

double required_precision(double epsilon, double lambda, std::size_t d, HamiltonianClass cls,
                          LogBase prefactor_log) {
  if (!(epsilon >= 0.0)) throw ArgumentError("required_precision: epsilon must be >= 0");
  if (!(lambda > 0.0)) throw ArgumentError("required_precision: lambda must be positive");
  const double g = static_cast<double>(g_of_d(d, cls));
  return epsilon * lambda / (6.0 * (log_in(prefactor_log, static_cast<double>(d)) + 1.0) * g * g);
}

PrecisionReport precision_bound(const LindbladGenerator& actual, const BathSpectrum& spectrum,
                                const SpectralDecomposition& decomp,
                                std::span<const Operator> couplings, double temperature,
                                const EnergyWindow& window, const PrecisionOptions& options) {
  const BathSpectrum completed = spectrum.davies_completion(temperature);
  const LindbladGenerator davies = build_generator(decomp, couplings, completed, Frame::interaction);

  PrecisionReport report;
  report.lambda = spectral_gap(davies);
  report.g_of_d = g_of_d(decomp.dim(), options.hamiltonian_class);
  report.gen_sum = gen_count(decomp, couplings).total_negative;

  KmsResidualOptions sampling = options.sampling;
  sampling.compute_ratio = false;
  report.max_kms_violation = kms_residual(spectrum, temperature, window, sampling).max_abs;
  report.rhs_bound = precision_rhs(report.max_kms_violation, report.lambda, decomp.dim(),
                                   options.hamiltonian_class, options.prefactor_log);

  const SteadyState eq = steady_state(actual);
  const GibbsState th = gibbs_state(decomp, temperature);
  report.lhs = trace_norm(eq.rho - th.density);
  report.holds = report.lhs <= report.rhs_bound + 1e-9;
  return report;
}

GibbsPerturbation gibbs_perturbation_bound(const Operator& h1, const Operator& h2,
                                           double temperature) {
  if (!(temperature > 0.0)) throw ArgumentError("gibbs_perturbation_bound: T must be positive");
  if (h1.rows() != h2.rows() || h1.cols() != h2.cols()) {
    throw ArgumentError("gibbs_perturbation_bound: Hamiltonians differ in dimension");
  }
  GibbsPerturbation out;
  out.bound = 2.0 * std::expm1(trace_norm(h1 - h2) / temperature);
  const GibbsState r1 = gibbs_state(spectral_decomposition(h1), temperature);
  const GibbsState r2 = gibbs_state(spectral_decomposition(h2), temperature);
  out.actual = trace_norm(r1.density - r2.density);
  return out;
}

}  // namespace thermalbath
