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

// Hilbert-space operator algebra for few-qubit systems.
//
// Units: hbar = k_B = 1, every energy/frequency/rate/temperature is in GHz.
// Qubit 0 is the most-significant tensor factor, so for n qubits the
// computational basis index is b_0 b_1 ... b_{n-1} read as a binary number
// and |0> is the +1 eigenstate of Z.

#ifndef THERMALBATH_OPERATORS_HPP
#define THERMALBATH_OPERATORS_HPP

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace thermalbath {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;

namespace pauli {
Operator x();
Operator y();
Operator z();
}  // namespace pauli

Operator identity(std::size_t dim);

/// kron(I, ..., op, ..., I) with `op` acting on qubit `site` of `n_qubits`.
Operator embed(const Operator& op, std::size_t site, std::size_t n_qubits);

/// Max elementwise |A - A^dagger| <= tol * max(1, max|A_ij|).
bool is_hermitian(const Operator& a, double tol = 1e-12);

/// H = sum_a omega_a Z_a + sum_a J_a Z_a Z_{a+1}. Diagonal, dim 2^n.
Operator ising_chain_hamiltonian(std::size_t n, std::span<const double> omegas,
                                 std::span<const double> couplings);

/// H = a sum_i X_i + b sum_i J_i Z_i Z_{i+1} (nearest-neighbour J, length n-1).
Operator transverse_ising_hamiltonian(std::size_t n, double a, double b,
                                      std::span<const double> couplings);

/// {X_0, ..., X_{n-1}}, the single-flip coupling set of the chain example.
std::vector<Operator> pauli_x_couplings(std::size_t n);

/// Eigen-decomposition of a Hermitian H with energies grouped into projectors.
///
/// Eigenvalues closer than delta_bohr (chained, in ascending order) share one
/// projector. Bohr frequencies are the distinct values of e_k - e_j over all
/// group pairs, clustered with the same tolerance and exactly antisymmetric.
class SpectralDecomposition {
 public:
  SpectralDecomposition(const Operator& hamiltonian, std::optional<double> delta_bohr);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(hamiltonian_.rows()); }
  const Operator& hamiltonian() const noexcept { return hamiltonian_; }
  double delta_bohr() const noexcept { return delta_bohr_; }

  /// Distinct energies, ascending.
  const std::vector<double>& energies() const noexcept { return energies_; }
  const std::vector<Operator>& projectors() const noexcept { return projectors_; }
  const std::vector<double>& bohr_frequencies() const noexcept { return bohr_; }

  /// Per-eigenvector energies (ascending) and the unitary whose columns are eigenvectors.
  const Eigen::VectorXd& level_energies() const noexcept { return level_energies_; }
  const Operator& eigenvectors() const noexcept { return eigenvectors_; }
  /// Group index of each eigenvector.
  const std::vector<std::size_t>& level_group() const noexcept { return level_group_; }

  /// Index into bohr_frequencies() for e_k - e_j (group indices j, k).
  std::size_t pair_bohr_index(std::size_t j, std::size_t k) const {
    return pair_bohr_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  }
  /// Index of the Bohr frequency within delta_bohr of omega, if any.
  std::optional<std::size_t> bohr_index(double omega) const;

  /// Matrix of `op` in the eigenbasis: V^dagger op V.
  Operator to_eigenbasis(const Operator& op) const;
  Operator from_eigenbasis(const Operator& op) const;

 private:
  Operator hamiltonian_;
  double delta_bohr_ = 0.0;
  Eigen::VectorXd level_energies_;
  Operator eigenvectors_;
  std::vector<std::size_t> level_group_;
  std::vector<double> energies_;
  std::vector<Operator> projectors_;
  std::vector<double> bohr_;
  Eigen::Matrix<std::size_t, Eigen::Dynamic, Eigen::Dynamic> pair_bohr_;
};

/// Throws ArgumentError for non-Hermitian input. Default delta_bohr is
/// 1e-9 * max|eps_k| (1e-12 when H = 0).
SpectralDecomposition spectral_decomposition(const Operator& h,
                                             std::optional<double> delta_bohr = std::nullopt);

/// S(omega) = sum_{eps' - eps = omega} Pi(eps) S Pi(eps'). Zero when omega is
/// not a Bohr frequency. For Hermitian S the negative-frequency component is
/// the exact adjoint of the positive one.
Operator eigenoperator(const Operator& s, const SpectralDecomposition& decomp, double omega);

/// All components of S indexed like decomp.bohr_frequencies().
std::vector<Operator> eigenoperator_components(const Operator& s,
                                               const SpectralDecomposition& decomp);

struct EnergyWindow {
  double omega_min = 0.0;
  double omega_max = 0.0;

  double span() const noexcept { return omega_max - omega_min; }
  bool contains(double omega, double tol = 0.0) const noexcept {
    return omega >= omega_min - tol && omega <= omega_max + tol;
  }
};

/// Throws ArgumentError unless 0 < omega_min <= omega_max.
void validate(const EnergyWindow& window);

/// Smallest and largest positive Bohr frequency with a nonzero
/// (> 1e-12) matrix element of some coupling. Throws BathCannotActError.
EnergyWindow energy_window(const SpectralDecomposition& decomp,
                           std::span<const Operator> couplings);

/// Closed form 2[min(omega_a - |J_a| - |J_{a-1}|), max(omega_a + |J_a| + |J_{a-1}|)]
/// for single flips on an Ising chain. With j_bound in place of every |J_a| it is
/// the uniform window that covers every draw J_a in [-j_bound, j_bound].
EnergyWindow chain_window_closed_form(std::span<const double> omegas,
                                      std::span<const double> couplings);
EnergyWindow chain_window_uniform_bound(std::span<const double> omegas, double j_bound);

}  // namespace thermalbath

#endif  // THERMALBATH_OPERATORS_HPP
