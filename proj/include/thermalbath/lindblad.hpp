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

// Davies-type Lindblad generators on column-stacked density matrices.
//
// vec(X) stacks the columns of X, so vec(A X B) = (B^T kron A) vec(X). In
// particular the jump term A rho B^dagger lifts to conj(B) kron A, and the
// anticommutator {M, rho} to I kron M + M^T kron I.

#ifndef THERMALBATH_LINDBLAD_HPP
#define THERMALBATH_LINDBLAD_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "thermalbath/bath.hpp"
#include "thermalbath/operators.hpp"

namespace thermalbath {

using Superoperator = Eigen::MatrixXcd;

Eigen::VectorXcd vectorize(const Operator& x);
Operator unvectorize(const Eigen::VectorXcd& v, std::size_t dim);

/// Interaction picture omits -i[H_S, .]; lab frame includes it.
enum class Frame { lab, interaction };

struct JumpTerm {
  double omega = 0.0;
  std::size_t alpha = 0;
  std::size_t alpha_prime = 0;
  double rate = 0.0;  // gamma_{alpha alpha'}(omega)
  Operator s_alpha;   // S_alpha(omega)
  Operator s_alpha_prime;
};

class LindbladGenerator {
 public:
  LindbladGenerator(std::size_t dim, Superoperator superop, std::vector<JumpTerm> inventory,
                    Frame frame);

  std::size_t dim() const noexcept { return dim_; }
  const Superoperator& superoperator() const noexcept { return superop_; }
  const std::vector<JumpTerm>& inventory() const noexcept { return inventory_; }
  Frame frame() const noexcept { return frame_; }
  bool includes_hamiltonian() const noexcept { return frame_ == Frame::lab; }

  Operator apply(const Operator& rho) const;

 private:
  std::size_t dim_;
  Superoperator superop_;
  std::vector<JumpTerm> inventory_;
  Frame frame_;
};

struct GibbsState {
  Operator density;
  double temperature = 0.0;
};

/// exp(-H/T)/Z, shifted by the ground energy. Throws ArgumentError for T <= 0.
GibbsState gibbs_state(const SpectralDecomposition& decomp, double temperature);

/// L = sum_{omega,a,a'} gamma_{aa'}(omega) (S_a'(omega) . S_a(omega)^dagger
///       - 1/2 {S_a(omega)^dagger S_a'(omega), .})  [- i[H_S, .] in the lab frame].
/// Channel a of the spectrum drives couplings[a]. Throws NotCompletelyPositiveError
/// if some [gamma_ab(omega)] has an eigenvalue below -1e-10 * trace.
LindbladGenerator build_generator(const SpectralDecomposition& decomp,
                                  std::span<const Operator> couplings,
                                  const BathSpectrum& spectrum, Frame frame = Frame::interaction);

enum class SteadyStatePath { least_squares, eigenvector };

struct SteadyState {
  Operator rho;
  SteadyStatePath path = SteadyStatePath::least_squares;
  double residual = 0.0;  // ||L(rho)||_F
  std::size_t kernel_dimension = 1;
};

/// Default gap/kernel tolerance: 1e-10 * ||L||_F.
double default_gap_tolerance(const LindbladGenerator& gen);

/// Number of singular values of L below `tol` (defaults as above).
std::size_t kernel_dimension(const LindbladGenerator& gen, std::optional<double> tol = std::nullopt);

/// Solves {L vec(rho) = 0, tr rho = 1} by least squares; falls back to the
/// null eigenvector when the residual exceeds 1e-8. Throws NonErgodicError
/// when the kernel is more than one-dimensional.
SteadyState steady_state(const LindbladGenerator& gen);

/// lambda = -max{Re mu : Re mu < -gap_tol}. Throws GapUnresolvedError.
double spectral_gap(const LindbladGenerator& gen, std::optional<double> gap_tol = std::nullopt);

struct Trajectory {
  std::vector<double> times;  // ns
  std::vector<Operator> states;
};

/// rho(t_k) = exp(L dt)^k rho0 with one scaling-and-squaring exponential.
/// Throws StepInstabilityError on trace drift > 1e-6.
Trajectory propagate(const LindbladGenerator& gen, const Operator& rho0, double t_final,
                     std::size_t n_steps);

/// ||L(rho)||_F.
double verify_fixed_point(const LindbladGenerator& gen, const Operator& rho);

struct ErgodicityReport {
  bool ergodic = false;
  /// Connected components of the level graph, as eigenvector indices.
  std::vector<std::vector<std::size_t>> components;
  /// Kernel dimension of a generator built from a strictly positive exact-KMS spectrum.
  std::size_t reference_kernel_dimension = 0;
  /// Graph verdict agrees with the reference kernel dimension.
  bool consistent = false;
};

/// Levels are linked when |<e|S_a|e'>| > 1e-12 for some a; ergodic iff connected.
ErgodicityReport ergodicity_check(const SpectralDecomposition& decomp,
                                  std::span<const Operator> couplings);

/// ||L^dagger vec(I)||: zero for trace-preserving generators.
double trace_preservation_defect(const LindbladGenerator& gen);

/// ||L(rho)^dagger - L(rho^dagger)||_F for a given rho.
double hermiticity_preservation_defect(const LindbladGenerator& gen, const Operator& rho);

/// Smallest eigenvalue of the Choi matrix of exp(L dt).
double choi_min_eigenvalue(const LindbladGenerator& gen, double dt);

/// max |gamma| over the inventory divided by the smallest positive Bohr
/// frequency: the rotating-wave diagnostic (not enforced).
double rotating_wave_ratio(const LindbladGenerator& gen, const SpectralDecomposition& decomp);

}  // namespace thermalbath

#endif  // THERMALBATH_LINDBLAD_HPP
