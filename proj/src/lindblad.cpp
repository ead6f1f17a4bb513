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

#include "thermalbath/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "thermalbath/errors.hpp"

namespace thermalbath {

namespace {

constexpr double kMatrixElementTol = 1e-12;

Superoperator kron(const Operator& a, const Operator& b) {
  Superoperator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

bool is_negligible(const Operator& s, double scale) {
  return s.norm() <= kMatrixElementTol * std::max(1.0, scale);
}

Operator hermitized(const Operator& x) { return 0.5 * (x + x.adjoint()); }

Operator normalized_density(const Eigen::VectorXcd& v, std::size_t dim) {
  Operator rho = hermitized(unvectorize(v, dim));
  const Complex tr = rho.trace();
  if (std::abs(tr) == 0.0) throw Error("steady state: kernel vector has zero trace");
  return rho / tr.real();
}

void require_density(const Operator& rho, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  if (rho.rows() != d || rho.cols() != d) throw ArgumentError("density matrix has wrong dimension");
  if (!is_hermitian(rho, 1e-10)) throw ArgumentError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-8) {
    throw ArgumentError("density matrix trace differs from 1");
  }
}

}  // namespace

Eigen::VectorXcd vectorize(const Operator& x) {
  return Eigen::Map<const Eigen::VectorXcd>(x.data(), x.size());
}

Operator unvectorize(const Eigen::VectorXcd& v, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  if (v.size() != d * d) throw ArgumentError("unvectorize: length is not dim^2");
  return Eigen::Map<const Operator>(v.data(), d, d);
}

LindbladGenerator::LindbladGenerator(std::size_t dim, Superoperator superop,
                                     std::vector<JumpTerm> inventory, Frame frame)
    : dim_(dim), superop_(std::move(superop)), inventory_(std::move(inventory)), frame_(frame) {
  const auto n = static_cast<Eigen::Index>(dim * dim);
  if (superop_.rows() != n || superop_.cols() != n) {
    throw ArgumentError("superoperator must be dim^2 x dim^2");
  }
}

Operator LindbladGenerator::apply(const Operator& rho) const {
  return unvectorize(superop_ * vectorize(rho), dim_);
}

GibbsState gibbs_state(const SpectralDecomposition& decomp, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ArgumentError("gibbs_state: temperature must be positive");
  }
  const Eigen::VectorXd& e = decomp.level_energies();
  const double ground = e.minCoeff();
  Eigen::VectorXd p = (-(e.array() - ground) / temperature).exp();
  p /= p.sum();
  Operator rho = decomp.eigenvectors() * p.cast<Complex>().asDiagonal() *
                 decomp.eigenvectors().adjoint();
  return {hermitized(rho), temperature};
}

LindbladGenerator build_generator(const SpectralDecomposition& decomp,
                                  std::span<const Operator> couplings,
                                  const BathSpectrum& spectrum, Frame frame) {
  const std::size_t d = decomp.dim();
  const auto di = static_cast<Eigen::Index>(d);
  if (couplings.size() != spectrum.channels()) {
    throw ArgumentError("build_generator: " + std::to_string(couplings.size()) +
                        " coupling operators for a spectrum with " +
                        std::to_string(spectrum.channels()) + " channels");
  }

  std::vector<std::vector<Operator>> components;
  components.reserve(couplings.size());
  double coupling_scale = 0.0;
  for (const Operator& s : couplings) {
    components.push_back(eigenoperator_components(s, decomp));
    coupling_scale = std::max(coupling_scale, s.norm());
  }

  const Operator id = identity(d);
  Superoperator superop = Superoperator::Zero(di * di, di * di);
  std::vector<JumpTerm> inventory;
  const auto& bohr = decomp.bohr_frequencies();

  for (std::size_t b = 0; b < bohr.size(); ++b) {
    std::vector<std::size_t> active;
    for (std::size_t a = 0; a < couplings.size(); ++a) {
      if (!is_negligible(components[a][b], coupling_scale)) active.push_back(a);
    }
    if (active.empty()) continue;

    const double omega = bohr[b];
    const Eigen::MatrixXd rates = spectrum.gamma_matrix(omega);
    const auto na = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd sub(na, na);
    for (Eigen::Index i = 0; i < na; ++i) {
      for (Eigen::Index j = 0; j < na; ++j) {
        sub(i, j) = rates(static_cast<Eigen::Index>(active[static_cast<std::size_t>(i)]),
                          static_cast<Eigen::Index>(active[static_cast<std::size_t>(j)]));
      }
    }
    const Eigen::MatrixXd sym = 0.5 * (sub + sub.transpose());
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues()(0);
    const double trace = std::max(sym.trace(), 0.0);
    if (min_eig < -1e-10 * trace || (trace == 0.0 && min_eig < 0.0)) {
      throw NotCompletelyPositiveError(omega, min_eig);
    }

    for (std::size_t a : active) {
      for (std::size_t ap : active) {
        const double rate = rates(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(ap));
        if (rate == 0.0) continue;
        const Operator& s_a = components[a][b];
        const Operator& s_ap = components[ap][b];
        const Operator m = s_a.adjoint() * s_ap;
        superop += rate * (kron(s_a.conjugate(), s_ap) -
                           0.5 * (kron(id, m) + kron(m.transpose(), id)));
        inventory.push_back({omega, a, ap, rate, s_a, s_ap});
      }
    }
  }

  if (frame == Frame::lab) {
    const Operator& h = decomp.hamiltonian();
    superop += Complex(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));
  }
  return LindbladGenerator(d, std::move(superop), std::move(inventory), frame);
}

double default_gap_tolerance(const LindbladGenerator& gen) {
  return 1e-10 * gen.superoperator().norm();
}

std::size_t kernel_dimension(const LindbladGenerator& gen, std::optional<double> tol) {
  const double t = tol.value_or(default_gap_tolerance(gen));
  Eigen::BDCSVD<Superoperator> svd(gen.superoperator());
  const Eigen::VectorXd& sv = svd.singularValues();
  return static_cast<std::size_t>((sv.array() <= t).count());
}

SteadyState steady_state(const LindbladGenerator& gen) {
  const std::size_t d = gen.dim();
  const Superoperator& l = gen.superoperator();
  const Eigen::Index n = l.rows();

  SteadyState out;
  out.kernel_dimension = kernel_dimension(gen);
  if (out.kernel_dimension > 1) throw NonErgodicError(out.kernel_dimension);

  // Trace row scaled to the generator so the stacked system stays balanced.
  const double scale = std::max(l.norm() / static_cast<double>(d), 1e-300);
  Superoperator stacked(n + 1, n);
  stacked.topRows(n) = l;
  stacked.row(n) = scale * vectorize(identity(d)).transpose();
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 1);
  rhs(n) = scale;
  const Eigen::VectorXcd x = stacked.colPivHouseholderQr().solve(rhs);
  out.rho = normalized_density(x, d);
  out.residual = verify_fixed_point(gen, out.rho);
  out.path = SteadyStatePath::least_squares;

  if (!(out.residual <= 1e-8)) {
    Eigen::ComplexEigenSolver<Superoperator> es(l, true);
    Eigen::Index best = 0;
    es.eigenvalues().cwiseAbs().minCoeff(&best);
    out.rho = normalized_density(es.eigenvectors().col(best), d);
    out.residual = verify_fixed_point(gen, out.rho);
    out.path = SteadyStatePath::eigenvector;
  }
  return out;
}

double spectral_gap(const LindbladGenerator& gen, std::optional<double> gap_tol) {
  const double tol = gap_tol.value_or(default_gap_tolerance(gen));
  Eigen::ComplexEigenSolver<Superoperator> es(gen.superoperator(), false);
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double re = es.eigenvalues()(i).real();
    if (re < -tol) best = std::max(best, re);
  }
  if (!std::isfinite(best)) throw GapUnresolvedError();
  return -best;
}

Trajectory propagate(const LindbladGenerator& gen, const Operator& rho0, double t_final,
                     std::size_t n_steps) {
  const std::size_t d = gen.dim();
  require_density(rho0, d);
  if (!(t_final >= 0.0)) throw ArgumentError("propagate: t_final must be >= 0");

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);
  if (n_steps == 0 || t_final == 0.0) return traj;

  const double dt = t_final / static_cast<double>(n_steps);
  const Superoperator step = (gen.superoperator() * Complex(dt, 0.0)).exp();
  Eigen::VectorXcd v = vectorize(rho0);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    v = step * v;
    Operator rho = unvectorize(v, d);
    const double drift = std::abs(rho.trace() - Complex(1.0, 0.0));
    if (drift > 1e-6 || !std::isfinite(drift)) throw StepInstabilityError(drift, 4 * n_steps);
    traj.times.push_back(k == n_steps ? t_final : dt * static_cast<double>(k));
    traj.states.push_back(std::move(rho));
  }
  return traj;
}

double verify_fixed_point(const LindbladGenerator& gen, const Operator& rho) {
  return (gen.superoperator() * vectorize(rho)).norm();
}

ErgodicityReport ergodicity_check(const SpectralDecomposition& decomp,
                                  std::span<const Operator> couplings) {
  const std::size_t d = decomp.dim();
  std::vector<std::size_t> parent(d);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Operator& s : couplings) {
    const Operator s_eig = decomp.to_eigenbasis(s);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = r + 1; c < d; ++c) {
        const auto ri = static_cast<Eigen::Index>(r);
        const auto ci = static_cast<Eigen::Index>(c);
        if (std::max(std::abs(s_eig(ri, ci)), std::abs(s_eig(ci, ri))) > kMatrixElementTol) {
          parent[find(r)] = find(c);
        }
      }
    }
  }

  ErgodicityReport report;
  std::vector<std::size_t> root_slot(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t root = find(i);
    if (root_slot[root] == d) {
      root_slot[root] = report.components.size();
      report.components.emplace_back();
    }
    report.components[root_slot[root]].push_back(i);
  }
  report.ergodic = report.components.size() == 1;

  const auto& e = decomp.energies();
  const double spread = e.back() - e.front();
  const BathSpectrum reference =
      BathSpectrum::exact_kms(couplings.size(), 1.0, spread > 0.0 ? spread : 1.0);
  const LindbladGenerator gen = build_generator(decomp, couplings, reference, Frame::interaction);
  Eigen::BDCSVD<Superoperator> svd(gen.superoperator());
  const Eigen::VectorXd& sv = svd.singularValues();
  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  report.reference_kernel_dimension =
      static_cast<std::size_t>((sv.array() <= 1e-9 * std::max(sigma_max, 1e-300)).count());
  report.consistent = report.ergodic == (report.reference_kernel_dimension == 1);
  return report;
}

double trace_preservation_defect(const LindbladGenerator& gen) {
  return (gen.superoperator().adjoint() * vectorize(identity(gen.dim()))).norm();
}

double hermiticity_preservation_defect(const LindbladGenerator& gen, const Operator& rho) {
  return (Operator(gen.apply(rho).adjoint()) - gen.apply(rho.adjoint())).norm();
}

double choi_min_eigenvalue(const LindbladGenerator& gen, double dt) {
  const auto d = static_cast<Eigen::Index>(gen.dim());
  const Superoperator p = (gen.superoperator() * Complex(dt, 0.0)).exp();
  Operator choi(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
          choi(i * d + a, j * d + b) = p(a + b * d, i + j * d);
        }
      }
    }
  }
  return Eigen::SelfAdjointEigenSolver<Operator>(hermitized(choi)).eigenvalues()(0);
}

double rotating_wave_ratio(const LindbladGenerator& gen, const SpectralDecomposition& decomp) {
  double max_rate = 0.0;
  for (const JumpTerm& t : gen.inventory()) max_rate = std::max(max_rate, std::abs(t.rate));
  const auto& bohr = decomp.bohr_frequencies();
  const std::size_t zero = bohr.size() / 2;
  if (zero + 1 >= bohr.size()) return std::numeric_limits<double>::infinity();
  return max_rate / bohr[zero + 1];
}

}  // namespace thermalbath
