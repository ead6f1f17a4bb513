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

#include "thermalbath/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "thermalbath/errors.hpp"

namespace thermalbath {

namespace {

constexpr double kMatrixElementTol = 1e-12;

bool is_exactly_diagonal(const Operator& h) {
  for (Eigen::Index c = 0; c < h.cols(); ++c) {
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
      if (r != c && h(r, c) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

std::size_t checked_qubit_dim(std::size_t n) {
  if (n == 0) throw ArgumentError("qubit count must be >= 1");
  if (n > 12) throw ArgumentError("qubit count " + std::to_string(n) + " exceeds dense limit");
  return std::size_t{1} << n;
}

}  // namespace

namespace pauli {

Operator x() {
  Operator m = Operator::Zero(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

Operator y() {
  Operator m = Operator::Zero(2, 2);
  m(0, 1) = Complex(0.0, -1.0);
  m(1, 0) = Complex(0.0, 1.0);
  return m;
}

Operator z() {
  Operator m = Operator::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

}  // namespace pauli

Operator identity(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return Operator::Identity(d, d);
}

Operator embed(const Operator& op, std::size_t site, std::size_t n_qubits) {
  if (site >= n_qubits) throw ArgumentError("site index out of range");
  if (op.rows() != 2 || op.cols() != 2) throw ArgumentError("embed expects a 2x2 operator");
  const std::size_t dim = checked_qubit_dim(n_qubits);
  const std::size_t shift = n_qubits - 1 - site;
  Operator out = Operator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t rb = (r >> shift) & 1U;
    for (std::size_t cb = 0; cb < 2; ++cb) {
      const Complex v = op(static_cast<Eigen::Index>(rb), static_cast<Eigen::Index>(cb));
      if (v == Complex(0.0, 0.0)) continue;
      const std::size_t c = (r & ~(std::size_t{1} << shift)) | (cb << shift);
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return out;
}

bool is_hermitian(const Operator& a, double tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

Operator ising_chain_hamiltonian(std::size_t n, std::span<const double> omegas,
                                 std::span<const double> couplings) {
  const std::size_t dim = checked_qubit_dim(n);
  if (omegas.size() != n) {
    throw ArgumentError("ising_chain_hamiltonian: expected " + std::to_string(n) +
                        " qubit frequencies, got " + std::to_string(omegas.size()));
  }
  if (couplings.size() != n - 1) {
    throw ArgumentError("ising_chain_hamiltonian: expected " + std::to_string(n - 1) +
                        " couplings, got " + std::to_string(couplings.size()));
  }
  Operator h = Operator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) {
    auto spin = [&](std::size_t q) { return ((b >> (n - 1 - q)) & 1U) ? -1.0 : 1.0; };
    double e = 0.0;
    for (std::size_t q = 0; q < n; ++q) e += omegas[q] * spin(q);
    for (std::size_t q = 0; q + 1 < n; ++q) e += couplings[q] * spin(q) * spin(q + 1);
    h(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b)) = e;
  }
  return h;
}

Operator transverse_ising_hamiltonian(std::size_t n, double a, double b,
                                      std::span<const double> couplings) {
  const std::size_t dim = checked_qubit_dim(n);
  if (couplings.size() != n - 1) {
    throw ArgumentError("transverse_ising_hamiltonian: expected " + std::to_string(n - 1) +
                        " couplings, got " + std::to_string(couplings.size()));
  }
  Operator h = Operator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const Operator x = pauli::x();
  const Operator z = pauli::z();
  for (std::size_t q = 0; q < n; ++q) h += a * embed(x, q, n);
  for (std::size_t q = 0; q + 1 < n; ++q) {
    h += (b * couplings[q]) * (embed(z, q, n) * embed(z, q + 1, n));
  }
  return h;
}

std::vector<Operator> pauli_x_couplings(std::size_t n) {
  std::vector<Operator> out;
  out.reserve(n);
  for (std::size_t q = 0; q < n; ++q) out.push_back(embed(pauli::x(), q, n));
  return out;
}

SpectralDecomposition::SpectralDecomposition(const Operator& hamiltonian,
                                             std::optional<double> delta_bohr)
    : hamiltonian_(hamiltonian) {
  if (hamiltonian.rows() == 0 || hamiltonian.rows() != hamiltonian.cols()) {
    throw ArgumentError("spectral_decomposition: expected a non-empty square matrix");
  }
  if (!is_hermitian(hamiltonian)) {
    throw ArgumentError("spectral_decomposition: Hamiltonian is not Hermitian");
  }
  const Eigen::Index d = hamiltonian.rows();

  if (is_exactly_diagonal(hamiltonian)) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) {
      return hamiltonian(l, l).real() < hamiltonian(r, r).real();
    });
    level_energies_.resize(d);
    eigenvectors_ = Operator::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::Index src = order[static_cast<std::size_t>(i)];
      level_energies_(i) = hamiltonian(src, src).real();
      eigenvectors_(src, i) = 1.0;
    }
  } else {
    Eigen::SelfAdjointEigenSolver<Operator> solver(hamiltonian);
    if (solver.info() != Eigen::Success) {
      throw Error("spectral_decomposition: Hermitian eigensolver failed");
    }
    level_energies_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
    const double h_norm = hamiltonian.norm();
    for (Eigen::Index i = 0; i < d; ++i) {
      const double residual =
          (hamiltonian * eigenvectors_.col(i) - level_energies_(i) * eigenvectors_.col(i)).norm();
      if (residual > 1e-9 * std::max(h_norm, 1.0)) {
        throw Error("spectral_decomposition: eigenpair residual " + std::to_string(residual) +
                    " exceeds tolerance");
      }
    }
  }

  const double max_abs = level_energies_.cwiseAbs().maxCoeff();
  delta_bohr_ = delta_bohr.value_or(max_abs > 0.0 ? 1e-9 * max_abs : 1e-12);
  if (!(delta_bohr_ >= 0.0)) throw ArgumentError("delta_bohr must be non-negative");

  // Group ascending eigenvalues whose consecutive gaps are within delta_bohr.
  level_group_.assign(static_cast<std::size_t>(d), 0);
  std::vector<std::vector<Eigen::Index>> members;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (i == 0 || level_energies_(i) - level_energies_(i - 1) > delta_bohr_) members.emplace_back();
    members.back().push_back(i);
    level_group_[static_cast<std::size_t>(i)] = members.size() - 1;
  }
  for (const auto& group : members) {
    double sum = 0.0;
    Operator proj = Operator::Zero(d, d);
    for (Eigen::Index i : group) {
      sum += level_energies_(i);
      proj += eigenvectors_.col(i) * eigenvectors_.col(i).adjoint();
    }
    energies_.push_back(sum / static_cast<double>(group.size()));
    projectors_.push_back(std::move(proj));
  }

  // Positive Bohr frequencies, clustered; negatives mirror them exactly.
  const std::size_t m = energies_.size();
  struct PairDiff {
    double diff;
    std::size_t j;
    std::size_t k;
  };
  std::vector<PairDiff> diffs;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) diffs.push_back({energies_[k] - energies_[j], j, k});
  }
  std::stable_sort(diffs.begin(), diffs.end(),
                   [](const PairDiff& l, const PairDiff& r) { return l.diff < r.diff; });
  std::vector<double> positive;
  std::vector<std::size_t> cluster_of(diffs.size());
  std::size_t cluster_start = 0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (i == 0 || diffs[i].diff - diffs[i - 1].diff > delta_bohr_) {
      if (i > 0) {
        double sum = 0.0;
        for (std::size_t t = cluster_start; t < i; ++t) sum += diffs[t].diff;
        positive.push_back(sum / static_cast<double>(i - cluster_start));
      }
      cluster_start = i;
    }
    cluster_of[i] = positive.size();
  }
  if (!diffs.empty()) {
    double sum = 0.0;
    for (std::size_t t = cluster_start; t < diffs.size(); ++t) sum += diffs[t].diff;
    positive.push_back(sum / static_cast<double>(diffs.size() - cluster_start));
  }

  const std::size_t p = positive.size();
  bohr_.reserve(2 * p + 1);
  for (std::size_t i = p; i-- > 0;) bohr_.push_back(-positive[i]);
  bohr_.push_back(0.0);
  for (double w : positive) bohr_.push_back(w);

  const auto mi = static_cast<Eigen::Index>(m);
  pair_bohr_.resize(mi, mi);
  for (Eigen::Index j = 0; j < mi; ++j) pair_bohr_(j, j) = p;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(diffs[i].j);
    const auto k = static_cast<Eigen::Index>(diffs[i].k);
    pair_bohr_(j, k) = p + 1 + cluster_of[i];
    pair_bohr_(k, j) = p - 1 - cluster_of[i];
  }
}

std::optional<std::size_t> SpectralDecomposition::bohr_index(double omega) const {
  auto it = std::lower_bound(bohr_.begin(), bohr_.end(), omega);
  std::optional<std::size_t> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (auto cand : {it, it == bohr_.begin() ? it : std::prev(it)}) {
    if (cand == bohr_.end()) continue;
    const double dist = std::abs(*cand - omega);
    if (dist <= delta_bohr_ && dist < best_dist) {
      best_dist = dist;
      best = static_cast<std::size_t>(cand - bohr_.begin());
    }
  }
  return best;
}

Operator SpectralDecomposition::to_eigenbasis(const Operator& op) const {
  return eigenvectors_.adjoint() * op * eigenvectors_;
}

Operator SpectralDecomposition::from_eigenbasis(const Operator& op) const {
  return eigenvectors_ * op * eigenvectors_.adjoint();
}

SpectralDecomposition spectral_decomposition(const Operator& h, std::optional<double> delta_bohr) {
  return SpectralDecomposition(h, delta_bohr);
}

std::vector<Operator> eigenoperator_components(const Operator& s,
                                               const SpectralDecomposition& decomp) {
  const auto d = static_cast<Eigen::Index>(decomp.dim());
  if (s.rows() != d || s.cols() != d) throw ArgumentError("coupling operator has wrong dimension");
  const Operator s_eig = decomp.to_eigenbasis(s);
  const auto& groups = decomp.level_group();
  const std::size_t nb = decomp.bohr_frequencies().size();
  const std::size_t zero = nb / 2;
  const bool hermitian = is_hermitian(s);

  std::vector<Operator> in_eig(nb, Operator::Zero(d, d));
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      const std::size_t b = decomp.pair_bohr_index(groups[static_cast<std::size_t>(r)],
                                                   groups[static_cast<std::size_t>(c)]);
      if (hermitian && b < zero) continue;
      in_eig[b](r, c) = s_eig(r, c);
    }
  }
  std::vector<Operator> out(nb);
  for (std::size_t b = zero; b < nb; ++b) out[b] = decomp.from_eigenbasis(in_eig[b]);
  if (hermitian) out[zero] = 0.5 * (out[zero] + out[zero].adjoint()).eval();
  for (std::size_t b = 0; b < zero; ++b) {
    out[b] = hermitian ? Operator(out[nb - 1 - b].adjoint()) : decomp.from_eigenbasis(in_eig[b]);
  }
  return out;
}

Operator eigenoperator(const Operator& s, const SpectralDecomposition& decomp, double omega) {
  const auto d = static_cast<Eigen::Index>(decomp.dim());
  if (s.rows() != d || s.cols() != d) throw ArgumentError("coupling operator has wrong dimension");
  const auto idx = decomp.bohr_index(omega);
  if (!idx) return Operator::Zero(d, d);
  return eigenoperator_components(s, decomp)[*idx];
}

void validate(const EnergyWindow& window) {
  if (!(window.omega_min > 0.0) || !(window.omega_max >= window.omega_min) ||
      !std::isfinite(window.omega_max)) {
    throw ArgumentError("energy window requires 0 < omega_min <= omega_max");
  }
}

EnergyWindow energy_window(const SpectralDecomposition& decomp,
                           std::span<const Operator> couplings) {
  const auto& groups = decomp.level_group();
  const auto& e = decomp.energies();
  const auto d = static_cast<Eigen::Index>(decomp.dim());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const Operator& s : couplings) {
    const Operator s_eig = decomp.to_eigenbasis(s);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) {
        const std::size_t gj = groups[static_cast<std::size_t>(r)];
        const std::size_t gk = groups[static_cast<std::size_t>(c)];
        if (gk <= gj || std::abs(s_eig(r, c)) <= kMatrixElementTol) continue;
        const double w = e[gk] - e[gj];
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
    }
  }
  if (!std::isfinite(lo)) throw BathCannotActError();
  return {lo, hi};
}

EnergyWindow chain_window_closed_form(std::span<const double> omegas,
                                      std::span<const double> couplings) {
  const std::size_t n = omegas.size();
  if (n == 0 || couplings.size() != n - 1) {
    throw ArgumentError("chain window: need n frequencies and n-1 couplings");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < n; ++a) {
    double j_sum = 0.0;
    if (a + 1 < n) j_sum += std::abs(couplings[a]);
    if (a > 0) j_sum += std::abs(couplings[a - 1]);
    lo = std::min(lo, omegas[a] - j_sum);
    hi = std::max(hi, omegas[a] + j_sum);
  }
  return {2.0 * lo, 2.0 * hi};
}

EnergyWindow chain_window_uniform_bound(std::span<const double> omegas, double j_bound) {
  if (omegas.empty()) throw ArgumentError("chain window: need at least one qubit");
  std::vector<double> bounds(omegas.size() - 1, std::abs(j_bound));
  return chain_window_closed_form(omegas, bounds);
}

}  // namespace thermalbath
