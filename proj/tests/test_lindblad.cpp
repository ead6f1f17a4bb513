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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "thermalbath/errors.hpp"
#include "thermalbath/lindblad.hpp"

using namespace thermalbath;

namespace {

constexpr double kRate = 0.01;
constexpr double kT = 5.0;

Operator qubit_h() {
  Operator h = Operator::Zero(2, 2);
  h(0, 0) = 2.5;
  h(1, 1) = -2.5;
  return h;
}

std::vector<double> random_chain_couplings(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  std::vector<double> j(n);
  for (double& v : j) v = u(rng);
  return j;
}

// Superoperator of the exact-KMS dissipator on a diagonal Hamiltonian, applied
// basis element by basis element with column stacking.
oracle::M oracle_superoperator(const std::vector<double>& e, std::size_t n, double base, double t,
                               const oracle::M* h_lab) {
  std::vector<oracle::Jump> jumps;
  for (std::size_t q = 0; q < n; ++q) {
    for (const auto& [omega, op] : oracle::diagonal_eigenoperators(e, oracle::flip(q, n))) {
      const double rate = omega >= 0 ? base : base * std::exp(omega / t);
      jumps.push_back({rate, op, op});
    }
  }
  const auto d = static_cast<Eigen::Index>(e.size());
  oracle::M sup(d * d, d * d);
  for (Eigen::Index c = 0; c < d; ++c) {
    for (Eigen::Index r = 0; r < d; ++r) {
      oracle::M basis = oracle::M::Zero(d, d);
      basis(r, c) = 1.0;
      oracle::M out = oracle::apply_dissipator(jumps, basis);
      if (h_lab) out += oracle::C(0, -1) * (*h_lab * basis - basis * *h_lab);
      for (Eigen::Index cc = 0; cc < d; ++cc) {
        for (Eigen::Index rr = 0; rr < d; ++rr) sup(cc * d + rr, c * d + r) = out(rr, cc);
      }
    }
  }
  return sup;
}

}  // namespace

TEST_CASE("vectorization is column stacking") {
  Operator x(2, 2);
  x << 1.0, 2.0, 3.0, 4.0;
  const auto v = vectorize(x);
  CHECK(v(1).real() == 3.0);
  CHECK(v(2).real() == 2.0);
  CHECK((unvectorize(v, 2) - x).norm() == 0.0);
}

TEST_CASE("Gibbs state examples") {
  const auto d = spectral_decomposition(qubit_h());
  const auto g = gibbs_state(d, 5.0);
  const double e = std::exp(-1.0);
  CHECK(g.density(0, 0).real() == doctest::Approx(e / (1.0 + e)).epsilon(1e-14));
  CHECK(g.density(1, 1).real() == doctest::Approx(1.0 / (1.0 + e)).epsilon(1e-14));
  CHECK(g.density(0, 0).real() == doctest::Approx(0.2689).epsilon(1e-4));

  const auto hot = gibbs_state(d, 1e6).density;
  CHECK((hot - 0.5 * Operator::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-4);

  const auto flat = gibbs_state(spectral_decomposition(Operator::Zero(4, 4)), 1.0).density;
  CHECK((flat - 0.25 * Operator::Identity(4, 4)).norm() == 0.0);

  CHECK_THROWS_AS(gibbs_state(d, 0.0), ArgumentError);
  CHECK_THROWS_AS(gibbs_state(d, -1.0), ArgumentError);
}

TEST_CASE("Gibbs state invariants") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Operator h = oracle::random_hermitian(4, rng);
    const auto d = spectral_decomposition(h);
    const auto rho = gibbs_state(d, 0.7).density;
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
    CHECK((h * rho - rho * h).norm() < 1e-9);
    CHECK((rho - oracle::gibbs(h, 0.7)).norm() < 1e-12);
    const Operator pops = d.to_eigenbasis(rho);
    for (Eigen::Index k = 1; k < 4; ++k) CHECK(pops(k, k).real() <= pops(k - 1, k - 1).real() + 1e-15);
  }
}

TEST_CASE("single qubit exact-KMS generator") {
  const auto d = spectral_decomposition(qubit_h());
  const std::vector<Operator> s{pauli::x()};
  const auto spec = BathSpectrum::exact_kms(1, kRate, kT);
  const auto gen = build_generator(d, s, spec);
  const double down = kRate;
  const double up = kRate * std::exp(-5.0 / kT);

  // Rate equations for the excited population p (state |0>).
  Operator rho = Operator::Zero(2, 2);
  rho(0, 0) = 0.3;
  rho(1, 1) = 0.7;
  const Operator out = gen.apply(rho);
  CHECK(out(0, 0).real() == doctest::Approx(-down * 0.3 + up * 0.7).epsilon(1e-13));
  CHECK(out(1, 1).real() == doctest::Approx(down * 0.3 - up * 0.7).epsilon(1e-13));

  const auto ss = steady_state(gen);
  const Operator gibbs = gibbs_state(d, kT).density;
  CHECK(0.5 * oracle::trace_norm(ss.rho - gibbs) < 1e-8);
  CHECK(ss.rho(0, 0).real() / ss.rho(1, 1).real() == doctest::Approx(up / down).epsilon(1e-10));
  CHECK(ss.residual <= 1e-9);

  // T1 branch at up + down, coherence branch at half.
  CHECK(spectral_gap(gen) == doctest::Approx(0.5 * (up + down)).epsilon(1e-9));
  Eigen::ComplexEigenSolver<Superoperator> es(gen.superoperator());
  const auto ev = es.eigenvalues();
  bool t1 = false;
  for (Eigen::Index i = 0; i < ev.size(); ++i) t1 = t1 || std::abs(ev(i).real() + up + down) < 1e-12;
  CHECK(t1);

  CHECK(verify_fixed_point(gen, gibbs) <= 1e-10);
  CHECK(verify_fixed_point(gen, gibbs_state(d, 2.5).density) > 1e-4);
}

TEST_CASE("two-level trajectory decays at the T1 rate") {
  const auto d = spectral_decomposition(qubit_h());
  const std::vector<Operator> s{pauli::x()};
  const auto gen = build_generator(d, s, BathSpectrum::exact_kms(1, kRate, kT));
  const double down = kRate;
  const double up = kRate * std::exp(-1.0);
  const double p_inf = up / (up + down);
  const Operator mixed = 0.5 * Operator::Identity(2, 2);
  const auto traj = propagate(gen, mixed, 400.0, 40);
  REQUIRE(traj.states.size() == 41);
  CHECK((traj.states[0] - mixed).norm() == 0.0);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double t = traj.times[k];
    const double p = p_inf + (0.5 - p_inf) * std::exp(-(up + down) * t);
    CHECK(traj.states[k](0, 0).real() == doctest::Approx(p).epsilon(1e-9));
    CHECK(std::abs(traj.states[k].trace() - 1.0) < 1e-8);
  }
}

TEST_CASE("propagation from the fixed point is constant") {
  std::mt19937_64 rng(4);
  const std::vector<double> w{2.5, 2.5};
  const auto j = random_chain_couplings(rng, 1);
  const auto d = spectral_decomposition(ising_chain_hamiltonian(2, w, j));
  const auto s = pauli_x_couplings(2);
  const auto gen = build_generator(d, s, BathSpectrum::exact_kms(2, kRate, kT));
  const auto rho = gibbs_state(d, kT).density;
  const auto traj = propagate(gen, rho, 100.0, 10);
  for (const auto& st : traj.states) CHECK((st - rho).norm() < 1e-9);
  const double lam = spectral_gap(gen);
  const Operator mixed = 0.25 * Operator::Identity(4, 4);
  const auto long_run = propagate(gen, mixed, 20.0 / lam, 20);
  CHECK(0.5 * oracle::trace_norm(long_run.states.back() - rho) < 1e-6);
  for (const auto& st : long_run.states) {
    Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (st + st.adjoint()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-7);
  }
}

TEST_CASE("zero spectrum generators") {
  const auto d = spectral_decomposition(qubit_h());
  const std::vector<Operator> s{pauli::x()};
  const auto zero = BathSpectrum::zero(1);
  const auto interaction = build_generator(d, s, zero, Frame::interaction);
  CHECK(interaction.superoperator().norm() == 0.0);
  std::mt19937_64 rng(1);
  const Operator rho = oracle::random_density(2, rng);
  CHECK(verify_fixed_point(interaction, rho) == 0.0);
  const auto lab = build_generator(d, s, zero, Frame::lab);
  const Operator h = qubit_h();
  CHECK((lab.apply(rho) - oracle::C(0, -1) * (h * rho - rho * h)).norm() < 1e-14);
  CHECK_THROWS_AS(steady_state(lab), NonErgodicError);
}

TEST_CASE("superoperator matches a directly applied dissipator") {
  std::mt19937_64 rng(8);
  for (std::size_t n = 1; n <= 3; ++n) {
    const std::vector<double> w(n, 2.5);
    const auto j = random_chain_couplings(rng, n - 1);
    const auto e = oracle::ising_energies(w, j);
    const Operator h = ising_chain_hamiltonian(n, w, j);
    const auto d = spectral_decomposition(h);
    const auto s = pauli_x_couplings(n);
    const auto spec = BathSpectrum::exact_kms(n, kRate, kT);
    const auto gen = build_generator(d, s, spec, Frame::interaction);
    CHECK((gen.superoperator() - oracle_superoperator(e, n, kRate, kT, nullptr)).norm() < 1e-14);
    const auto lab = build_generator(d, s, spec, Frame::lab);
    CHECK((lab.superoperator() - oracle_superoperator(e, n, kRate, kT, &h)).norm() < 1e-12);
  }
}

TEST_CASE("generator invariants on random instances") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
    const std::vector<double> w(n, 2.5);
    const auto j = random_chain_couplings(rng, n - 1);
    const auto d = spectral_decomposition(ising_chain_hamiltonian(n, w, j));
    const auto s = pauli_x_couplings(n);
    for (Frame frame : {Frame::interaction, Frame::lab}) {
      const auto gen = build_generator(d, s, BathSpectrum::exact_kms(n, kRate, kT), frame);
      CHECK(trace_preservation_defect(gen) <= 1e-9);
      const auto dim = std::size_t{1} << n;
      const Operator rho = oracle::random_hermitian(dim, rng);
      CHECK(hermiticity_preservation_defect(gen, rho) <= 1e-10);
      Eigen::ComplexEigenSolver<Superoperator> es(gen.superoperator());
      CHECK(es.eigenvalues().real().maxCoeff() <= 1e-9);
      const double dt = 1e-3 / gen.superoperator().norm();
      CHECK(choi_min_eigenvalue(gen, dt) >= -1e-8);
      CHECK(kernel_dimension(gen) == 1);
      CHECK(verify_fixed_point(gen, gibbs_state(d, kT).density) <= 1e-9);
    }
  }
}

TEST_CASE("frames agree on steady-state populations") {
  std::mt19937_64 rng(10);
  const std::vector<double> w{2.5, 2.5, 2.5};
  const auto j = random_chain_couplings(rng, 2);
  const auto d = spectral_decomposition(ising_chain_hamiltonian(3, w, j));
  const auto s = pauli_x_couplings(3);
  const auto spec = BathSpectrum::exact_kms(3, kRate, kT);
  const auto a = steady_state(build_generator(d, s, spec, Frame::interaction));
  const auto b = steady_state(build_generator(d, s, spec, Frame::lab));
  const Operator pa = d.to_eigenbasis(a.rho);
  const Operator pb = d.to_eigenbasis(b.rho);
  for (Eigen::Index k = 0; k < 8; ++k) CHECK(std::abs(pa(k, k) - pb(k, k)) < 1e-9);
  CHECK(0.5 * oracle::trace_norm(a.rho - gibbs_state(d, kT).density) < 1e-6);
}

TEST_CASE("gap scales linearly and matches a dense eigensolve") {
  std::mt19937_64 rng(12);
  const std::vector<double> w{2.5, 2.5};
  const auto j = random_chain_couplings(rng, 1);
  const auto e = oracle::ising_energies(w, j);
  const auto d = spectral_decomposition(ising_chain_hamiltonian(2, w, j));
  const auto s = pauli_x_couplings(2);
  const double lam = spectral_gap(build_generator(d, s, BathSpectrum::exact_kms(2, kRate, kT)));
  const double lam3 = spectral_gap(build_generator(d, s, BathSpectrum::exact_kms(2, 3 * kRate, kT)));
  CHECK(lam3 == doctest::Approx(3 * lam).epsilon(1e-9));

  Eigen::ComplexEigenSolver<oracle::M> es(oracle_superoperator(e, 2, kRate, kT, nullptr));
  double best = -1e300;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double re = es.eigenvalues()(i).real();
    if (re < -1e-12) best = std::max(best, re);
  }
  CHECK(lam == doctest::Approx(-best).epsilon(1e-9));
  CHECK_THROWS_AS(spectral_gap(build_generator(d, s, BathSpectrum::zero(2))), GapUnresolvedError);
}

TEST_CASE("ergodicity check") {
  SUBCASE("single qubit") {
    const auto d = spectral_decomposition(qubit_h());
    const std::vector<Operator> s{pauli::x()};
    const auto r = ergodicity_check(d, s);
    CHECK(r.ergodic);
    CHECK(r.consistent);
  }
  SUBCASE("second qubit untouched") {
    const Operator h = embed(pauli::z(), 0, 2) + embed(pauli::z(), 1, 2);
    const auto d = spectral_decomposition(h);
    const std::vector<Operator> s{embed(pauli::x(), 0, 2)};
    const auto r = ergodicity_check(d, s);
    CHECK_FALSE(r.ergodic);
    CHECK(r.components.size() == 2);
    CHECK(r.reference_kernel_dimension > 1);
    CHECK(r.consistent);
  }
  SUBCASE("three qubit chain with all flips") {
    const std::vector<double> w{2.5, 2.5, 2.5};
    const std::vector<double> j{0.05, -0.07};
    const auto d = spectral_decomposition(ising_chain_hamiltonian(3, w, j));
    const auto s = pauli_x_couplings(3);
    const auto r = ergodicity_check(d, s);
    CHECK(r.ergodic);
    CHECK(r.components.size() == 1);
    CHECK(r.reference_kernel_dimension == 1);
  }
}

TEST_CASE("non-ergodic steady state is rejected") {
  const Operator h = embed(pauli::z(), 0, 2) + 0.7 * embed(pauli::z(), 1, 2);
  const auto d = spectral_decomposition(h);
  const std::vector<Operator> s{embed(pauli::x(), 0, 2)};
  const auto gen = build_generator(d, s, BathSpectrum::exact_kms(1, kRate, kT));
  CHECK_THROWS_AS(steady_state(gen), NonErgodicError);
}

TEST_CASE("mode spectra are positive by construction") {
  std::vector<SpectralMode> modes{SpectralMode{LorentzianComponent{1.0, 5.0, 0.5}, std::nullopt},
                                  SpectralMode{LorentzianComponent{1.0, 5.0, 0.5}, std::nullopt}};
  Eigen::MatrixXd coupling(2, 2);
  coupling << 1.0, 1.0, 1.0, -1.0;
  const auto spec = BathSpectrum::from_modes(modes, coupling);
  const Operator h = embed(pauli::z(), 0, 2) * 2.5 + embed(pauli::z(), 1, 2) * 2.4;
  const auto d = spectral_decomposition(h);
  const auto s = pauli_x_couplings(2);
  const auto gen = build_generator(d, s, spec);
  CHECK(choi_min_eigenvalue(gen, 1e-3 / gen.superoperator().norm()) >= -1e-8);

  auto negative = modes;
  negative[0].line.weight = -1.0;
  CHECK_THROWS_AS(BathSpectrum::from_modes(negative, coupling), ArgumentError);
  auto flat = modes;
  flat[1].line.width = 0.0;
  CHECK_THROWS_AS(BathSpectrum::from_modes(flat, coupling), ArgumentError);
}
