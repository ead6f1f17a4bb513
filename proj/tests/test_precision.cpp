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
#include <set>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "thermalbath/errors.hpp"
#include "thermalbath/precision.hpp"

using namespace thermalbath;

namespace {

ResonatorDesign red_detuned(double nbar, double detuning) {
  ResonatorDesign d;
  const double kappa = 0.62;
  const double wr = 12.0;
  d.resonators.push_back(Resonator{drive_amplitude_for(nbar, detuning, kappa), wr + detuning, kappa, wr});
  d.couplings = Eigen::MatrixXd::Constant(1, 1, 0.1);
  return d;
}

}  // namespace

TEST_CASE("G(d) closed forms") {
  CHECK(g_of_d(8, HamiltonianClass::general) == 36);
  CHECK(g_of_d(8, HamiltonianClass::ising) == 6);
  CHECK(g_of_d(2, HamiltonianClass::general) == 3);
  CHECK(g_of_d(2, HamiltonianClass::ising) == 1);
  CHECK_THROWS_AS(g_of_d(6, HamiltonianClass::ising), ArgumentError);
}

TEST_CASE("trace norm and fidelity") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) {
    const Operator x = oracle::random_hermitian(4, rng);
    CHECK(trace_norm(x) == doctest::Approx(oracle::trace_norm(x)).epsilon(1e-12));
    const Operator rho = oracle::random_density(4, rng);
    CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
    const Operator sigma = oracle::random_density(4, rng);
    const double f = fidelity(rho, sigma);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-12);
    CHECK(f == doctest::Approx(fidelity(sigma, rho)).epsilon(1e-9));
  }
}

TEST_CASE("Gen counts") {
  SUBCASE("single qubit") {
    Operator h = Operator::Zero(2, 2);
    h(0, 0) = 2.5;
    h(1, 1) = -2.5;
    const std::vector<Operator> s{pauli::x()};
    const auto g = gen_count(spectral_decomposition(h), s);
    CHECK(g.total_negative == 1);
    bool found = false;
    for (const auto& [w, c] : g.per_omega) {
      if (std::abs(w + 5.0) < 1e-12) {
        CHECK(c == 1);
        found = true;
      }
    }
    CHECK(found);
  }
  SUBCASE("dense coupling on nondegenerate levels") {
    std::mt19937_64 rng(3);
    for (std::size_t d : {2u, 3u, 5u, 8u}) {
      const Operator h = oracle::random_hermitian(d, rng);
      const std::vector<Operator> s{oracle::random_hermitian(d, rng)};
      CHECK(gen_count(spectral_decomposition(h), s).total_negative == d * (d - 1) / 2);
    }
  }
  SUBCASE("two qubit chain against flip enumeration") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    for (int trial = 0; trial < 10; ++trial) {
      const std::vector<double> w{2.5, trial % 2 ? 2.5 : 2.3};
      const std::vector<double> j{u(rng)};
      const auto e = oracle::ising_energies(w, j);
      // Terms are (level group, level group, channel); equal energies share a group.
      std::set<std::tuple<long long, long long, std::size_t>> terms;
      for (std::size_t q = 0; q < 2; ++q) {
        for (std::size_t s = 0; s < 4; ++s) {
          const std::size_t t = s ^ (std::size_t{1} << (1 - q));
          if (e[t] < e[s]) {
            terms.emplace(std::llround(e[s] * 1e9), std::llround(e[t] * 1e9), q);
          }
        }
      }
      const auto s = pauli_x_couplings(2);
      const auto g = gen_count(spectral_decomposition(ising_chain_hamiltonian(2, w, j)), s);
      CHECK(g.total_negative == terms.size());
    }
  }
}

TEST_CASE("precision bound with an exact spectrum") {
  const std::vector<double> w{2.5, 2.5, 2.5};
  const std::vector<double> j{0.04, -0.08};
  const auto d = spectral_decomposition(ising_chain_hamiltonian(3, w, j));
  const auto s = pauli_x_couplings(3);
  const auto spec = BathSpectrum::exact_kms(3, 0.01, 5.0);
  const auto gen = build_generator(d, s, spec);
  PrecisionOptions opts;
  opts.hamiltonian_class = HamiltonianClass::ising;
  const auto r = precision_bound(gen, spec, d, s, 5.0, energy_window(d, s), opts);
  CHECK(r.max_kms_violation == 0.0);
  CHECK(r.rhs_bound == 0.0);
  CHECK(r.lhs <= 1e-8);
  CHECK(r.holds);
  CHECK(r.g_of_d == 6);
}

TEST_CASE("precision bound with a red-detuned resonator on one qubit") {
  Operator h = Operator::Zero(2, 2);
  h(0, 0) = 2.5;
  h(1, 1) = -2.5;
  const auto d = spectral_decomposition(h);
  const std::vector<Operator> s{pauli::x()};
  for (double detuning : {-1.0, -4.0, -5.0, -6.0}) {
    const auto spec = collective_spectrum(red_detuned(1.0, detuning));
    const auto gen = build_generator(d, s, spec);
    const auto r = precision_bound(gen, spec, d, s, 5.0, energy_window(d, s));
    CHECK(r.lhs > 0.0);
    CHECK(r.lambda > 0.0);
    CHECK(r.lhs <= r.rhs_bound);
    CHECK(r.holds);
    CHECK(r.rhs_bound == doctest::Approx(precision_rhs(r.max_kms_violation, r.lambda, 2,
                                                       HamiltonianClass::general)).epsilon(1e-14));
  }
}

TEST_CASE("precision bound on random chains") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  std::uniform_real_distribution<double> det(-6.0, -1.0);
  const std::vector<double> w{2.5, 2.5, 2.5};
  const auto s = pauli_x_couplings(3);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<double> j{u(rng), u(rng)};
    const auto d = spectral_decomposition(ising_chain_hamiltonian(3, w, j));
    const auto design = red_detuned(1.0, det(rng));
    ResonatorDesign three = design;
    three.couplings = Eigen::MatrixXd::Constant(3, 1, 0.1);
    const auto spec = collective_spectrum(three);
    const auto gen = build_generator(d, s, spec);
    PrecisionOptions opts;
    opts.hamiltonian_class = HamiltonianClass::ising;
    const auto r = precision_bound(gen, spec, d, s, 5.0, energy_window(d, s), opts);
    CHECK(r.lhs <= r.rhs_bound + 1e-9);
  }
}

TEST_CASE("required precision") {
  const double v = required_precision(0.05, 0.01, 8, HamiltonianClass::ising);
  CHECK(v == doctest::Approx(0.05 * 0.01 / (6.0 * (std::log(8.0) + 1.0) * 36.0)).epsilon(1e-14));
  const double v2 = required_precision(0.05, 0.01, 8, HamiltonianClass::ising, LogBase::base2);
  CHECK(v2 == doctest::Approx(0.05 * 0.01 / (6.0 * 4.0 * 36.0)).epsilon(1e-14));
  CHECK(required_precision(0.0, 0.01, 8, HamiltonianClass::general) == 0.0);
  for (LogBase base : {LogBase::natural, LogBase::base2}) {
    for (HamiltonianClass cls : {HamiltonianClass::general, HamiltonianClass::ising}) {
      const double eps = 0.037;
      const double viol = required_precision(eps, 0.02, 4, cls, base);
      CHECK(std::abs(precision_rhs(viol, 0.02, 4, cls, base) - eps) <= 1e-12);
    }
  }
}

TEST_CASE("Gibbs perturbation bound") {
  std::mt19937_64 rng(6);
  const Operator h1 = oracle::random_hermitian(4, rng);
  const auto same = gibbs_perturbation_bound(h1, h1, 5.0);
  CHECK(same.bound == 0.0);
  CHECK(same.actual <= 1e-14);

  Operator h = Operator::Zero(2, 2);
  h(0, 0) = 2.5;
  h(1, 1) = -2.5;
  const Operator h2 = h + 0.01 * pauli::z();
  const auto r = gibbs_perturbation_bound(h, h2, 5.0);
  CHECK(r.bound == doctest::Approx(2.0 * (std::exp(0.02 / 5.0) - 1.0)).epsilon(1e-12));
  CHECK(r.actual == doctest::Approx(oracle::trace_norm(oracle::gibbs(h, 5.0) - oracle::gibbs(h2, 5.0))).epsilon(1e-10));
  CHECK(r.actual <= r.bound);
}
