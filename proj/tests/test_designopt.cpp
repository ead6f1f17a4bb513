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
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "thermalbath/designopt.hpp"
#include "thermalbath/errors.hpp"
#include "thermalbath/random.hpp"

using namespace thermalbath;

namespace {

ResonatorDesign base_design(std::size_t channels, double detuning = -1.0, double nbar = 1.0) {
  ResonatorDesign d;
  const double kappa = 0.62, wr = 3.1;
  d.resonators.push_back(Resonator{drive_amplitude_for(nbar, detuning, kappa), wr + detuning, kappa, wr});
  d.couplings = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(channels), 1, 0.3);
  return d;
}

DesignProblem qubit_problem(double temperature = 5.0) {
  DesignProblem p;
  p.temperature = temperature;
  p.window = EnergyWindow{5.0, 5.0};
  p.free_parameters = {FreeParameter{ParameterKind::detuning, 0, -3.0, 3.0}};
  p.base = base_design(1, 1.0);
  Operator h = Operator::Zero(2, 2);
  h(0, 0) = 2.5;
  h(1, 1) = -2.5;
  p.system = SystemModel{h, {pauli::x()}};
  return p;
}

DesignProblem chain_problem(double temperature = 5.0) {
  DesignProblem p;
  p.temperature = temperature;
  p.window = EnergyWindow{4.6, 5.4};
  p.free_parameters = {FreeParameter{ParameterKind::detuning, 0, -3.0, 3.0}};
  p.base = base_design(3);
  const std::vector<double> w{2.5, 2.5, 2.5};
  const std::vector<double> j{0.06, -0.03};
  p.system = SystemModel{ising_chain_hamiltonian(3, w, j), pauli_x_couplings(3)};
  return p;
}

double rosenbrock(const Eigen::VectorXd& x) {
  return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
}

}  // namespace

TEST_CASE("enum names round-trip") {
  for (Objective o : {Objective::minimax, Objective::integral}) CHECK(objective_from_string(to_string(o)) == o);
  for (SpectrumModel m : {SpectrumModel::collective, SpectrumModel::transition, SpectrumModel::composite}) {
    CHECK(spectrum_model_from_string(to_string(m)) == m);
  }
  for (ParameterKind k : {ParameterKind::drive_amplitude, ParameterKind::detuning, ParameterKind::kappa,
                          ParameterKind::photon_number}) {
    CHECK(parameter_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS_AS(objective_from_string("fastest"), ArgumentError);
}

TEST_CASE("problem validation") {
  auto p = chain_problem();
  CHECK_NOTHROW(validate(p));
  auto none = p;
  none.free_parameters.clear();
  CHECK_THROWS_AS(validate(none), ArgumentError);
  auto inf = p;
  inf.free_parameters[0].upper = INFINITY;
  CHECK_THROWS_AS(validate(inf), ArgumentError);
  auto bad_window = p;
  bad_window.window = EnergyWindow{0.0, 1.0};
  CHECK_THROWS_AS(validate(bad_window), ArgumentError);
  auto bad_res = p;
  bad_res.free_parameters[0].resonator = 2;
  CHECK_THROWS_AS(validate(bad_res), ArgumentError);
}

TEST_CASE("parameters round-trip and hold the photon number") {
  auto p = chain_problem();
  Eigen::VectorXd x(1);
  x << -1.7;
  const auto d = apply_parameters(p, x);
  CHECK(d.resonators[0].detuning() == doctest::Approx(-1.7));
  CHECK(photon_number(d, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(extract_parameters(p, d)(0) == doctest::Approx(-1.7));
  p.hold_photon_number = false;
  const auto free = apply_parameters(p, x);
  CHECK(free.resonators[0].drive_amplitude == p.base.resonators[0].drive_amplitude);
}

TEST_CASE("objectives match independent quadrature") {
  auto p = chain_problem();
  p.model = SpectrumModel::collective;
  p.base.couplings = Eigen::MatrixXd::Ones(3, 1);
  const auto design = p.base;
  const double nbar = photon_number(design, 0);
  const double center = -design.resonators[0].detuning();
  const double t = p.temperature;
  auto lam = [&](double w) { return oracle::lorentzian(nbar, center, 0.62, w); };
  auto ratio = [&](double w) { return std::abs(lam(-w) / lam(w) - std::exp(-w / t)); };
  const double integral = evaluate_objective(p, design, Objective::integral, 20001);
  CHECK(integral == doctest::Approx(oracle::simpson(ratio, 4.6, 5.4, 200000)).epsilon(1e-8));
  double mm = 0.0;
  for (std::size_t i = 0; i < 401; ++i) {
    const double w = 4.6 + 0.8 * static_cast<double>(i) / 400.0;
    mm = std::max(mm, std::abs(std::exp(-w / t) * lam(w) - lam(-w)));
  }
  CHECK(evaluate_objective(p, design, Objective::minimax, 401) == doctest::Approx(mm).epsilon(1e-12));

  // Photon number scales every weight: minimax is linear, the ratio form invariant.
  ResonatorDesign brighter = design;
  brighter.resonators[0].drive_amplitude *= std::sqrt(3.0);
  CHECK(evaluate_objective(p, brighter, Objective::minimax, 401) ==
        doctest::Approx(3.0 * evaluate_objective(p, design, Objective::minimax, 401)).epsilon(1e-12));
  CHECK(evaluate_objective(p, brighter, Objective::integral, 401) ==
        doctest::Approx(evaluate_objective(p, design, Objective::integral, 401)).epsilon(1e-12));

  ResonatorDesign dark = design;
  dark.resonators[0].drive_amplitude = 0.0;
  CHECK_THROWS_AS(evaluate_objective(p, dark, Objective::integral, 401), RatioUndefinedError);
  CHECK(evaluate_objective(p, dark, Objective::minimax, 401) == 0.0);
}

TEST_CASE("Nelder-Mead") {
  Eigen::VectorXd lo(2), hi(2), x0(2);
  lo << -2, -1;
  hi << 2, 3;
  x0 << -1.2, 1.0;
  const auto r = nelder_mead(rosenbrock, x0, lo, hi);
  CHECK(r.converged);
  CHECK(r.x(0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.x(1) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(r.value <= r.initial_value);

  // Minimum outside the box lands on the boundary.
  auto shifted = [](const Eigen::VectorXd& x) { return (x.array() - 5.0).square().sum(); };
  const auto b = nelder_mead(shifted, x0, lo, hi);
  CHECK(b.x(0) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(b.x(1) == doctest::Approx(3.0).epsilon(1e-6));

  auto throwing = [](const Eigen::VectorXd& x) {
    if (x(0) > 0.5) throw std::runtime_error("outside");
    return (x(0) - 0.5) * (x(0) - 0.5);
  };
  Eigen::VectorXd l1(1), h1(1), s1(1);
  l1 << 0.0;
  h1 << 1.0;
  s1 << 0.1;
  const auto t = nelder_mead(throwing, s1, l1, h1);
  CHECK(std::isfinite(t.value));
  CHECK(t.x(0) <= 0.5);
}

TEST_CASE("nonnegative least squares") {
  Eigen::MatrixXd a(4, 3);
  a << 1, 0, 1, 0, 1, 1, 1, 1, 0, 2, 0, 1;
  Eigen::VectorXd truth(3);
  truth << 0.5, 0.0, 2.0;
  const Eigen::VectorXd x = nnls(a, a * truth);
  CHECK((x - truth).norm() < 1e-10);

  Eigen::VectorXd b(4);
  b << -1, 2, -3, 1;
  const Eigen::VectorXd y = nnls(a, b);
  CHECK(y.minCoeff() >= 0.0);
  // KKT: gradient nonnegative, zero on the active set.
  const Eigen::VectorXd grad = a.transpose() * (a * y - b);
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(grad(i) >= -1e-10);
    if (y(i) > 0) CHECK(std::abs(grad(i)) < 1e-10);
  }
}

TEST_CASE("single qubit design is red detuned") {
  const auto p = qubit_problem();
  const auto r = optimize(p, 4, 7);
  CHECK(r.converged);
  CHECK(r.design.resonators[0].detuning() < 0.0);
  CHECK(r.objective_value >= 0.0);
  for (const auto& s : r.starts) CHECK(r.objective_value <= s.initial_value);
  REQUIRE(r.gibbs_fidelity.has_value());
  CHECK(*r.gibbs_fidelity > 0.9);
}

TEST_CASE("chain design reaches high fidelity and is deterministic") {
  const auto p = chain_problem();
  const auto a = optimize(p, 3, 11, 1);
  const auto b = optimize(p, 3, 11, 3);
  CHECK(a.design.resonators[0].detuning() < 0.0);
  REQUIRE(a.gibbs_fidelity.has_value());
  CHECK(*a.gibbs_fidelity >= 0.95);
  CHECK(a.objective_value == b.objective_value);
  CHECK(a.design.resonators[0].drive_frequency == b.design.resonators[0].drive_frequency);
  CHECK(a.best_start == b.best_start);
  CHECK(*a.gibbs_fidelity == *b.gibbs_fidelity);
  for (const auto& s : a.starts) CHECK(a.objective_value <= s.initial_value);
  CHECK(design_fidelity(p, a.design) == doctest::Approx(*a.gibbs_fidelity).epsilon(1e-12));
}

TEST_CASE("best objective is non-increasing in the number of starts") {
  auto p = chain_problem(2.5);
  p.objective = Objective::minimax;
  p.free_parameters.push_back(FreeParameter{ParameterKind::kappa, 0, 0.1, 0.62});
  double prev = INFINITY;
  for (std::size_t seeds : {1u, 2u, 4u}) {
    const auto r = optimize(p, seeds, 3);
    CHECK(r.objective_value <= prev);
    prev = r.objective_value;
  }
}

TEST_CASE("resonator-count sweep is monotone") {
  auto p = chain_problem();
  p.objective = Objective::minimax;
  const auto sweep = sweep_resonator_count(p, 3, 2, 5);
  REQUIRE(sweep.size() == 3);
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    CHECK(sweep[i].n_resonators == i + 1);
    CHECK(sweep[i].result.design.n_resonators() == i + 1);
    if (i > 0) CHECK(sweep[i].result.objective_value <= sweep[i - 1].result.objective_value);
  }
}

TEST_CASE("two-group construction") {
  const EnergyWindow win{4.6, 5.4};
  auto flat = [](double) { return 1.0; };
  CHECK_THROWS_AS(two_group_construction(5.0, win, flat, 0), ArgumentError);
  CHECK_THROWS_AS(two_group_construction(5.0, win, [](double) { return -1.0; }, 4), ArgumentError);

  const auto r4 = two_group_construction(5.0, win, flat, 4);
  const auto r8 = two_group_construction(5.0, win, flat, 8);
  const auto r16 = two_group_construction(5.0, win, flat, 16);
  CHECK(r4.components.size() == 8);
  CHECK(r8.components.size() == 16);
  CHECK(r8.group_a.own_window < r4.group_a.own_window);
  CHECK(r8.kms_integral < r4.kms_integral);
  CHECK(r16.kms_integral < r8.kms_integral);
  CHECK(r16.kms_integral * 2.0 <= r4.kms_integral);
  for (const auto& c : r8.components) {
    CHECK(c.weight >= 0.0);
    CHECK(c.width > 0.0);
  }
  // Centers of group a sit on the negative window, group b on the positive one.
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(r8.components[i].center <= -4.6);
    CHECK(r8.components[i].center >= -5.4);
    CHECK(r8.components[8 + i].center >= 4.6);
    CHECK(r8.components[8 + i].center <= 5.4);
  }
  // The assembled spectrum tracks the target shape on both windows.
  for (double w : {4.7, 5.0, 5.3}) {
    const double ratio = r16.spectrum.gamma(0, 0, -w) / r16.spectrum.gamma(0, 0, w);
    CHECK(ratio == doctest::Approx(std::exp(-w / 5.0)).epsilon(0.05));
  }
}

TEST_CASE("random stream is reproducible") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
