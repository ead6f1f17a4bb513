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

#include "thermalbath/designopt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <limits>
#include <numeric>
#include <thread>

#include "thermalbath/dispersive.hpp"
#include "thermalbath/errors.hpp"
#include "thermalbath/lindblad.hpp"
#include "thermalbath/precision.hpp"
#include "thermalbath/random.hpp"

namespace thermalbath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename E>
E enum_from(const std::string& name, std::initializer_list<E> values, const char* what) {
  for (E v : values) {
    if (to_string(v) == name) return v;
  }
  throw ArgumentError(std::string("unknown ") + what + ": '" + name + "'");
}

double safe_eval(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x) {
  try {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  } catch (const std::runtime_error&) {
    return kInf;
  } catch (const std::invalid_argument&) {
    return kInf;
  }
}

}  // namespace

std::string to_string(Objective objective) {
  return objective == Objective::minimax ? "minimax" : "integral";
}

std::string to_string(SpectrumModel model) {
  switch (model) {
    case SpectrumModel::collective: return "collective";
    case SpectrumModel::transition: return "transition";
    case SpectrumModel::composite: return "composite";
  }
  return "transition";
}

std::string to_string(ParameterKind kind) {
  switch (kind) {
    case ParameterKind::drive_amplitude: return "drive_amplitude";
    case ParameterKind::detuning: return "detuning";
    case ParameterKind::kappa: return "kappa";
    case ParameterKind::photon_number: return "photon_number";
  }
  return "detuning";
}

Objective objective_from_string(const std::string& name) {
  return enum_from(name, {Objective::minimax, Objective::integral}, "objective");
}

SpectrumModel spectrum_model_from_string(const std::string& name) {
  return enum_from(
      name, {SpectrumModel::collective, SpectrumModel::transition, SpectrumModel::composite},
      "spectrum model");
}

ParameterKind parameter_kind_from_string(const std::string& name) {
  return enum_from(name,
                   {ParameterKind::drive_amplitude, ParameterKind::detuning, ParameterKind::kappa,
                    ParameterKind::photon_number},
                   "free parameter");
}

void validate(const DesignProblem& problem) {
  if (!(problem.temperature > 0.0)) throw ArgumentError("design problem: T must be positive");
  validate(problem.window);
  validate(problem.base);
  if (problem.free_parameters.empty()) {
    throw ArgumentError("design problem: at least one free parameter is required");
  }
  if (problem.grid == 0 || problem.report_grid == 0) {
    throw ArgumentError("design problem: grid sizes must be positive");
  }
  for (const FreeParameter& p : problem.free_parameters) {
    if (p.resonator >= problem.base.n_resonators()) {
      throw ArgumentError("design problem: free parameter refers to resonator " +
                          std::to_string(p.resonator) + " of " +
                          std::to_string(problem.base.n_resonators()));
    }
    if (!std::isfinite(p.lower) || !std::isfinite(p.upper) || !(p.lower < p.upper)) {
      throw ArgumentError("design problem: bounds for " + to_string(p.kind) +
                          " must be finite with lower < upper");
    }
  }
  if (problem.system) {
    if (problem.system->couplings.size() != problem.base.n_channels() &&
        problem.model != SpectrumModel::composite) {
      throw ArgumentError("design problem: system couplings do not match design channels");
    }
  }
}

BathSpectrum build_spectrum(SpectrumModel model, const ResonatorDesign& design) {
  switch (model) {
    case SpectrumModel::collective: return collective_spectrum(design);
    case SpectrumModel::transition: return transition_spectrum(design);
    case SpectrumModel::composite: return composite_spectrum(design);
  }
  return transition_spectrum(design);
}

ResonatorDesign apply_parameters(const DesignProblem& problem, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != problem.free_parameters.size()) {
    throw ArgumentError("apply_parameters: expected one value per free parameter");
  }
  ResonatorDesign design = problem.base;
  const std::size_t nr = design.n_resonators();
  std::vector<double> photons(nr), detuning(nr), kappa(nr), amplitude(nr);
  std::vector<bool> photons_set(nr, false), amplitude_set(nr, false), moved(nr, false);
  for (std::size_t nu = 0; nu < nr; ++nu) {
    photons[nu] = photon_number(problem.base, nu);
    detuning[nu] = design.resonators[nu].detuning();
    kappa[nu] = design.resonators[nu].kappa;
    amplitude[nu] = design.resonators[nu].drive_amplitude;
  }
  for (std::size_t i = 0; i < problem.free_parameters.size(); ++i) {
    const FreeParameter& p = problem.free_parameters[i];
    const double v = x(static_cast<Eigen::Index>(i));
    switch (p.kind) {
      case ParameterKind::drive_amplitude:
        amplitude[p.resonator] = v;
        amplitude_set[p.resonator] = true;
        break;
      case ParameterKind::detuning:
        detuning[p.resonator] = v;
        moved[p.resonator] = true;
        break;
      case ParameterKind::kappa:
        kappa[p.resonator] = v;
        moved[p.resonator] = true;
        break;
      case ParameterKind::photon_number:
        photons[p.resonator] = v;
        photons_set[p.resonator] = true;
        break;
    }
  }
  for (std::size_t nu = 0; nu < nr; ++nu) {
    Resonator& r = design.resonators[nu];
    r.kappa = kappa[nu];
    r.drive_frequency = r.frequency + detuning[nu];
    if (photons_set[nu]) {
      r.drive_amplitude = drive_amplitude_for(std::max(0.0, photons[nu]), detuning[nu], kappa[nu]);
    } else if (amplitude_set[nu]) {
      r.drive_amplitude = amplitude[nu];
    } else if (moved[nu] && problem.hold_photon_number) {
      r.drive_amplitude = drive_amplitude_for(photons[nu], detuning[nu], kappa[nu]);
    }
  }
  return design;
}

Eigen::VectorXd extract_parameters(const DesignProblem& problem, const ResonatorDesign& design) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(problem.free_parameters.size()));
  for (std::size_t i = 0; i < problem.free_parameters.size(); ++i) {
    const FreeParameter& p = problem.free_parameters[i];
    const Resonator& r = design.resonators.at(p.resonator);
    double v = 0.0;
    switch (p.kind) {
      case ParameterKind::drive_amplitude: v = r.drive_amplitude; break;
      case ParameterKind::detuning: v = r.detuning(); break;
      case ParameterKind::kappa: v = r.kappa; break;
      case ParameterKind::photon_number: v = photon_number(design, p.resonator); break;
    }
    x(static_cast<Eigen::Index>(i)) = v;
  }
  return x;
}

double evaluate_objective(const DesignProblem& problem, const ResonatorDesign& design) {
  return evaluate_objective(problem, design, problem.objective, problem.grid);
}

double evaluate_objective(const DesignProblem& problem, const ResonatorDesign& design,
                          Objective objective, std::size_t grid) {
  const BathSpectrum spectrum = build_spectrum(problem.model, design);
  if (objective == Objective::integral) {
    return kms_ratio_integral(spectrum, problem.temperature, problem.window, grid);
  }
  KmsResidualOptions opts;
  opts.n_samples = grid;
  opts.compute_ratio = false;
  return kms_residual(spectrum, problem.temperature, problem.window, opts).max_abs;
}

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                             const Eigen::VectorXd& upper, const NelderMeadOptions& options) {
  const Eigen::Index k = x0.size();
  if (k == 0 || lower.size() != k || upper.size() != k) {
    throw ArgumentError("nelder_mead: dimension mismatch");
  }
  if ((upper.array() <= lower.array()).any()) {
    throw ArgumentError("nelder_mead: require lower < upper");
  }
  const Eigen::ArrayXd scale = upper - lower;
  auto to_x = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return (lower.array() + y.array().min(1.0).max(0.0) * scale).matrix();
  };
  auto clamp = [](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return y.array().min(1.0).max(0.0).matrix();
  };
  auto eval = [&](const Eigen::VectorXd& y) { return safe_eval(f, to_x(y)); };

  std::vector<Eigen::VectorXd> simplex;
  std::vector<double> values;
  const Eigen::VectorXd y0 = clamp(((x0 - lower).array() / scale).matrix());
  simplex.push_back(y0);
  for (Eigen::Index i = 0; i < k; ++i) {
    Eigen::VectorXd y = y0;
    y(i) += (y(i) + options.initial_step <= 1.0) ? options.initial_step : -options.initial_step;
    simplex.push_back(y);
  }
  for (const auto& y : simplex) values.push_back(eval(y));

  NelderMeadResult result;
  result.initial_value = values.front();
  std::vector<std::size_t> order(simplex.size());

  auto sort_simplex = [&]() {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Eigen::VectorXd> s;
    std::vector<double> v;
    for (std::size_t i : order) {
      s.push_back(simplex[i]);
      v.push_back(values[i]);
    }
    simplex = std::move(s);
    values = std::move(v);
  };

  const std::size_t n = simplex.size();
  std::size_t iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    sort_simplex();
    double diameter = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      diameter = std::max(diameter, (simplex[i] - simplex[0]).lpNorm<Eigen::Infinity>());
    }
    if (diameter < options.tolerance) {
      result.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(k);
    for (std::size_t i = 0; i + 1 < n; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(n - 1);
    const Eigen::VectorXd& worst = simplex.back();

    const Eigen::VectorXd yr = clamp(centroid + options.reflection * (centroid - worst));
    const double fr = eval(yr);
    if (fr < values.front()) {
      const Eigen::VectorXd ye = clamp(centroid + options.expansion * (yr - centroid));
      const double fe = eval(ye);
      if (fe < fr) {
        simplex.back() = ye;
        values.back() = fe;
      } else {
        simplex.back() = yr;
        values.back() = fr;
      }
      continue;
    }
    if (fr < values[n - 2]) {
      simplex.back() = yr;
      values.back() = fr;
      continue;
    }
    const bool outside = fr < values.back();
    const Eigen::VectorXd yc =
        outside ? clamp(centroid + options.contraction * (yr - centroid))
                : clamp(centroid + options.contraction * (worst - centroid));
    const double fc = eval(yc);
    if (fc < (outside ? fr : values.back())) {
      simplex.back() = yc;
      values.back() = fc;
      continue;
    }
    for (std::size_t i = 1; i < n; ++i) {
      simplex[i] = simplex[0] + options.shrink * (simplex[i] - simplex[0]);
      values[i] = eval(simplex[i]);
    }
  }
  sort_simplex();
  result.x = to_x(simplex.front());
  result.value = values.front();
  result.iterations = iter;
  return result;
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m) throw ArgumentError("nnls: right-hand side has wrong length");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (n == 0) return x;
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     a.cwiseAbs().colwise().sum().maxCoeff() * static_cast<double>(std::max(m, n));

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    }
    z = Eigen::VectorXd::Zero(n);
    if (idx.empty()) return;
    Eigen::MatrixXd ap(m, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) ap.col(static_cast<Eigen::Index>(c)) = a.col(idx[c]);
    const Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(b);
    for (std::size_t c = 0; c < idx.size(); ++c) z(idx[c]) = zp(static_cast<Eigen::Index>(c));
  };

  const std::size_t max_outer = static_cast<std::size_t>(3 * n) + 10;
  for (std::size_t outer = 0; outer < max_outer; ++outer) {
    const Eigen::VectorXd w = a.transpose() * (b - a * x);
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;

    Eigen::VectorXd z;
    for (std::size_t inner = 0; inner < max_outer; ++inner) {
      solve_passive(z);
      bool feasible = true;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) feasible = false;
      }
      if (feasible) break;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) {
          alpha = std::min(alpha, x(j) / (x(j) - z(j)));
        }
      }
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && std::abs(x(j)) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
    }
    x = z;
  }
  return x.cwiseMax(0.0);
}

double design_fidelity(const DesignProblem& problem, const ResonatorDesign& design) {
  if (!problem.system) throw ArgumentError("design_fidelity: problem has no system model");
  const SpectralDecomposition decomp = spectral_decomposition(problem.system->hamiltonian);
  const BathSpectrum spectrum = build_spectrum(problem.model, design);
  const std::vector<Operator> couplings =
      problem.model == SpectrumModel::composite
          ? coupling_operators(decomp, problem.system->couplings, design).composite
          : problem.system->couplings;
  const LindbladGenerator gen = build_generator(decomp, couplings, spectrum, Frame::interaction);
  const SteadyState ss = steady_state(gen);
  return fidelity(ss.rho, gibbs_state(decomp, problem.temperature).density);
}

DesignResult optimize(const DesignProblem& problem, std::size_t seeds, std::uint64_t rng_seed,
                      std::size_t jobs, const NelderMeadOptions& options) {
  validate(problem);
  if (seeds == 0) throw ArgumentError("optimize: at least one start is required");
  const auto k = static_cast<Eigen::Index>(problem.free_parameters.size());
  Eigen::VectorXd lower(k), upper(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    lower(i) = problem.free_parameters[static_cast<std::size_t>(i)].lower;
    upper(i) = problem.free_parameters[static_cast<std::size_t>(i)].upper;
  }

  std::vector<StartRecord> starts(seeds);
  starts[0].x0 = extract_parameters(problem, problem.base).cwiseMax(lower).cwiseMin(upper);
  Rng rng(rng_seed);
  for (std::size_t s = 1; s < seeds; ++s) {
    starts[s].x0.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) starts[s].x0(i) = rng.uniform(lower(i), upper(i));
  }

  const auto objective = [&](const Eigen::VectorXd& x) {
    return evaluate_objective(problem, apply_parameters(problem, x));
  };
  std::vector<Eigen::VectorXd> finals(seeds);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t s = next++; s < seeds; s = next++) {
      const NelderMeadResult r = nelder_mead(objective, starts[s].x0, lower, upper, options);
      starts[s].initial_value = r.initial_value;
      starts[s].final_value = r.value;
      starts[s].iterations = r.iterations;
      starts[s].converged = r.converged;
      finals[s] = r.x;
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, seeds);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  DesignResult result;
  for (std::size_t s = 0; s < seeds; ++s) {
    if (starts[s].final_value < starts[result.best_start].final_value) result.best_start = s;
    result.iterations += starts[s].iterations;
    const bool improved = starts[s].final_value < starts[s].initial_value ||
                          starts[s].initial_value == 0.0;
    if (starts[s].converged && improved && std::isfinite(starts[s].final_value)) {
      result.converged = true;
    }
  }
  result.design = apply_parameters(problem, finals[result.best_start]);
  result.objective_value = starts[result.best_start].final_value;
  result.starts = std::move(starts);

  if (std::isfinite(result.objective_value)) {
    result.minimax_value =
        evaluate_objective(problem, result.design, Objective::minimax, problem.report_grid);
    try {
      result.integral_value =
          evaluate_objective(problem, result.design, Objective::integral, problem.report_grid);
    } catch (const RatioUndefinedError&) {
    }
    const BathSpectrum spectrum = build_spectrum(problem.model, result.design);
    KmsResidualOptions opts;
    opts.n_samples = problem.report_grid;
    opts.compute_ratio = result.integral_value.has_value();
    result.kms_report = kms_residual(spectrum, problem.temperature, problem.window, opts);
    if (problem.system) {
      try {
        result.gibbs_fidelity = design_fidelity(problem, result.design);
      } catch (const NonErgodicError&) {
      }
    }
  }
  return result;
}

std::vector<SweepPoint> sweep_resonator_count(const DesignProblem& problem,
                                              std::size_t max_resonators, std::size_t seeds,
                                              std::uint64_t rng_seed, std::size_t jobs) {
  validate(problem);
  if (problem.base.n_resonators() != 1) {
    throw ArgumentError("sweep_resonator_count: base design must have one resonator");
  }
  std::vector<FreeParameter> template_params = problem.free_parameters;
  const bool drive_free = std::any_of(template_params.begin(), template_params.end(), [](auto& p) {
    return p.kind == ParameterKind::photon_number || p.kind == ParameterKind::drive_amplitude;
  });
  if (!drive_free) {
    const double n0 = photon_number(problem.base, 0);
    template_params.push_back({ParameterKind::photon_number, 0, 0.0, std::max(n0, 1e-9)});
  }

  std::vector<SweepPoint> out;
  DesignProblem current = problem;
  for (std::size_t nr = 1; nr <= max_resonators; ++nr) {
    if (nr > 1) {
      ResonatorDesign grown = out.back().result.design;
      Resonator extra = grown.resonators.front();
      extra.drive_amplitude = 0.0;
      grown.resonators.push_back(extra);
      Eigen::MatrixXd c(grown.couplings.rows(), grown.couplings.cols() + 1);
      c << grown.couplings, grown.couplings.col(0);
      grown.couplings = c;
      current.base = grown;
      for (FreeParameter q : template_params) {
        if (q.resonator != 0) continue;
        q.resonator = nr - 1;
        current.free_parameters.push_back(q);
      }
    }
    SweepPoint point;
    point.n_resonators = nr;
    point.result = optimize(current, seeds, rng_seed, jobs);
    out.push_back(std::move(point));
  }
  return out;
}

TwoGroupResult two_group_construction(double temperature, const EnergyWindow& window,
                                      const std::function<double(double)>& f,
                                      std::size_t n_per_group, const TwoGroupOptions& options) {
  if (n_per_group == 0) throw ArgumentError("two_group_construction: n_per_group must be >= 1");
  if (!(temperature > 0.0)) throw ArgumentError("two_group_construction: T must be positive");
  validate(window);
  if (!(window.span() > 0.0)) {
    throw ArgumentError("two_group_construction: window must have positive width");
  }
  const std::size_t m = std::max<std::size_t>(options.fit_samples, 2);
  const std::vector<double> pos = uniform_grid(window.omega_min, window.omega_max, m);

  // Rows 0..m-1 sample the negative window, m..2m-1 the positive one.
  std::vector<double> omega(2 * m), total(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    omega[i] = -pos[i];
    omega[m + i] = pos[i];
  }
  for (std::size_t i = 0; i < 2 * m; ++i) {
    const double fv = f(omega[i]);
    if (!(fv > 0.0) || !std::isfinite(fv)) {
      throw ArgumentError("two_group_construction: F must be positive on the window");
    }
    total[i] = omega[i] < 0.0 ? std::exp(omega[i] / temperature) * fv : fv;
  }

  const double span = window.span();
  const double n = static_cast<double>(n_per_group);
  auto centers = [&](bool negative) {
    std::vector<double> c(n_per_group);
    const double lo = negative ? -window.omega_max : window.omega_min;
    for (std::size_t j = 0; j < n_per_group; ++j) {
      c[j] = lo + (static_cast<double>(j) + 0.5) * span / n;
    }
    return c;
  };
  const std::vector<double> centers_a = centers(true);
  const std::vector<double> centers_b = centers(false);

  struct GroupFit {
    Eigen::VectorXd weights;
    double norm = 0.0;
  };
  auto fit_group = [&](const std::vector<double>& c, bool negative, double width) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(2 * m), static_cast<Eigen::Index>(n_per_group));
    Eigen::VectorXd b(static_cast<Eigen::Index>(2 * m));
    for (std::size_t i = 0; i < 2 * m; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      for (std::size_t j = 0; j < n_per_group; ++j) {
        a(r, static_cast<Eigen::Index>(j)) = lorentzian({1.0, c[j], width}, omega[i]) / total[i];
      }
      b(r) = ((omega[i] < 0.0) == negative) ? 1.0 : 0.0;
    }
    GroupFit g;
    g.weights = nnls(a, b);
    g.norm = (a * g.weights - b).squaredNorm();
    return g;
  };
  auto line_sum = [&](const std::vector<double>& c, const Eigen::VectorXd& w, double width,
                       double x) {
    double v = 0.0;
    for (std::size_t j = 0; j < n_per_group; ++j) {
      v += w(static_cast<Eigen::Index>(j)) * lorentzian({1.0, c[j], width}, x);
    }
    return v;
  };
  // Ratio-form KMS residual of the assembled fit on the sample grid.
  auto cost = [&](double log_scale) {
    const double width = std::exp(log_scale) * span / n;
    const Eigen::VectorXd wa = fit_group(centers_a, true, width).weights;
    const Eigen::VectorXd wb = fit_group(centers_b, false, width).weights;
    double acc = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = pos[i];
      const double up = line_sum(centers_a, wa, width, x) + line_sum(centers_b, wb, width, x);
      const double down = line_sum(centers_a, wa, width, -x) + line_sum(centers_b, wb, width, -x);
      if (!(up > 0.0)) return kInf;
      const double dev = std::abs(down / up - std::exp(-x / temperature));
      if (i > 0) acc += 0.5 * (dev + prev) * (pos[i] - pos[i - 1]);
      prev = dev;
    }
    return acc;
  };

  // Common width scale: log grid over [0.25, 16], then golden section around the best point.
  const double lo_s = std::log(0.25);
  const double hi_s = std::log(16.0);
  constexpr std::size_t kScan = 25;
  std::vector<double> scan = uniform_grid(lo_s, hi_s, kScan);
  std::size_t best = 0;
  std::vector<double> scan_cost(kScan);
  for (std::size_t i = 0; i < kScan; ++i) {
    scan_cost[i] = cost(scan[i]);
    if (scan_cost[i] < scan_cost[best]) best = i;
  }
  double a_s = scan[best == 0 ? 0 : best - 1];
  double b_s = scan[std::min(best + 1, kScan - 1)];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b_s - phi * (b_s - a_s);
  double x2 = a_s + phi * (b_s - a_s);
  double f1 = cost(x1);
  double f2 = cost(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      b_s = x2;
      x2 = x1;
      f2 = f1;
      x1 = b_s - phi * (b_s - a_s);
      f1 = cost(x1);
    } else {
      a_s = x1;
      x1 = x2;
      f1 = f2;
      x2 = a_s + phi * (b_s - a_s);
      f2 = cost(x2);
    }
  }
  double log_scale = f1 < f2 ? x1 : x2;
  if (scan_cost[best] <= std::min(f1, f2)) log_scale = scan[best];

  TwoGroupResult result;
  result.width_scale = std::exp(log_scale);
  const double width = result.width_scale * span / n;
  const GroupFit ga = fit_group(centers_a, true, width);
  const GroupFit gb = fit_group(centers_b, false, width);

  auto residual = [&](const std::vector<double>& c, const Eigen::VectorXd& w, bool negative) {
    GroupResidual r;
    for (std::size_t i = 0; i < 2 * m; ++i) {
      const double fit = line_sum(c, w, width, omega[i]);
      const bool own = (omega[i] < 0.0) == negative;
      const double rel = std::abs(fit - (own ? total[i] : 0.0)) / total[i];
      double& slot = own ? r.own_window : r.other_window;
      slot = std::max(slot, rel);
    }
    return r;
  };
  result.group_a = residual(centers_a, ga.weights, true);
  result.group_b = residual(centers_b, gb.weights, false);
  if (ga.weights.maxCoeff() <= 0.0 || gb.weights.maxCoeff() <= 0.0) {
    throw InfeasibleFitError("two_group_construction: fit collapsed to zero weight",
                             result.group_a.own_window, result.group_b.own_window);
  }

  const double wr = options.resonator_frequency > 0.0 ? options.resonator_frequency
                                                      : 2.0 * window.omega_max;
  const auto total_lines = static_cast<Eigen::Index>(2 * n_per_group);
  result.design.couplings = Eigen::MatrixXd::Ones(1, total_lines);
  for (int group = 0; group < 2; ++group) {
    const auto& c = group == 0 ? centers_a : centers_b;
    const auto& w = group == 0 ? ga.weights : gb.weights;
    for (std::size_t j = 0; j < n_per_group; ++j) {
      const double weight = w(static_cast<Eigen::Index>(j));
      result.components.push_back({weight, c[j], width});
      Resonator r;
      r.frequency = wr;
      r.kappa = width;
      r.drive_frequency = wr - c[j];
      r.drive_amplitude = drive_amplitude_for(weight, -c[j], width);
      result.design.resonators.push_back(r);
    }
  }
  result.spectrum = collective_spectrum(result.design);
  result.kms_integral =
      kms_ratio_integral(result.spectrum, temperature, window, options.report_grid);
  KmsResidualOptions opts;
  opts.n_samples = options.report_grid;
  opts.compute_ratio = false;
  result.kms_max = kms_residual(result.spectrum, temperature, window, opts).max_abs;
  return result;
}

}  // namespace thermalbath
