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

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "thermalbath/config.hpp"
#include "thermalbath/designopt.hpp"
#include "thermalbath/dispersive.hpp"
#include "thermalbath/errors.hpp"
#include "thermalbath/experiments.hpp"
#include "thermalbath/lindblad.hpp"
#include "thermalbath/precision.hpp"

namespace py = pybind11;
using namespace thermalbath;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Engineered thermal baths from driven dispersive resonators.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NonErgodicError>(m, "NonErgodicError", base.ptr());
  py::register_exception<NotCompletelyPositiveError>(m, "NotCompletelyPositiveError", base.ptr());
  py::register_exception<RatioUndefinedError>(m, "RatioUndefinedError", base.ptr());
  py::register_exception<DispersiveError>(m, "DispersiveError", base.ptr());
  py::register_exception<InfeasibleFitError>(m, "InfeasibleFitError", base.ptr());

  // Operators.
  m.def("pauli_x", &pauli::x);
  m.def("pauli_y", &pauli::y);
  m.def("pauli_z", &pauli::z);
  m.def("embed", &embed, py::arg("op"), py::arg("site"), py::arg("n_qubits"));
  m.def(
      "ising_chain_hamiltonian",
      [](std::size_t n, const std::vector<double>& omegas, const std::vector<double>& j) {
        return ising_chain_hamiltonian(n, omegas, j);
      },
      py::arg("n"), py::arg("omegas"), py::arg("couplings"));
  m.def("pauli_x_couplings", &pauli_x_couplings, py::arg("n"));

  py::class_<EnergyWindow>(m, "EnergyWindow")
      .def(py::init([](double lo, double hi) { return EnergyWindow{lo, hi}; }), py::arg("omega_min"),
           py::arg("omega_max"))
      .def_readwrite("omega_min", &EnergyWindow::omega_min)
      .def_readwrite("omega_max", &EnergyWindow::omega_max)
      .def_property_readonly("span", &EnergyWindow::span);

  py::class_<SpectralDecomposition>(m, "SpectralDecomposition")
      .def(py::init([](const Operator& h) { return spectral_decomposition(h); }), py::arg("hamiltonian"))
      .def_property_readonly("dim", &SpectralDecomposition::dim)
      .def_property_readonly("energies", &SpectralDecomposition::energies)
      .def_property_readonly("bohr_frequencies", &SpectralDecomposition::bohr_frequencies)
      .def_property_readonly("hamiltonian", &SpectralDecomposition::hamiltonian);

  m.def("eigenoperator", &eigenoperator, py::arg("s"), py::arg("decomp"), py::arg("omega"));
  m.def(
      "energy_window",
      [](const SpectralDecomposition& d, const std::vector<Operator>& s) { return energy_window(d, s); },
      py::arg("decomp"), py::arg("couplings"));

  // Baths.
  py::class_<Resonator>(m, "Resonator")
      .def(py::init([](double e, double wd, double kappa, double wr) { return Resonator{e, wd, kappa, wr}; }),
           py::arg("drive_amplitude"), py::arg("drive_frequency"), py::arg("kappa"), py::arg("frequency"))
      .def_readwrite("drive_amplitude", &Resonator::drive_amplitude)
      .def_readwrite("drive_frequency", &Resonator::drive_frequency)
      .def_readwrite("kappa", &Resonator::kappa)
      .def_readwrite("frequency", &Resonator::frequency)
      .def_property_readonly("detuning", &Resonator::detuning);

  py::class_<ResonatorDesign>(m, "ResonatorDesign")
      .def(py::init([](std::vector<Resonator> r, Eigen::MatrixXd g) {
             ResonatorDesign d{std::move(r), std::move(g)};
             validate(d);
             return d;
           }),
           py::arg("resonators"), py::arg("couplings"))
      .def_readwrite("resonators", &ResonatorDesign::resonators)
      .def_readwrite("couplings", &ResonatorDesign::couplings);

  m.def("drive_amplitude_for", &drive_amplitude_for, py::arg("photon_number"), py::arg("detuning"),
        py::arg("kappa"));
  m.def("photon_number", &photon_number, py::arg("design"), py::arg("nu"));

  py::class_<BathSpectrum>(m, "BathSpectrum")
      .def_static("exact_kms", &BathSpectrum::exact_kms, py::arg("channels"), py::arg("base_rate"),
                  py::arg("temperature"))
      .def_property_readonly("channels", &BathSpectrum::channels)
      .def("gamma", &BathSpectrum::gamma, py::arg("a"), py::arg("b"), py::arg("omega"))
      .def("gamma_matrix", &BathSpectrum::gamma_matrix, py::arg("omega"))
      .def("davies_completion", &BathSpectrum::davies_completion, py::arg("temperature"));

  m.def("collective_spectrum", &collective_spectrum, py::arg("design"));
  m.def("transition_spectrum", &transition_spectrum, py::arg("design"));
  m.def("composite_spectrum", &composite_spectrum, py::arg("design"));
  m.def("kms_max_violation",
        [](const BathSpectrum& s, double t, const EnergyWindow& w) { return kms_max_violation(s, t, w); },
        py::arg("spectrum"), py::arg("temperature"), py::arg("window"));
  m.def("kms_ratio_integral", &kms_ratio_integral, py::arg("spectrum"), py::arg("temperature"),
        py::arg("window"), py::arg("n_samples") = 2001);

  // Dynamics.
  py::enum_<Frame>(m, "Frame").value("lab", Frame::lab).value("interaction", Frame::interaction);

  py::class_<LindbladGenerator>(m, "LindbladGenerator")
      .def_property_readonly("dim", &LindbladGenerator::dim)
      .def_property_readonly("superoperator", &LindbladGenerator::superoperator)
      .def("apply", &LindbladGenerator::apply, py::arg("rho"));

  m.def(
      "build_generator",
      [](const SpectralDecomposition& d, const std::vector<Operator>& s, const BathSpectrum& spec, Frame f) {
        return build_generator(d, s, spec, f);
      },
      py::arg("decomp"), py::arg("couplings"), py::arg("spectrum"), py::arg("frame") = Frame::interaction);
  m.def(
      "gibbs_state", [](const SpectralDecomposition& d, double t) { return gibbs_state(d, t).density; },
      py::arg("decomp"), py::arg("temperature"));
  m.def(
      "steady_state", [](const LindbladGenerator& g) { return steady_state(g).rho; }, py::arg("generator"));
  m.def(
      "spectral_gap", [](const LindbladGenerator& g) { return spectral_gap(g); }, py::arg("generator"));
  m.def("verify_fixed_point", &verify_fixed_point, py::arg("generator"), py::arg("rho"));

  // Precision.
  py::enum_<HamiltonianClass>(m, "HamiltonianClass")
      .value("general", HamiltonianClass::general)
      .value("ising", HamiltonianClass::ising);
  m.def("trace_norm", &trace_norm, py::arg("x"));
  m.def("fidelity", &fidelity, py::arg("rho"), py::arg("sigma"));
  m.def("g_of_d", &g_of_d, py::arg("d"), py::arg("cls"));
  m.def(
      "required_precision",
      [](double eps, double lambda, std::size_t d, HamiltonianClass cls) {
        return required_precision(eps, lambda, d, cls);
      },
      py::arg("epsilon"), py::arg("gap"), py::arg("d"), py::arg("cls") = HamiltonianClass::general);
  m.def(
      "gibbs_perturbation_bound",
      [](const Operator& h1, const Operator& h2, double t) {
        const auto r = gibbs_perturbation_bound(h1, h2, t);
        return py::make_tuple(r.actual, r.bound);
      },
      py::arg("h1"), py::arg("h2"), py::arg("temperature"));

  // Dispersive rates.
  m.def(
      "rate_model",
      [](double omega, double nbar, double kappa, double detuning, double wr, double g) {
        return rate_model(omega, SingleResonator{nbar, kappa, detuning, wr}, g);
      },
      py::arg("omega"), py::arg("photon_number") = 1.0, py::arg("kappa") = 0.62, py::arg("detuning") = -5.0,
      py::arg("resonator_frequency") = 3.1, py::arg("g") = 0.3);

  // Design.
  m.def(
      "two_group_construction",
      [](double t, const EnergyWindow& w, const std::function<double(double)>& f, std::size_t n) {
        const auto r = two_group_construction(t, w, f, n);
        return py::dict(py::arg("kms_integral") = r.kms_integral, py::arg("kms_max") = r.kms_max,
                        py::arg("width_scale") = r.width_scale, py::arg("spectrum") = r.spectrum);
      },
      py::arg("temperature"), py::arg("window"), py::arg("f"), py::arg("n_per_group"));

  // Experiments.
  m.def(
      "run",
      [](const std::string& command, const std::string& config_json, const std::string& output_dir) {
        auto c = parse_config(config_json);
        c.run.output_dir = output_dir;
        const auto r = run(command_from_string(command), c);
        return py::dict(py::arg("exit_code") = r.exit_code, py::arg("files") = r.files,
                        py::arg("failures") = r.failures, py::arg("summary") = r.summary);
      },
      py::arg("command"), py::arg("config_json"), py::arg("output_dir"));
  m.def(
      "normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
      py::arg("config_json"));
}
