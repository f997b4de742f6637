// Copyright 2026 The QCM Developers
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

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qcm/experiments.hpp"
#include "qcm/qft.hpp"

namespace py = pybind11;
using namespace qcm;

PYBIND11_MODULE(_qcm, m) {
    m.doc() = "Statevector simulator and circuit toolkit for periodic spectral solvers";

    py::enum_<GateKind>(m, "GateKind")
        .value("X", GateKind::X)
        .value("Y", GateKind::Y)
        .value("Z", GateKind::Z)
        .value("I", GateKind::I)
        .value("H", GateKind::H)
        .value("P", GateKind::P)
        .value("RX", GateKind::RX)
        .value("RY", GateKind::RY)
        .value("RZ", GateKind::RZ)
        .value("U3", GateKind::U3)
        .value("SWAP", GateKind::SWAP);

    py::class_<Control>(m, "Control")
        .def(py::init([](int q, bool negative) {
                 return Control{q, negative};
             }),
             py::arg("qubit"), py::arg("negative") = false)
        .def_readwrite("qubit", &Control::qubit)
        .def_readwrite("negative", &Control::negative);

    py::class_<GateInstance>(m, "GateInstance")
        .def(py::init<GateKind, std::vector<int>, std::vector<Control>,
                      std::array<double, 3>>(),
             py::arg("kind"), py::arg("targets"), py::arg("controls") = std::vector<Control>{},
             py::arg("params") = std::array<double, 3>{0.0, 0.0, 0.0})
        .def_readonly("kind", &GateInstance::kind)
        .def_readonly("targets", &GateInstance::targets)
        .def_readonly("controls", &GateInstance::controls)
        .def_readonly("params", &GateInstance::params);

    py::class_<Circuit>(m, "Circuit")
        .def(py::init<int, std::string>(), py::arg("num_qubits"), py::arg("label") = "")
        .def_readonly("num_qubits", &Circuit::num_qubits)
        .def_readwrite("label", &Circuit::label)
        .def("__len__", &Circuit::size)
        .def("append", py::overload_cast<GateInstance>(&Circuit::append))
        .def("adjoint", &Circuit::adjoint)
        .def("h", [](Circuit &c, int q) { c.append(g_h(q)); })
        .def("x", [](Circuit &c, int q) { c.append(g_x(q)); })
        .def("cnot", [](Circuit &c, int ctl, int t) { c.append(g_cnot(ctl, t)); })
        .def("ry", [](Circuit &c, double theta, int q) { c.append(g_ry(theta, q)); })
        .def("p", [](Circuit &c, double theta, int q) { c.append(g_p(theta, q)); })
        .def("to_json", [](const Circuit &c) {
            std::ostringstream os;
            save_circuit(c, os);
            return os.str();
        })
        .def_static("from_json", [](const std::string &text) {
            std::istringstream is(text);
            return load_circuit(is);
        });

    py::class_<StateVector>(m, "StateVector")
        .def(py::init<int>(), py::arg("num_qubits"))
        .def_static("basis_state", &StateVector::basis_state)
        .def_property_readonly("num_qubits", &StateVector::num_qubits)
        .def_property_readonly("amplitudes",
                               [](const StateVector &s) { return s.amplitudes(); })
        .def("apply", py::overload_cast<const Circuit &>(&StateVector::apply))
        .def("apply", py::overload_cast<const GateInstance &>(&StateVector::apply))
        .def("probability",
             [](const StateVector &s, std::uint64_t k) {
                 return s.probability(BasisLabel{k});
             })
        .def("sample", &StateVector::sample, py::arg("seed"), py::arg("shots"));

    py::class_<GateCounts>(m, "GateCounts")
        .def_readonly("u3", &GateCounts::u3)
        .def_readonly("cnot", &GateCounts::cnot)
        .def_readonly("depth", &GateCounts::depth)
        .def_property_readonly("total", &GateCounts::total);

    m.def("qft_circuit",
          [](int n, bool final_swaps) {
              return qft_circuit({n, final_swaps, 0});
          },
          py::arg("num_qubits"), py::arg("final_swaps") = true);
    m.def("iqft_circuit",
          [](int n) { return iqft_circuit({n, true, 0}); }, py::arg("num_qubits"));
    m.def("transpile_counts", &count_transpiled,
          "Rewrites over {CNOT, U3} and reports gate counts");
    m.def("transpile", [](const Circuit &c) { return transpile(c).first; });
    m.def("exact_state_prep", &exact_state_prep, py::arg("amplitudes"));
    m.def("poly_encode_circuit", &poly_encode_circuit, py::arg("f"), py::arg("num_qubits"),
          py::arg("config") = EncodingConfig{});

    py::class_<MonomialPolynomial>(m, "MonomialPolynomial")
        .def(py::init<std::vector<double>>(), py::arg("coefficients"))
        .def("eval", &MonomialPolynomial::eval);

    py::class_<EncodingConfig>(m, "EncodingConfig")
        .def(py::init<>())
        .def_readwrite("epsilon", &EncodingConfig::epsilon);

    // --- solvers ------------------------------------------------------------

    py::class_<GridSpec1D>(m, "GridSpec1D")
        .def(py::init([](long cells, double length) {
                 return GridSpec1D{cells, length};
             }),
             py::arg("cells"), py::arg("length") = 1.0)
        .def_readwrite("cells", &GridSpec1D::cells)
        .def_readwrite("length", &GridSpec1D::length);

    py::class_<PoissonDiagnostics>(m, "PoissonDiagnostics")
        .def_readonly("gate_counts", &PoissonDiagnostics::gate_counts)
        .def_readonly("junk_norm", &PoissonDiagnostics::junk_norm)
        .def_readonly("success_norm", &PoissonDiagnostics::success_norm)
        .def_readonly("fit_max_error", &PoissonDiagnostics::fit_max_error)
        .def_readonly("total_qubits", &PoissonDiagnostics::total_qubits);

    py::class_<Poisson1DResult>(m, "Poisson1DResult")
        .def_readonly("v", &Poisson1DResult::v)
        .def_readonly("diag", &Poisson1DResult::diag);

    m.def(
        "poisson1d_solve",
        [](std::vector<double> values, double length,
           std::function<double(double)> fn, bool with_counts) {
            SourceField1D f;
            f.values = std::move(values);
            f.fn = std::move(fn);
            GridSpec1D grid{static_cast<long>(f.values.size()), length};
            PoissonFitConfig cfg;
            cfg.with_gate_counts = with_counts;
            return poisson1d_quantum_solve(f, grid, cfg);
        },
        py::arg("values"), py::arg("length") = 1.0,
        py::arg("fn") = std::function<double(double)>(),
        py::arg("with_counts") = false,
        "Quantum solve of the 1D periodic Poisson problem (zero-mean nodal source)");

    m.def("classical_spectral_solve_1d",
          [](const std::vector<double> &f, double length) {
              GridSpec1D grid{static_cast<long>(f.size()), length};
              return classical_spectral_solve_1d(f, grid);
          },
          py::arg("values"), py::arg("length") = 1.0);

    // --- rve ------------------------------------------------------------------

    py::class_<RveResult>(m, "RveResult")
        .def_readonly("gamma_per_iter", &RveResult::gamma_per_iter)
        .def_readonly("sigma", &RveResult::sigma)
        .def_readonly("mu_eff", &RveResult::mu_eff)
        .def_readonly("success_norm", &RveResult::success_norm)
        .def_readonly("junk_norm", &RveResult::junk_norm)
        .def_readonly("decay_rate", &RveResult::decay_rate)
        .def_readonly("gate_counts", &RveResult::gate_counts);

    m.def(
        "rve_quantum_solve",
        [](std::vector<double> mu, double mu0, double gamma_bar, int iterations,
           bool with_counts) {
            RveProblem p;
            p.grid = GridSpec1D{static_cast<long>(mu.size()), 1.0};
            p.mu = std::move(mu);
            p.mu0 = mu0;
            p.gamma_bar = gamma_bar;
            p.validate();
            RveSolveOptions opts;
            opts.iterations = iterations;
            opts.with_gate_counts = with_counts;
            return rve_quantum_solve(p, opts);
        },
        py::arg("mu"), py::arg("mu0"), py::arg("gamma_bar"), py::arg("iterations") = 4,
        py::arg("with_counts") = false,
        "Quantum fixed-point homogenisation of a 1D periodic modulus field");

    m.def(
        "classical_fixed_point",
        [](std::vector<double> mu, double mu0, double gamma_bar, int iterations) {
            RveProblem p;
            p.grid = GridSpec1D{static_cast<long>(mu.size()), 1.0};
            p.mu = std::move(mu);
            p.mu0 = mu0;
            p.gamma_bar = gamma_bar;
            p.validate();
            RveSolveOptions opts;
            opts.iterations = iterations;
            return classical_fixed_point(p, opts);
        },
        py::arg("mu"), py::arg("mu0"), py::arg("gamma_bar"), py::arg("iterations") = 4);

    m.def("max_qubits", &max_qubits);
}
