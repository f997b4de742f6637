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

#include "qcm/circuit.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "qcm/statevector.hpp"

#include <nlohmann/json.hpp>

namespace qcm {

GateInstance GateInstance::adjoint() const {
    GateInstance g = *this;
    switch (kind) {
        case GateKind::P:
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ:
            g.params[0] = -params[0];
            break;
        case GateKind::U3:
            // U3(t,p,l)^dagger = U3(-t,-l,-p)
            g.params = {-params[0], -params[2], -params[1]};
            break;
        default:
            break; // X, Y, Z, I, H, SWAP are self-inverse
    }
    return g;
}

void GateInstance::validate(int num_qubits) const {
    std::set<int> seen;
    auto check = [&](int q) {
        if (q < 0 || q >= num_qubits)
            throw std::invalid_argument("gate qubit index out of range");
        if (!seen.insert(q).second)
            throw std::invalid_argument("gate qubit index used twice");
    };
    if (static_cast<int>(targets.size()) != gate_num_targets(kind))
        throw std::invalid_argument("wrong number of targets for gate kind");
    for (int t : targets) check(t);
    for (const Control &c : controls) check(c.qubit);
}

GateInstance g_x(int q, std::vector<Control> c) {
    return GateInstance(GateKind::X, {q}, std::move(c));
}
GateInstance g_h(int q, std::vector<Control> c) {
    return GateInstance(GateKind::H, {q}, std::move(c));
}
GateInstance g_p(double theta, int q, std::vector<Control> c) {
    return GateInstance(GateKind::P, {q}, std::move(c), {theta, 0.0, 0.0});
}
GateInstance g_ry(double theta, int q, std::vector<Control> c) {
    return GateInstance(GateKind::RY, {q}, std::move(c), {theta, 0.0, 0.0});
}
GateInstance g_rz(double theta, int q, std::vector<Control> c) {
    return GateInstance(GateKind::RZ, {q}, std::move(c), {theta, 0.0, 0.0});
}
GateInstance g_u3(double theta, double phi, double lambda, int q, std::vector<Control> c) {
    return GateInstance(GateKind::U3, {q}, std::move(c), {theta, phi, lambda});
}
GateInstance g_swap(int q0, int q1, std::vector<Control> c) {
    return GateInstance(GateKind::SWAP, {q0, q1}, std::move(c));
}
GateInstance g_cnot(int control, int target) {
    return GateInstance(GateKind::X, {target}, {{control, false}});
}
GateInstance g_toffoli(int c0, int c1, int target) {
    return GateInstance(GateKind::X, {target}, {{c0, false}, {c1, false}});
}

void Circuit::append(GateInstance g) {
    g.validate(num_qubits);
    gates.push_back(std::move(g));
}

void Circuit::append(const Circuit &fragment) {
    if (fragment.num_qubits > num_qubits)
        throw std::invalid_argument("fragment wider than circuit");
    for (const GateInstance &g : fragment.gates) gates.push_back(g);
}

Circuit Circuit::adjoint() const {
    Circuit r(num_qubits, label.empty() ? "" : label + "_dg");
    r.gates.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it)
        r.gates.push_back(it->adjoint());
    return r;
}

Circuit Circuit::with_extra_controls(const std::vector<Control> &extra) const {
    Circuit r(num_qubits, label);
    r.gates.reserve(gates.size());
    for (const GateInstance &g : gates) {
        GateInstance h = g;
        for (const Control &c : extra) h.controls.push_back(c);
        h.validate(num_qubits);
        r.gates.push_back(std::move(h));
    }
    return r;
}

int AncillaAllocator::alloc() {
    if (!free_.empty()) {
        int q = free_.back();
        free_.pop_back();
        used_.push_back(q);
        return q;
    }
    const int next = first_ + high_water_;
    if (high_water_ >= count_)
        throw std::runtime_error("ancilla workspace exhausted");
    ++high_water_;
    used_.push_back(next);
    return next;
}

std::vector<int> AncillaAllocator::alloc(int n) {
    std::vector<int> r;
    r.reserve(n);
    for (int i = 0; i < n; ++i) r.push_back(alloc());
    return r;
}

void AncillaAllocator::release(int q) {
    auto it = std::find(used_.begin(), used_.end(), q);
    if (it == used_.end()) throw std::logic_error("releasing ancilla not in use");
    used_.erase(it);
    free_.push_back(q);
}

void AncillaAllocator::release(const std::vector<int> &qs) {
    for (auto it = qs.rbegin(); it != qs.rend(); ++it) release(*it);
}

namespace {

// Wrap negative controls with X so the body sees positive controls only.
void emit_polarity_fixups(Circuit &c, const std::vector<Control> &controls) {
    for (const Control &ctl : controls)
        if (ctl.negative) c.append(g_x(ctl.qubit));
}

} // namespace

Circuit mcx_vchain(int num_qubits, const std::vector<Control> &controls, int target,
                   const std::vector<int> &ancillas) {
    const int m = static_cast<int>(controls.size());
    if (m < 1) throw std::invalid_argument("mcx_vchain needs at least one control");
    Circuit c(num_qubits, "mcx");
    if (m == 1) {
        c.append(GateInstance(GateKind::X, {target}, {controls[0]}));
        return c;
    }
    if (m == 2) {
        c.append(GateInstance(GateKind::X, {target}, {controls[0], controls[1]}));
        return c;
    }
    if (static_cast<int>(ancillas.size()) < m - 2)
        throw std::invalid_argument("mcx_vchain: needs m-2 ancillas");

    emit_polarity_fixups(c, controls);
    std::vector<GateInstance> compute;
    compute.push_back(g_toffoli(controls[0].qubit, controls[1].qubit, ancillas[0]));
    for (int i = 2; i < m - 1; ++i)
        compute.push_back(g_toffoli(controls[i].qubit, ancillas[i - 2], ancillas[i - 1]));
    for (const auto &g : compute) c.append(g);
    c.append(g_toffoli(controls[m - 1].qubit, ancillas[m - 3], target));
    for (auto it = compute.rbegin(); it != compute.rend(); ++it) c.append(*it);
    emit_polarity_fixups(c, controls);
    return c;
}

Circuit mcu_vchain(int num_qubits, const std::vector<Control> &controls, GateKind u,
                   const std::array<double, 3> &params, int target,
                   const std::vector<int> &ancillas) {
    const int m = static_cast<int>(controls.size());
    if (m < 1) throw std::invalid_argument("mcu_vchain needs at least one control");
    if (gate_num_targets(u) != 1)
        throw std::invalid_argument("mcu_vchain handles single-qubit gates");
    Circuit c(num_qubits, "mcu");
    if (m == 1) {
        c.append(GateInstance(u, {target}, {controls[0]}, params));
        return c;
    }
    if (static_cast<int>(ancillas.size()) < m - 1)
        throw std::invalid_argument("mcu_vchain: needs m-1 ancillas");

    emit_polarity_fixups(c, controls);
    std::vector<GateInstance> compute;
    compute.push_back(g_toffoli(controls[0].qubit, controls[1].qubit, ancillas[0]));
    for (int i = 2; i < m; ++i)
        compute.push_back(g_toffoli(controls[i].qubit, ancillas[i - 2], ancillas[i - 1]));
    for (const auto &g : compute) c.append(g);
    c.append(GateInstance(u, {target}, {{ancillas[m - 2], false}}, params));
    for (auto it = compute.rbegin(); it != compute.rend(); ++it) c.append(*it);
    emit_polarity_fixups(c, controls);
    return c;
}

Circuit toffoli_decompose(int num_qubits, int c0, int c1, int target) {
    // Nielsen-Chuang Fig. 4.9 with the trailing T*H on the target merged
    // into one U3: 6 CNOTs, 8 U3 gates, exact (no residual phase).
    const double pi = std::acos(-1.0);
    auto T = [&](int q) { return g_u3(0.0, 0.0, pi / 4.0, q); };
    auto Tdg = [&](int q) { return g_u3(0.0, 0.0, -pi / 4.0, q); };
    auto Hu = [&](int q) { return g_u3(pi / 2.0, 0.0, pi, q); };
    auto TH = [&](int q) { return g_u3(pi / 2.0, 0.0, 5.0 * pi / 4.0, q); };

    Circuit c(num_qubits, "toffoli");
    c.append(Hu(target));
    c.append(g_cnot(c1, target));
    c.append(Tdg(target));
    c.append(g_cnot(c0, target));
    c.append(T(target));
    c.append(g_cnot(c1, target));
    c.append(Tdg(target));
    c.append(g_cnot(c0, target));
    c.append(T(c1));
    c.append(TH(target));
    c.append(g_cnot(c0, c1));
    c.append(T(c0));
    c.append(Tdg(c1));
    c.append(g_cnot(c0, c1));
    return c;
}

CMatrix circuit_unitary(const Circuit &c) {
    if (c.num_qubits > 12)
        throw std::invalid_argument("circuit_unitary limited to n <= 12");
    const std::size_t dim = std::size_t(1) << c.num_qubits;
    CMatrix u(dim, dim);
    for (std::size_t k = 0; k < dim; ++k) {
        StateVector s = StateVector::basis_state(c.num_qubits, k);
        s.apply(c);
        for (std::size_t j = 0; j < dim; ++j) u(j, k) = s.amplitudes()[j];
    }
    return u;
}

void save_circuit(const Circuit &c, std::ostream &os) {
    nlohmann::json header;
    header["format"] = "qcm-circuit/1";
    header["num_qubits"] = c.num_qubits;
    header["label"] = c.label;
    os << header.dump() << "\n";
    for (const GateInstance &g : c.gates) {
        nlohmann::json j;
        j["kind"] = gate_kind_name(g.kind);
        j["params"] = std::vector<double>(g.params.begin(),
                                          g.params.begin() + gate_num_params(g.kind));
        j["targets"] = g.targets;
        nlohmann::json ctls = nlohmann::json::array();
        for (const Control &ctl : g.controls) {
            ctls.push_back({{"q", ctl.qubit},
                            {"polarity", ctl.negative ? "negative" : "positive"}});
        }
        j["controls"] = ctls;
        os << j.dump() << "\n";
    }
}

Circuit load_circuit(std::istream &is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty circuit stream");
    nlohmann::json header = nlohmann::json::parse(line);
    if (header.at("format").get<std::string>() != "qcm-circuit/1")
        throw std::runtime_error("unsupported circuit format");
    Circuit c(header.at("num_qubits").get<int>(),
              header.value("label", std::string()));
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        GateInstance g;
        g.kind = gate_kind_from_name(j.at("kind").get<std::string>());
        auto params = j.at("params").get<std::vector<double>>();
        for (std::size_t i = 0; i < params.size() && i < 3; ++i) g.params[i] = params[i];
        g.targets = j.at("targets").get<std::vector<int>>();
        for (const auto &jc : j.at("controls")) {
            g.controls.push_back(
                {jc.at("q").get<int>(),
                 jc.at("polarity").get<std::string>() == "negative"});
        }
        c.append(std::move(g));
    }
    return c;
}

} // namespace qcm
