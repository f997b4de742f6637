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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qcm/gates.hpp"

namespace qcm {

/// A control qubit. negative = true means control on |0> (open circle).
struct Control {
    int qubit = 0;
    bool negative = false;

    friend bool operator==(const Control &a, const Control &b) {
        return a.qubit == b.qubit && a.negative == b.negative;
    }
};

/// One gate application: kind, parameters, target qubit(s) and an arbitrary
/// set of polarity-tagged controls. Targets and controls must be disjoint.
struct GateInstance {
    GateKind kind = GateKind::I;
    std::array<double, 3> params{0.0, 0.0, 0.0};
    std::vector<int> targets;
    std::vector<Control> controls;

    GateInstance() = default;
    GateInstance(GateKind k, std::vector<int> t, std::vector<Control> c = {},
                 std::array<double, 3> p = {0.0, 0.0, 0.0})
        : kind(k), params(p), targets(std::move(t)), controls(std::move(c)) {}

    GateInstance adjoint() const;
    void validate(int num_qubits) const;
};

// Convenience constructors.
GateInstance g_x(int q, std::vector<Control> c = {});
GateInstance g_h(int q, std::vector<Control> c = {});
GateInstance g_p(double theta, int q, std::vector<Control> c = {});
GateInstance g_ry(double theta, int q, std::vector<Control> c = {});
GateInstance g_rz(double theta, int q, std::vector<Control> c = {});
GateInstance g_u3(double theta, double phi, double lambda, int q,
                  std::vector<Control> c = {});
GateInstance g_swap(int q0, int q1, std::vector<Control> c = {});
GateInstance g_cnot(int control, int target);
GateInstance g_toffoli(int c0, int c1, int target);

/// Ordered gate list over a fixed register width.
struct Circuit {
    int num_qubits = 0;
    std::string label;
    std::vector<GateInstance> gates;

    Circuit() = default;
    explicit Circuit(int n, std::string lbl = "") : num_qubits(n), label(std::move(lbl)) {}

    void append(GateInstance g);
    void append(const Circuit &fragment);
    std::size_t size() const { return gates.size(); }

    /// Reversed gate order with every gate inverted.
    Circuit adjoint() const;

    /// Same gates with extra controls added to each one. Used for
    /// branch-conditioned fragments; extra controls must be disjoint from
    /// every gate's qubits.
    Circuit with_extra_controls(const std::vector<Control> &extra) const;
};

/// Hands out scratch qubits from the top of the register. Ancillas are
/// expected to enter and leave fragments in |0>.
class AncillaAllocator {
  public:
    explicit AncillaAllocator(int first_index, int count)
        : first_(first_index), count_(count) {}

    int alloc();
    std::vector<int> alloc(int n);
    void release(int q);
    void release(const std::vector<int> &qs);
    int in_use() const { return static_cast<int>(used_.size()); }
    int capacity() const { return count_; }
    int high_water() const { return high_water_; }

  private:
    int first_;
    int count_;
    int high_water_ = 0;
    std::vector<int> free_;
    std::vector<int> used_;
};

/// Multi-controlled X via the Barenco V-chain. m controls use m-2 ancillas
/// and 2m-3 Toffoli gates (m >= 3); m <= 2 emits X/CNOT/Toffoli directly.
/// Ancillas must enter |0> and are restored.
Circuit mcx_vchain(int num_qubits, const std::vector<Control> &controls, int target,
                   const std::vector<int> &ancillas);

/// Multi-controlled single-qubit gate via the V-chain that ends in a
/// controlled-U: m-1 ancillas, 2(m-1) Toffolis plus one controlled-U.
Circuit mcu_vchain(int num_qubits, const std::vector<Control> &controls, GateKind u,
                   const std::array<double, 3> &params, int target,
                   const std::vector<int> &ancillas);

/// Toffoli over {CNOT, U3}: 6 CNOTs and 8 U3 gates, exact.
Circuit toffoli_decompose(int num_qubits, int c0, int c1, int target);

/// Full 2^n x 2^n unitary of a circuit, built by applying it to every basis
/// state. Debugging facility, limited to n <= 12.
CMatrix circuit_unitary(const Circuit &c);

/// JSON-lines serialisation, format "qcm-circuit/1": a header line followed
/// by one gate object per line.
void save_circuit(const Circuit &c, std::ostream &os);
Circuit load_circuit(std::istream &is);

} // namespace qcm
