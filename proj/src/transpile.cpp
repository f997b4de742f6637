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

#include "qcm/transpile.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace qcm {

namespace {

const double kPi = std::acos(-1.0);

bool is_identity_2x2(const CMatrix &u) {
    // proportional-to-identity matrices act as a global phase only
    return std::abs(u(0, 1)) < 1e-14 && std::abs(u(1, 0)) < 1e-14 &&
           std::abs(u(0, 0) - u(1, 1)) < 1e-14;
}

class Transpiler {
  public:
    explicit Transpiler(const Circuit &src, Circuit *out) : src_(src), out_(out) {
        width_ = src.num_qubits;
        qubit_depth_.assign(width_, 0);
    }

    GateCounts run() {
        for (const GateInstance &g : src_.gates) {
            ++counts_.raw_by_kind[gate_kind_name(g.kind)];
            lower(g);
        }
        counts_.depth = depth_;
        return counts_;
    }

    int width() const { return width_; }

  private:
    void emit_u3(int q, double theta, double phi, double lambda) {
        ++counts_.u3;
        bump_depth({q});
        if (out_) out_->gates.push_back(g_u3(theta, phi, lambda, q));
    }

    void emit_u3_of(int q, const CMatrix &u) {
        if (is_identity_2x2(u)) return;
        const U3Angles a = u3_from_matrix(u);
        emit_u3(q, a.theta, a.phi, a.lambda);
    }

    void emit_cnot(int c, int t) {
        ++counts_.cnot;
        bump_depth({c, t});
        if (out_) out_->gates.push_back(g_cnot(c, t));
    }

    void emit_x(int q) { emit_u3(q, kPi, 0.0, kPi); }

    void bump_depth(std::initializer_list<int> qs) {
        std::uint64_t layer = 0;
        for (int q : qs) layer = std::max(layer, qubit_depth_[q]);
        ++layer;
        for (int q : qs) qubit_depth_[q] = layer;
        depth_ = std::max(depth_, layer);
    }

    int alloc_ancillas(int n) {
        // Chain ancillas are restored to |0> by construction, so a single
        // block past the source register is reused by every synthesis.
        if (width_ - src_.num_qubits < n) {
            width_ = src_.num_qubits + n;
            qubit_depth_.resize(width_, 0);
            if (out_) out_->num_qubits = width_;
        }
        return src_.num_qubits;
    }

    // --- lowering ---------------------------------------------------------

    void lower(const GateInstance &g) {
        if (g.kind == GateKind::I && g.controls.empty()) return;
        // Negative controls become X-conjugated positive controls.
        std::vector<int> flips;
        std::vector<Control> pos;
        for (const Control &c : g.controls) {
            if (c.negative) flips.push_back(c.qubit);
            pos.push_back({c.qubit, false});
        }
        for (int q : flips) emit_x(q);
        if (g.kind == GateKind::SWAP) {
            lower_swap(g.targets[0], g.targets[1], pos);
        } else {
            lower_1q(g.kind, g.params, g.targets[0], pos);
        }
        for (int q : flips) emit_x(q);
    }

    void lower_swap(int a, int b, const std::vector<Control> &ctl) {
        if (ctl.empty()) {
            emit_cnot(a, b);
            emit_cnot(b, a);
            emit_cnot(a, b);
            return;
        }
        // controlled SWAP: CNOT(b,a), C...CX on b with a joined, CNOT(b,a)
        emit_cnot(b, a);
        std::vector<Control> inner = ctl;
        inner.push_back({a, false});
        lower_1q(GateKind::X, {}, b, inner);
        emit_cnot(b, a);
    }

    void lower_1q(GateKind kind, const std::array<double, 3> &params, int target,
                  const std::vector<Control> &ctl) {
        const std::size_t m = ctl.size();
        if (m == 0) {
            emit_u3_of(target, gate_matrix(kind, params));
            return;
        }
        if (kind == GateKind::X) {
            if (m == 1) {
                emit_cnot(ctl[0].qubit, target);
            } else if (m == 2) {
                emit_toffoli(ctl[0].qubit, ctl[1].qubit, target);
            } else {
                lower_mcx(ctl, target);
            }
            return;
        }
        const CMatrix u = gate_matrix(kind, params);
        if (is_identity_2x2(u) && std::abs(u(0, 0) - cplx(1.0, 0.0)) < 1e-14) return;
        if (m == 1) {
            emit_cu(ctl[0].qubit, target, u);
        } else if (m == 2) {
            emit_ccu(ctl[0].qubit, ctl[1].qubit, target, u);
        } else {
            lower_mcu(ctl, target, u);
        }
    }

    void emit_toffoli(int c0, int c1, int target) {
        const Circuit block = toffoli_decompose(3, 0, 1, 2);
        for (const GateInstance &g : block.gates) {
            const auto map = [&](int q) { return q == 0 ? c0 : (q == 1 ? c1 : target); };
            if (g.kind == GateKind::U3) {
                emit_u3(map(g.targets[0]), g.params[0], g.params[1], g.params[2]);
            } else {
                emit_cnot(map(g.controls[0].qubit), map(g.targets[0]));
            }
        }
    }

    // Margolus relative-phase Toffoli (self-inverse, -1 on |101>). Chain
    // ladders use it in compute-uncompute pairs where the phase cancels
    // exactly; payload gates stay exact.
    void emit_rccx(int c0, int c1, int target) {
        emit_u3(target, kPi / 4.0, 0.0, 0.0);
        emit_cnot(c1, target);
        emit_u3(target, kPi / 4.0, 0.0, 0.0);
        emit_cnot(c0, target);
        emit_u3(target, -kPi / 4.0, 0.0, 0.0);
        emit_cnot(c1, target);
        emit_u3(target, -kPi / 4.0, 0.0, 0.0);
    }

    // Exact single-controlled U: ABC decomposition with a phase correction
    // on the control wire.
    void emit_cu(int control, int target, const CMatrix &u) {
        if (is_identity_2x2(u)) {
            // controlled global phase = P(arg) on the control
            const double delta = std::arg(u(0, 0));
            if (std::abs(delta) > 1e-15)
                emit_u3_of(control, gate_matrix(GateKind::P, {delta, 0.0, 0.0}));
            return;
        }
        const U3Angles a = u3_from_matrix(u);
        const CMatrix A = gate_matrix(GateKind::RZ, {a.phi, 0, 0}) *
                          gate_matrix(GateKind::RY, {a.theta / 2.0, 0, 0});
        const CMatrix B = gate_matrix(GateKind::RY, {-a.theta / 2.0, 0, 0}) *
                          gate_matrix(GateKind::RZ, {-(a.phi + a.lambda) / 2.0, 0, 0});
        const CMatrix C = gate_matrix(GateKind::RZ, {(a.lambda - a.phi) / 2.0, 0, 0});
        const double delta = a.phase + (a.phi + a.lambda) / 2.0;
        emit_u3_of(target, C);
        emit_cnot(control, target);
        emit_u3_of(target, B);
        emit_cnot(control, target);
        emit_u3_of(target, A);
        if (std::abs(std::remainder(delta, 2.0 * kPi)) > 1e-15)
            emit_u3_of(control, gate_matrix(GateKind::P, {delta, 0.0, 0.0}));
    }

    void emit_ccu(int c0, int c1, int target, const CMatrix &u) {
        const CMatrix v = sqrt_unitary_2x2(u);
        emit_cu(c1, target, v);
        emit_cnot(c0, c1);
        emit_cu(c1, target, v.dagger());
        emit_cnot(c0, c1);
        emit_cu(c0, target, v);
    }

    void lower_mcx(const std::vector<Control> &ctl, int target) {
        const int m = static_cast<int>(ctl.size());
        const int base = alloc_ancillas(m - 2);
        std::vector<int> anc(m - 2);
        for (int i = 0; i < m - 2; ++i) anc[i] = base + i;
        std::vector<std::array<int, 3>> ladder;
        ladder.push_back({ctl[0].qubit, ctl[1].qubit, anc[0]});
        for (int i = 2; i < m - 1; ++i)
            ladder.push_back({ctl[i].qubit, anc[i - 2], anc[i - 1]});
        for (const auto &t : ladder) emit_rccx(t[0], t[1], t[2]);
        emit_toffoli(ctl[m - 1].qubit, anc[m - 3], target);
        for (auto it = ladder.rbegin(); it != ladder.rend(); ++it)
            emit_rccx((*it)[0], (*it)[1], (*it)[2]);
    }

    void lower_mcu(const std::vector<Control> &ctl, int target, const CMatrix &u) {
        const int m = static_cast<int>(ctl.size());
        const int base = alloc_ancillas(m - 1);
        std::vector<int> anc(m - 1);
        for (int i = 0; i < m - 1; ++i) anc[i] = base + i;
        std::vector<std::array<int, 3>> ladder;
        ladder.push_back({ctl[0].qubit, ctl[1].qubit, anc[0]});
        for (int i = 2; i < m; ++i)
            ladder.push_back({ctl[i].qubit, anc[i - 2], anc[i - 1]});
        for (const auto &t : ladder) emit_rccx(t[0], t[1], t[2]);
        emit_cu(anc[m - 2], target, u);
        for (auto it = ladder.rbegin(); it != ladder.rend(); ++it)
            emit_rccx((*it)[0], (*it)[1], (*it)[2]);
    }

    const Circuit &src_;
    Circuit *out_;
    GateCounts counts_;
    int width_ = 0;
    std::uint64_t depth_ = 0;
    std::vector<std::uint64_t> qubit_depth_;
};

} // namespace

std::pair<Circuit, GateCounts> transpile(const Circuit &c) {
    Circuit out(c.num_qubits, c.label.empty() ? "transpiled" : c.label + "_transpiled");
    Transpiler t(c, &out);
    GateCounts counts = t.run();
    out.num_qubits = t.width();
    return {std::move(out), std::move(counts)};
}

GateCounts count_transpiled(const Circuit &c) {
    Transpiler t(c, nullptr);
    return t.run();
}

} // namespace qcm
