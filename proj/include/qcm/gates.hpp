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

#include <array>
#include <string>

#include "qcm/matrix.hpp"

namespace qcm {

/// Elementary gate kinds. P, RX, RY, RZ take one angle; U3 takes three.
/// SWAP is the only two-target kind.
enum class GateKind { X, Y, Z, I, H, P, RX, RY, RZ, U3, SWAP };

std::string gate_kind_name(GateKind k);
GateKind gate_kind_from_name(const std::string &name);

/// Number of parameters the kind expects (0, 1 or 3).
int gate_num_params(GateKind k);

/// Number of target qubits (2 for SWAP, 1 otherwise).
int gate_num_targets(GateKind k);

/// 2x2 matrix of a single-qubit kind (4x4 for SWAP).
CMatrix gate_matrix(GateKind k, const std::array<double, 3> &params = {});

/// U3(theta, phi, lambda) as defined for the universal set {CNOT, U3}.
CMatrix u3_matrix(double theta, double phi, double lambda);

/// 4x4 CNOT matrix, control = most significant qubit of the pair.
CMatrix cnot_matrix();

/// Decompose a 2x2 unitary as e^{i*phase} * U3(theta, phi, lambda).
struct U3Angles {
    double theta = 0.0;
    double phi = 0.0;
    double lambda = 0.0;
    double phase = 0.0;
};
U3Angles u3_from_matrix(const CMatrix &u);

/// Principal square root of a 2x2 unitary (V with V*V = U).
CMatrix sqrt_unitary_2x2(const CMatrix &u);

} // namespace qcm
