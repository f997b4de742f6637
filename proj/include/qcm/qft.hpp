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

#include "qcm/circuit.hpp"
#include "qcm/matrix.hpp"

namespace qcm {

/// Parameters of a QFT fragment. register_offset places the transform on a
/// sub-register (used for the axis-wise 2D transform).
struct QftSpec {
    int num_qubits = 1;
    bool include_final_swaps = true;
    int register_offset = 0;
};

/// Quantum Fourier transform with the convention F[j][k] = w^{jk}/sqrt(N),
/// w = exp(+2*pi*i/N). Per qubit: one Hadamard followed by controlled
/// phases P(pi/2), P(pi/4), ... from the lower qubits; the final swap
/// network restores natural output order, so the circuit matches the
/// classical DFT matrix directly.
Circuit qft_circuit(const QftSpec &spec);

/// Adjoint of qft_circuit (gates reversed, phases negated).
Circuit iqft_circuit(const QftSpec &spec);

/// Classical DFT oracle: F[j][k] = exp(2*pi*i*j*k/N)/sqrt(N), N = 2^n.
CMatrix dft_matrix(int num_qubits);

/// Axis-wise 2D transform: the 1D QFT applied independently to two disjoint
/// registers, so the composite equals F (x) F.
Circuit qft_2d(int qubits_per_axis, int offset_axis0, int offset_axis1,
               int total_qubits);

} // namespace qcm
