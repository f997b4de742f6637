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

#include "qcm/qft.hpp"

#include <cmath>
#include <stdexcept>

namespace qcm {

Circuit qft_circuit(const QftSpec &spec) {
    if (spec.num_qubits < 1) throw std::invalid_argument("qft needs n >= 1");
    const double pi = std::acos(-1.0);
    const int n = spec.num_qubits;
    const int off = spec.register_offset;
    Circuit c(off + n, "qft");
    for (int j = 0; j < n; ++j) {
        c.append(g_h(off + j));
        for (int d = 1; j + d < n; ++d)
            c.append(g_p(pi / double(1 << d), off + j, {{off + j + d, false}}));
    }
    if (spec.include_final_swaps)
        for (int j = 0; j < n / 2; ++j) c.append(g_swap(off + j, off + n - 1 - j));
    return c;
}

Circuit iqft_circuit(const QftSpec &spec) {
    Circuit c = qft_circuit(spec).adjoint();
    c.label = "iqft";
    return c;
}

CMatrix dft_matrix(int num_qubits) {
    const std::size_t dim = std::size_t(1) << num_qubits;
    const double pi = std::acos(-1.0);
    CMatrix f(dim, dim);
    const double scale = 1.0 / std::sqrt(double(dim));
    for (std::size_t j = 0; j < dim; ++j)
        for (std::size_t k = 0; k < dim; ++k) {
            const double arg = 2.0 * pi * double((j * k) % dim) / double(dim);
            f(j, k) = cplx(std::cos(arg) * scale, std::sin(arg) * scale);
        }
    return f;
}

Circuit qft_2d(int qubits_per_axis, int offset_axis0, int offset_axis1,
               int total_qubits) {
    Circuit c(total_qubits, "qft2d");
    QftSpec a0{qubits_per_axis, true, offset_axis0};
    QftSpec a1{qubits_per_axis, true, offset_axis1};
    c.append(qft_circuit(a0));
    c.append(qft_circuit(a1));
    return c;
}

} // namespace qcm
