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

#include "qcm/gates.hpp"

#include <cmath>
#include <stdexcept>

namespace qcm {

namespace {
constexpr cplx kI(0.0, 1.0);
}

CMatrix kron_matrix(const CMatrix &a, const CMatrix &b) {
    CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    r(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return r;
}

double max_abs_diff_up_to_phase(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("shape mismatch");
    double best = 0.0;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (std::abs(a(i, j)) > best) {
                best = std::abs(a(i, j));
                bi = i;
                bj = j;
            }
    cplx c(1.0, 0.0);
    if (best > 1e-14) {
        c = b(bi, bj) / a(bi, bj);
        const double m = std::abs(c);
        if (m > 1e-14) c /= m;
    }
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            d = std::max(d, std::abs(c * a(i, j) - b(i, j)));
    return d;
}

std::string gate_kind_name(GateKind k) {
    switch (k) {
        case GateKind::X: return "x";
        case GateKind::Y: return "y";
        case GateKind::Z: return "z";
        case GateKind::I: return "i";
        case GateKind::H: return "h";
        case GateKind::P: return "p";
        case GateKind::RX: return "rx";
        case GateKind::RY: return "ry";
        case GateKind::RZ: return "rz";
        case GateKind::U3: return "u3";
        case GateKind::SWAP: return "swap";
    }
    throw std::logic_error("unknown gate kind");
}

GateKind gate_kind_from_name(const std::string &name) {
    if (name == "x") return GateKind::X;
    if (name == "y") return GateKind::Y;
    if (name == "z") return GateKind::Z;
    if (name == "i") return GateKind::I;
    if (name == "h") return GateKind::H;
    if (name == "p") return GateKind::P;
    if (name == "rx") return GateKind::RX;
    if (name == "ry") return GateKind::RY;
    if (name == "rz") return GateKind::RZ;
    if (name == "u3") return GateKind::U3;
    if (name == "swap") return GateKind::SWAP;
    throw std::invalid_argument("unknown gate kind: " + name);
}

int gate_num_params(GateKind k) {
    switch (k) {
        case GateKind::P:
        case GateKind::RX:
        case GateKind::RY:
        case GateKind::RZ: return 1;
        case GateKind::U3: return 3;
        default: return 0;
    }
}

int gate_num_targets(GateKind k) { return k == GateKind::SWAP ? 2 : 1; }

CMatrix u3_matrix(double theta, double phi, double lambda) {
    CMatrix m(2, 2);
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    m(0, 0) = c;
    m(0, 1) = -std::exp(kI * lambda) * s;
    m(1, 0) = std::exp(kI * phi) * s;
    m(1, 1) = std::exp(kI * (phi + lambda)) * c;
    return m;
}

CMatrix gate_matrix(GateKind k, const std::array<double, 3> &p) {
    CMatrix m(2, 2);
    switch (k) {
        case GateKind::X:
            m(0, 1) = 1.0;
            m(1, 0) = 1.0;
            return m;
        case GateKind::Y:
            m(0, 1) = -kI;
            m(1, 0) = kI;
            return m;
        case GateKind::Z:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            return m;
        case GateKind::I: return CMatrix::identity(2);
        case GateKind::H:
            m(0, 0) = m(0, 1) = m(1, 0) = 1.0 / std::sqrt(2.0);
            m(1, 1) = -1.0 / std::sqrt(2.0);
            return m;
        case GateKind::P:
            m(0, 0) = 1.0;
            m(1, 1) = std::exp(kI * p[0]);
            return m;
        case GateKind::RX: {
            const double c = std::cos(p[0] / 2.0), s = std::sin(p[0] / 2.0);
            m(0, 0) = c;
            m(0, 1) = -kI * s;
            m(1, 0) = -kI * s;
            m(1, 1) = c;
            return m;
        }
        case GateKind::RY: {
            const double c = std::cos(p[0] / 2.0), s = std::sin(p[0] / 2.0);
            m(0, 0) = c;
            m(0, 1) = -s;
            m(1, 0) = s;
            m(1, 1) = c;
            return m;
        }
        case GateKind::RZ:
            m(0, 0) = std::exp(-kI * (p[0] / 2.0));
            m(1, 1) = std::exp(kI * (p[0] / 2.0));
            return m;
        case GateKind::U3: return u3_matrix(p[0], p[1], p[2]);
        case GateKind::SWAP: {
            CMatrix s(4, 4);
            s(0, 0) = s(1, 2) = s(2, 1) = s(3, 3) = 1.0;
            return s;
        }
    }
    throw std::logic_error("unknown gate kind");
}

CMatrix cnot_matrix() {
    CMatrix m(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
    return m;
}

U3Angles u3_from_matrix(const CMatrix &u) {
    if (u.rows() != 2 || u.cols() != 2)
        throw std::invalid_argument("u3_from_matrix expects 2x2");
    U3Angles a;
    const double c = std::abs(u(0, 0));
    const double s = std::abs(u(1, 0));
    a.theta = 2.0 * std::atan2(s, c);
    if (s < 1e-12) {
        // diagonal
        a.phase = std::arg(u(0, 0));
        a.phi = 0.0;
        a.lambda = std::arg(u(1, 1)) - a.phase;
    } else if (c < 1e-12) {
        // anti-diagonal
        a.phase = std::arg(u(1, 0));
        a.phi = 0.0;
        a.lambda = std::arg(-u(0, 1)) - a.phase;
    } else {
        a.phase = std::arg(u(0, 0));
        a.phi = std::arg(u(1, 0)) - a.phase;
        a.lambda = std::arg(-u(0, 1)) - a.phase;
    }
    return a;
}

CMatrix sqrt_unitary_2x2(const CMatrix &u) {
    if (u.rows() != 2 || u.cols() != 2)
        throw std::invalid_argument("sqrt_unitary_2x2 expects 2x2");
    // Eigen-decompose. A 2x2 unitary is normal; eigenvalues from the
    // characteristic polynomial, eigenvectors from (U - lambda I).
    const cplx tr = u(0, 0) + u(1, 1);
    const cplx det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
    const cplx disc = std::sqrt(tr * tr - 4.0 * det);
    const cplx l0 = (tr + disc) / 2.0;
    const cplx l1 = (tr - disc) / 2.0;

    auto eigvec = [&](cplx lam) -> std::array<cplx, 2> {
        // rows of (U - lam I) are orthogonal to the eigenvector
        const cplx r0a = u(0, 0) - lam, r0b = u(0, 1);
        const cplx r1a = u(1, 0), r1b = u(1, 1) - lam;
        std::array<cplx, 2> v{};
        if (std::abs(r0a) + std::abs(r0b) > std::abs(r1a) + std::abs(r1b)) {
            v = {-r0b, r0a};
        } else {
            v = {-r1b, r1a};
        }
        const double nrm = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
        if (nrm < 1e-14) return {cplx(1.0, 0.0), cplx(0.0, 0.0)};
        return {v[0] / nrm, v[1] / nrm};
    };

    std::array<cplx, 2> v0{}, v1{};
    if (std::abs(l0 - l1) < 1e-14) {
        v0 = {cplx(1.0, 0.0), cplx(0.0, 0.0)};
        v1 = {cplx(0.0, 0.0), cplx(1.0, 0.0)};
    } else {
        v0 = eigvec(l0);
        v1 = eigvec(l1);
    }
    const cplx s0 = std::sqrt(l0), s1 = std::sqrt(l1);
    CMatrix r(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r(i, j) = s0 * v0[i] * std::conj(v0[j]) + s1 * v1[i] * std::conj(v1[j]);
    return r;
}

} // namespace qcm
