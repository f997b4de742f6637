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

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qcm {

using cplx = std::complex<double>;

/// Small dense complex matrix, row major. Used for gate matrices, the DFT
/// oracle and full-unitary debugging; not meant for large linear algebra.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols, cplx(0.0, 0.0)) {}

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    cplx &operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx &operator()(std::size_t i, std::size_t j) const {
        return a_[i * cols_ + j];
    }

    CMatrix operator*(const CMatrix &o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("CMatrix: shape mismatch");
        CMatrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const cplx v = (*this)(i, k);
                if (v == cplx(0.0, 0.0)) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
            }
        return r;
    }

    std::vector<cplx> operator*(const std::vector<cplx> &v) const {
        if (cols_ != v.size()) throw std::invalid_argument("CMatrix: shape mismatch");
        std::vector<cplx> r(rows_, cplx(0.0, 0.0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    CMatrix dagger() const {
        CMatrix r(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    double max_abs_diff(const CMatrix &o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("CMatrix: shape mismatch");
        double m = 0.0;
        for (std::size_t i = 0; i < a_.size(); ++i)
            m = std::max(m, std::abs(a_[i] - o.a_[i]));
        return m;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

/// Kronecker product of two matrices.
CMatrix kron_matrix(const CMatrix &a, const CMatrix &b);

/// min over unit-modulus c of max|c*a - b|, with c taken from the
/// largest-magnitude entry of a. Global phase is unobservable, so circuit
/// unitaries are compared this way.
double max_abs_diff_up_to_phase(const CMatrix &a, const CMatrix &b);

} // namespace qcm
