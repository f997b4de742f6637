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
#include <functional>
#include <string>
#include <vector>

#include "qcm/circuit.hpp"

namespace qcm {

/// f(k) = sum_j alpha_j k^j in the monomial basis. Trailing coefficients may
/// be zero; the declared degree is coefficients.size() - 1.
struct MonomialPolynomial {
    std::vector<double> coefficients;

    MonomialPolynomial() : coefficients{0.0} {}
    explicit MonomialPolynomial(std::vector<double> c) : coefficients(std::move(c)) {
        if (coefficients.empty()) coefficients.push_back(0.0);
    }

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    double eval(double k) const;
};

/// f(k0, k1) = sum alpha[m0][m1] k0^m0 k1^m1 on a (p+1)x(p+1) grid.
struct BivariatePolynomial {
    std::vector<std::vector<double>> coefficients;

    int degree() const { return static_cast<int>(coefficients.size()) - 1; }
    double eval(double k0, double k1) const;
};

/// One multi-controlled R_Y of the exponential-map product form. `subset`
/// holds data-register-relative qubit indices (qubit 0 = most significant
/// bit of k, possibly spanning two registers in the bivariate case); `angle`
/// is the 2x rotation argument, so that summing angle * prod_{j in subset}
/// k_j over all terms gives 2 f(k).
struct RotationTerm {
    std::vector<int> subset;
    double angle = 0.0;
};

/// Scaling policy for amplitude encoding. epsilon <= 0 selects the default
/// policy epsilon = 0.1 / max_k |f(k)|; the product epsilon * max|f| must
/// stay <= 0.5 so the flag branch remains in the sine's principal range.
struct EncodingConfig {
    double epsilon = 0.0;
};

/// Expands f(k) over the binary digits of k using the multinomial theorem
/// and bit idempotence k_j^2 = k_j. With merge = false one term is emitted
/// per multinomial monomial — exactly C(n+p, n) terms; merge = true collects
/// terms by subset (fewer rotations, same action).
std::vector<RotationTerm> expand_rotation_terms(const MonomialPolynomial &f, int n,
                                                bool merge = false);

/// Bivariate version: C(n+p, n)^2 terms unmerged; axis-1 qubits are offset
/// by n in the subsets.
std::vector<RotationTerm> expand_rotation_terms(const BivariatePolynomial &f, int n,
                                                bool merge = false);

/// Exact multilinear expansion of arbitrary per-point half-angles on a
/// 2^bits-point block (Moebius transform over the bit lattice). Term angles
/// are the 2x rotation arguments; subsets are relative to the block's bits,
/// most significant first.
std::vector<RotationTerm> multilinear_terms(const std::vector<double> &half_angles,
                                            int bits);

/// Appends the multi-controlled R_Y ladder for `terms` onto a circuit.
/// data_qubits maps register-relative indices to absolute wires; every
/// rotation also carries `extra` controls. Angles are scaled by epsilon.
void append_rotation_terms(Circuit &c, const std::vector<RotationTerm> &terms,
                           const std::vector<int> &data_qubits, int flag,
                           const std::vector<Control> &extra, double epsilon);

/// |k>|0> -> cos(eps f(k))|k>|0> + sin(eps f(k))|k>|1>, exactly. Data on
/// qubits [0, n), flag ancilla on qubit n. One multi-controlled R_Y per
/// rotation term; the transpiler synthesises them with V-chains.
Circuit poly_encode_circuit(const MonomialPolynomial &f, int n,
                            const EncodingConfig &cfg = {});

/// Bivariate counterpart on 2n data qubits plus the flag ancilla.
Circuit bivariate_encode_circuit(const BivariatePolynomial &f, int n_per_axis,
                                 const EncodingConfig &cfg = {});

/// The epsilon a config resolves to for a given value range.
double resolve_epsilon(const EncodingConfig &cfg, double max_abs_value);

/// Piecewise polynomial approximant: increasing integer breakpoints and one
/// monomial-basis polynomial per interval [b_i, b_{i+1}), Chebyshev-fitted.
struct PiecewiseChebyshev {
    std::vector<long> breakpoints;
    int degree = 0;
    std::vector<MonomialPolynomial> pieces;
    std::vector<double> max_errors; // max abs error at integer points, per interval

    int num_intervals() const { return static_cast<int>(pieces.size()); }
    double max_error() const;

    /// Evaluation with constant continuation outside the covered range
    /// (frozen at the nearest covered integer).
    double eval(double k) const;

    std::string to_json() const;
    static PiecewiseChebyshev from_json(const std::string &text);
};

/// Degree-p fit of `target` on each interval, collocated at the interval's
/// integer points (the encoding domain): least squares in the Chebyshev
/// basis of the scaled variable, or exact interpolation when the interval
/// holds at most p+1 integers. Converted to the monomial basis in k; the
/// Chebyshev-to-monomial conversion degrades in conditioning for p > 8.
PiecewiseChebyshev chebyshev_fit(const std::function<double(double)> &target,
                                 const std::vector<long> &breakpoints, int degree);

/// Single-interval fit of [lo, hi) in the monomial basis.
MonomialPolynomial chebyshev_fit_interval(const std::function<double(double)> &target,
                                          long lo, long hi, int degree);

/// Exact Newton interpolation through the integers lo .. hi-1 (degree
/// hi-lo-1); reproduces the target exactly at every covered integer.
MonomialPolynomial interpolate_at_integers(const std::function<double(double)> &target,
                                           long lo, long hi);

/// Max abs deviation of a piece from the target over the interval integers.
double interval_max_error(const std::function<double(double)> &target,
                          const MonomialPolynomial &piece, long lo, long hi);

/// Substitutes k = shift + l into f; the result is a polynomial in l.
MonomialPolynomial compose_shift(const MonomialPolynomial &f, double shift);

/// Expansion localised to an aligned block [base, base + 2^bits) of the
/// data register: the polynomial is rewritten in the block-local variable,
/// so subsets touch only the low `bits` qubits (indices n-bits .. n-1).
/// The block prefix must be enforced separately (comparator flag). Terms
/// are merged.
std::vector<RotationTerm> expand_rotation_terms_block(const MonomialPolynomial &f,
                                                      int n, long base, int bits);

/// Bivariate expansion localised to an aligned box; axis-1 subsets are
/// offset by n_per_axis. Terms are merged.
std::vector<RotationTerm> expand_rotation_terms_bivariate_block(
    const BivariatePolynomial &f, int n_per_axis, long base0, int bits0, long base1,
    int bits1);

/// Same fit with adaptive bisection of any interval whose recorded integer
/// point error exceeds tol (element count capped by max_intervals).
PiecewiseChebyshev chebyshev_fit_adaptive(const std::function<double(double)> &target,
                                          long lo, long hi, int degree, double tol,
                                          int max_intervals = 4096);

/// Replaces each piece with the lowest-degree fit that stays within tol at
/// the interval's integer points. Rotation fan-out follows the piece degree,
/// so easy stretches get cheap encodings.
void lower_piece_degrees(PiecewiseChebyshev &pc,
                         const std::function<double(double)> &target, double tol);

/// Flips `flag` iff lo <= k < hi (half-open, classical bounds). The range
/// is decomposed into aligned binary blocks, each one multi-controlled X on
/// the data prefix; data is untouched and the fragment is an involution, so
/// its adjoint un-computes the flag.
void append_comparator(Circuit &c, long lo, long hi, const std::vector<int> &data_qubits,
                       int flag);

/// Standalone comparator fragment: data on [0, n), flag on qubit n.
Circuit comparator_circuit(long lo, long hi, int n);

/// Piecewise encoding U_{C_i}, U_{P_i}, U_{C_i}^dagger per interval: for k
/// in interval i the a0 branch carries sin(eps f^i(k)); out-of-range k get
/// the constant continuation value. a1 and the data register are restored.
void append_piecewise_encode(Circuit &c, const PiecewiseChebyshev &pc,
                             const std::vector<int> &data_qubits, int flag,
                             int interval_flag, const std::vector<Control> &extra,
                             double epsilon, bool merge_terms = true);

/// Standalone layout: data [0, n), a0 = n (function flag), a1 = n+1.
Circuit piecewise_encode_circuit(const PiecewiseChebyshev &pc, int n,
                                 const EncodingConfig &cfg = {});

/// Uniform superposition (H on every data qubit) followed by the encode
/// circuit; the flag-|1> branch holds (1/sqrt N) sin(eps f(k)).
Circuit approx_state_prep(const MonomialPolynomial &f, int n,
                          const EncodingConfig &cfg = {});
Circuit approx_state_prep(const PiecewiseChebyshev &pc, int n,
                          const EncodingConfig &cfg = {});

/// Exact preparation of a real unit vector by staged Givens rotations:
/// U_S |0...0> has amplitudes equal to q (signs included). Built as the
/// adjoint of the stage-by-stage zeroing circuit.
Circuit exact_state_prep(const std::vector<double> &q);

/// Exchanges the amplitudes at k1 and k2 (tag, conditioned flips, untag).
/// data_qubits spans the register holding the swapped labels; `tag` is the
/// ancilla, restored to |0>. With `use_vchain` the tag flips are synthesised
/// from Toffolis using the provided workspace (<= 8n-12 of them).
void append_amplitude_swap(Circuit &c, std::uint64_t k1, std::uint64_t k2,
                           const std::vector<int> &data_qubits, int tag);
Circuit amplitude_swap_circuit(std::uint64_t k1, std::uint64_t k2, int n,
                               bool use_vchain = false);

} // namespace qcm
