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

#include "qcm/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qcm/qft.hpp"

namespace qcm {

namespace {
const double kPi = std::acos(-1.0);

int log2_exact(long N) {
    int n = 0;
    while ((1L << n) < N) ++n;
    if ((1L << n) != N) throw std::invalid_argument("grid size must be a power of two");
    return n;
}
} // namespace

int GridSpec1D::qubits() const { return log2_exact(cells); }

void GridSpec1D::validate() const {
    if (cells < 4) throw std::invalid_argument("grid needs N >= 4 cells");
    log2_exact(cells);
    if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");
}

int GridSpec2D::qubits_per_axis() const { return log2_exact(cells_per_axis); }

void GridSpec2D::validate() const {
    if (cells_per_axis < 4) throw std::invalid_argument("grid needs N >= 4 cells per axis");
    log2_exact(cells_per_axis);
    if (!(length > 0.0)) throw std::invalid_argument("grid length must be positive");
}

long relabel(long k, long N) {
    if (k < 0 || k >= N) throw std::invalid_argument("relabel: k out of range");
    return k < N / 2 ? k : k - N;
}

FrequencySymbol inverse_laplace_symbol_1d(long N, double L) {
    FrequencySymbol s;
    s.N = N;
    s.length = L;
    s.zero_override = 0.0;
    s.value = [N, L](double j) {
        const double r = j < double(N) / 2.0 ? j : j - double(N);
        if (std::abs(r) < 0.5) return 0.0; // zero-mean gauge at the DC index
        const double q = L / (2.0 * kPi * r);
        return q * q;
    };
    return s;
}

void SourceField1D::validate() const {
    if (values.empty()) throw std::invalid_argument("empty source field");
    double sum = 0.0, nrm2 = 0.0;
    for (double v : values) {
        sum += v;
        nrm2 += v * v;
    }
    const double nrm = std::sqrt(nrm2);
    if (nrm < 1e-300) throw std::invalid_argument("zero source is degenerate");
    if (std::abs(sum) > 1e-8 * nrm * std::sqrt(double(values.size())) + 1e-12)
        throw std::invalid_argument("source must have zero mean (periodic solvability)");
}

void SourceField2D::validate() const {
    if (values.empty() || cells_per_axis < 1 ||
        values.size() != std::size_t(cells_per_axis) * std::size_t(cells_per_axis))
        throw std::invalid_argument("source grid size mismatch");
    double sum = 0.0, nrm2 = 0.0;
    for (double v : values) {
        sum += v;
        nrm2 += v * v;
    }
    const double nrm = std::sqrt(nrm2);
    if (nrm < 1e-300) throw std::invalid_argument("zero source is degenerate");
    if (std::abs(sum) > 1e-8 * nrm * std::sqrt(double(values.size())) + 1e-12)
        throw std::invalid_argument("source must have zero mean (periodic solvability)");
}

// --- classical oracles -------------------------------------------------------

namespace {

// unitary DFT with positive exponent, matching dft_matrix
std::vector<cplx> dft_forward(const std::vector<cplx> &v) {
    const std::size_t N = v.size();
    std::vector<cplx> out(N, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < N; ++j) {
        cplx acc(0.0, 0.0);
        for (std::size_t k = 0; k < N; ++k) {
            const double arg = 2.0 * kPi * double((j * k) % N) / double(N);
            acc += v[k] * cplx(std::cos(arg), std::sin(arg));
        }
        out[j] = acc / std::sqrt(double(N));
    }
    return out;
}

std::vector<cplx> dft_inverse(const std::vector<cplx> &v) {
    const std::size_t N = v.size();
    std::vector<cplx> out(N, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < N; ++k) {
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < N; ++j) {
            const double arg = 2.0 * kPi * double((j * k) % N) / double(N);
            acc += v[j] * cplx(std::cos(arg), -std::sin(arg));
        }
        out[k] = acc / std::sqrt(double(N));
    }
    return out;
}

} // namespace

std::vector<double> classical_spectral_solve_1d(const std::vector<double> &f,
                                                const GridSpec1D &grid) {
    grid.validate();
    const long N = grid.cells;
    if (static_cast<long>(f.size()) != N)
        throw std::invalid_argument("source length does not match grid");
    std::vector<cplx> fc(f.begin(), f.end());
    std::vector<cplx> fhat = dft_forward(fc);
    const FrequencySymbol sym = inverse_laplace_symbol_1d(N, grid.length);
    for (long j = 0; j < N; ++j) fhat[j] *= sym.at(j);
    std::vector<cplx> v = dft_inverse(fhat);
    std::vector<double> out(N);
    for (long k = 0; k < N; ++k) out[k] = v[k].real();
    return out;
}

std::vector<std::pair<std::uint64_t, double>> sparse_spectrum_2d(
    const std::vector<double> &values, long N, double threshold_rel) {
    if (static_cast<long>(values.size()) != N * N)
        throw std::invalid_argument("field size does not match grid");
    std::vector<cplx> a(values.begin(), values.end());
    std::vector<cplx> tmp(N);
    for (long k0 = 0; k0 < N; ++k0) {
        std::vector<cplx> row(a.begin() + k0 * N, a.begin() + (k0 + 1) * N);
        row = dft_forward(row);
        std::copy(row.begin(), row.end(), a.begin() + k0 * N);
    }
    for (long k1 = 0; k1 < N; ++k1) {
        for (long k0 = 0; k0 < N; ++k0) tmp[k0] = a[k0 * N + k1];
        tmp = dft_forward(tmp);
        for (long k0 = 0; k0 < N; ++k0) a[k0 * N + k1] = tmp[k0];
    }
    double nrm = 0.0;
    for (const cplx &c : a) nrm += std::norm(c);
    nrm = std::sqrt(nrm);
    std::vector<std::pair<std::uint64_t, double>> out;
    for (long j = 0; j < N * N; ++j) {
        if (std::abs(a[j]) <= threshold_rel * nrm) continue;
        if (std::abs(a[j].imag()) > 1e-9 * nrm)
            throw std::runtime_error("sparse spectrum entries must be real");
        out.push_back({std::uint64_t(j), a[j].real()});
    }
    return out;
}

std::vector<double> classical_spectral_solve_2d(const std::vector<double> &f,
                                                const GridSpec2D &grid) {
    grid.validate();
    const long N = grid.cells_per_axis;
    if (static_cast<long>(f.size()) != N * N)
        throw std::invalid_argument("source length does not match grid");
    // row-column DFT
    std::vector<cplx> a(f.begin(), f.end());
    std::vector<cplx> tmp(N);
    for (long k0 = 0; k0 < N; ++k0) {
        std::vector<cplx> row(a.begin() + k0 * N, a.begin() + (k0 + 1) * N);
        row = dft_forward(row);
        std::copy(row.begin(), row.end(), a.begin() + k0 * N);
    }
    for (long k1 = 0; k1 < N; ++k1) {
        for (long k0 = 0; k0 < N; ++k0) tmp[k0] = a[k0 * N + k1];
        tmp = dft_forward(tmp);
        for (long k0 = 0; k0 < N; ++k0) a[k0 * N + k1] = tmp[k0];
    }
    const double L = grid.length;
    for (long j0 = 0; j0 < N; ++j0)
        for (long j1 = 0; j1 < N; ++j1) {
            const double r0 = double(relabel(j0, N));
            const double r1 = double(relabel(j1, N));
            const double rho = r0 * r0 + r1 * r1;
            const double s = rho == 0.0 ? 0.0 : L * L / (4.0 * kPi * kPi * rho);
            a[j0 * N + j1] *= s;
        }
    for (long k1 = 0; k1 < N; ++k1) {
        for (long k0 = 0; k0 < N; ++k0) tmp[k0] = a[k0 * N + k1];
        tmp = dft_inverse(tmp);
        for (long k0 = 0; k0 < N; ++k0) a[k0 * N + k1] = tmp[k0];
    }
    std::vector<double> out(N * N);
    for (long k0 = 0; k0 < N; ++k0) {
        std::vector<cplx> row(a.begin() + k0 * N, a.begin() + (k0 + 1) * N);
        row = dft_inverse(row);
        for (long k1 = 0; k1 < N; ++k1) out[k0 * N + k1] = row[k1].real();
    }
    return out;
}

// --- fixtures and metrics ----------------------------------------------------

Poisson1DFixture analytic_poisson1d_fixture() {
    const double a0 = 0.3, a1 = 0.1, a2 = -0.1772, a3 = 0.053, a4 = -0.0266;
    Poisson1DFixture fx;
    fx.source = [=](double x) {
        const double d = (x - a0) / a1;
        return std::exp(-d * d) + a2;
    };
    fx.solution = [=](double x) {
        const double d = (x - a0) / a1;
        return 0.5 * a1 * std::sqrt(kPi) *
                   ((x - a0) * std::erf(d) + a1 / std::sqrt(kPi) * std::exp(-d * d)) +
               0.5 * a2 * x * x + a3 * x + a4;
    };
    return fx;
}

std::function<double(double)> poisson1d_reference_solution(double mean_shift) {
    const double a0 = 0.3, a1 = 0.1, a2 = -0.1772;
    auto g = [=](double x) {
        const double d = (x - a0) / a1;
        return 0.5 * a1 * std::sqrt(kPi) *
               ((x - a0) * std::erf(d) + a1 / std::sqrt(kPi) * std::exp(-d * d));
    };
    const double a3 = g(0.0) - g(1.0) - a2 / 2.0; // exact periodic gauge
    return [=](double x) {
        return -(g(x) + 0.5 * a2 * x * x + a3 * x) + mean_shift * (x * x - x) / 2.0;
    };
}

double interpolate_bandlimited(const std::vector<cplx> &vhat, double x, double L) {
    // forward transform carries exp(+2 pi i jk/N), so reconstruction takes
    // the conjugate exponent to reproduce the nodal values
    const long N = static_cast<long>(vhat.size());
    cplx acc(0.0, 0.0);
    for (long j = 0; j < N; ++j) {
        const double xi = 2.0 * kPi * double(relabel(j, N)) / L;
        acc += vhat[j] * cplx(std::cos(xi * x), -std::sin(xi * x));
    }
    acc /= std::sqrt(double(N));
    double scale = 0.0;
    for (const cplx &c : vhat) scale = std::max(scale, std::abs(c));
    if (std::abs(acc.imag()) > 1e-9 * std::max(1.0, scale))
        throw std::runtime_error("band-limited evaluation has an imaginary residual");
    return acc.real();
}

double l2_error(const std::vector<double> &a, const std::vector<double> &b) {
    if (a.size() != b.size()) throw std::invalid_argument("l2_error: size mismatch");
    double na = 0.0, nb = 0.0;
    for (double v : a) na += v * v;
    for (double v : b) nb += v * v;
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < 1e-300 || nb < 1e-300) {
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double x = a[i] / (na > 0 ? na : 1.0) - b[i] / (nb > 0 ? nb : 1.0);
            d += x * x;
        }
        return std::sqrt(d);
    }
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i] / na - b[i] / nb;
        d += x * x;
    }
    return std::sqrt(d);
}

std::pair<std::vector<double>, double> polyfit(const std::vector<double> &x,
                                               const std::vector<double> &y, int degree) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("polyfit: bad input");
    const int m = degree + 1;
    // normal equations, small and dense
    std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<double> pw(m);
        pw[0] = 1.0;
        for (int j = 1; j < m; ++j) pw[j] = pw[j - 1] * x[i];
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) A[r][c] += pw[r] * pw[c];
            A[r][m] += pw[r] * y[i];
        }
    }
    // Gaussian elimination with partial pivoting
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[col], A[piv]);
        const double d = A[col][col];
        if (std::abs(d) < 1e-300) continue;
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double fct = A[r][col] / d;
            for (int c = col; c <= m; ++c) A[r][c] -= fct * A[col][c];
        }
    }
    std::vector<double> coef(m, 0.0);
    for (int r = 0; r < m; ++r)
        coef[r] = std::abs(A[r][r]) < 1e-300 ? 0.0 : A[r][m] / A[r][r];

    double mean = std::accumulate(y.begin(), y.end(), 0.0) / double(y.size());
    double ss_tot = 0.0, ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double fit = 0.0, pw = 1.0;
        for (int j = 0; j < m; ++j) {
            fit += coef[j] * pw;
            pw *= x[i];
        }
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    const double r2 = ss_tot < 1e-300 ? 1.0 : 1.0 - ss_res / ss_tot;
    return {coef, r2};
}

double convergence_fit(const std::vector<double> &Ns, const std::vector<double> &errs) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        lx.push_back(std::log(Ns[i]));
        ly.push_back(std::log(errs[i]));
    }
    return polyfit(lx, ly, 1).first[1];
}

// --- symbol fitting schedule -------------------------------------------------

std::vector<long> symbol_breakpoints_1d(long N) {
    // Aligned blocks, dyadic in |r|: {0}, {1}, [2,4), ..., [N/4, N/2) on the
    // positive side and the mirrored [N - 2^{a+1}, N - 2^a) on the negative
    // side (the widest of which contains the Nyquist index). Every block is
    // binary-aligned, so encodings can work in block-local bits.
    std::vector<long> bps{0, 1};
    for (long v = 2; v <= N / 2; v *= 2) bps.push_back(v);
    for (long a = 0; (1L << a) <= N / 2; ++a) bps.push_back(N - (1L << a));
    bps.push_back(N);
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
    return bps;
}

PiecewiseChebyshev fit_symbol_1d(const FrequencySymbol &sym, int degree, double epsilon,
                                 bool arcsin_warp, double lower_tol) {
    auto target = [&](double j) {
        const double v = sym.value(j);
        if (!arcsin_warp) return v;
        const double scaled = std::clamp(epsilon * v, -1.0, 1.0);
        return std::asin(scaled) / epsilon;
    };
    const std::vector<long> bps = symbol_breakpoints_1d(sym.N);
    PiecewiseChebyshev pc;
    pc.breakpoints = bps;
    pc.degree = degree;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        const long lo = bps[i], hi = bps[i + 1];
        MonomialPolynomial piece = (hi - lo <= degree + 1)
                                       ? interpolate_at_integers(target, lo, hi)
                                       : chebyshev_fit_interval(target, lo, hi, degree);
        pc.max_errors.push_back(interval_max_error(target, piece, lo, hi));
        pc.pieces.push_back(std::move(piece));
    }
    // blocks where the symbol is small tolerate cheap low-degree pieces
    if (lower_tol > 0.0) lower_piece_degrees(pc, target, lower_tol);
    return pc;
}

// --- shared pipeline helpers --------------------------------------------------

namespace {

bool block_aligned(long lo, long hi) {
    const long w = hi - lo;
    return w > 0 && (w & (w - 1)) == 0 && lo % w == 0;
}

int block_bits(long lo, long hi) {
    int b = 0;
    while ((1L << b) < hi - lo) ++b;
    return b;
}

// transpiled {CNOT, U3} cost estimates of the chain syntheses, used only to
// pick the cheaper of two equivalent emissions
double mcx_cost(int m) {
    if (m <= 0) return 1.0;
    if (m == 1) return 1.0;
    if (m == 2) return 14.0;
    return 14.0 * m - 14.0;
}

double mcu_cost(int m) {
    if (m <= 0) return 1.0;
    if (m == 1) return 5.0;
    if (m == 2) return 17.0;
    return 14.0 * m - 9.0;
}

// polarity-tagged controls pinning the high bits of an aligned block
std::vector<Control> prefix_controls(long lo, int bits, const std::vector<int> &data) {
    const int n = static_cast<int>(data.size());
    std::vector<Control> ctl;
    for (int i = 0; i < n - bits; ++i) {
        const bool bit = (lo >> (n - 1 - i)) & 1L;
        ctl.push_back({data[i], !bit});
    }
    return ctl;
}

// One aligned block of a piecewise encode. Emits either the comparator
// pattern (flag set, gated rotations, flag unset) or rotations carrying the
// block prefix directly, whichever transpiles smaller.
void append_encoded_block(Circuit &c, const std::vector<RotationTerm> &terms, long lo,
                          long hi, const std::vector<int> &data, int flag,
                          int interval_flag, const std::vector<Control> &extra,
                          double epsilon) {
    const int n = static_cast<int>(data.size());
    const int bits = block_bits(lo, hi);
    const int prefix = n - bits;
    double flag_cost = 2.0 * mcx_cost(prefix);
    double direct_cost = 0.0;
    for (const RotationTerm &t : terms) {
        if (t.angle == 0.0) continue;
        const int s = static_cast<int>(t.subset.size() + extra.size());
        flag_cost += mcu_cost(s + 1);
        direct_cost += mcu_cost(s + prefix);
    }
    if (direct_cost <= flag_cost) {
        std::vector<Control> rot_extra = prefix_controls(lo, bits, data);
        for (const Control &e : extra) rot_extra.push_back(e);
        append_rotation_terms(c, terms, data, flag, rot_extra, epsilon);
    } else {
        std::vector<Control> rot_extra = extra;
        rot_extra.push_back({interval_flag, false});
        append_comparator(c, lo, hi, data, interval_flag);
        append_rotation_terms(c, terms, data, flag, rot_extra, epsilon);
        append_comparator(c, lo, hi, data, interval_flag);
    }
}

// Encodes a piecewise symbol block by block; aligned blocks expand in the
// block-local variable so rotation fan-in stays small.
void append_symbol_encode(Circuit &c, const PiecewiseChebyshev &pc,
                          const std::vector<int> &data, int flag, int interval_flag,
                          const std::vector<Control> &extra, double epsilon) {
    const int n = static_cast<int>(data.size());
    for (std::size_t i = 0; i + 1 < pc.breakpoints.size(); ++i) {
        const long lo = pc.breakpoints[i], hi = pc.breakpoints[i + 1];
        if (!block_aligned(lo, hi)) {
            std::vector<RotationTerm> terms = expand_rotation_terms(pc.pieces[i], n, true);
            bool all_zero = true;
            for (const auto &t : terms)
                if (t.angle != 0.0) all_zero = false;
            if (all_zero) continue;
            std::vector<Control> rot_extra = extra;
            rot_extra.push_back({interval_flag, false});
            append_comparator(c, lo, hi, data, interval_flag);
            append_rotation_terms(c, terms, data, flag, rot_extra, epsilon);
            append_comparator(c, lo, hi, data, interval_flag);
            continue;
        }
        std::vector<RotationTerm> terms =
            expand_rotation_terms_block(pc.pieces[i], n, lo, block_bits(lo, hi));
        bool all_zero = true;
        for (const auto &t : terms)
            if (t.angle != 0.0) all_zero = false;
        if (all_zero) continue;
        append_encoded_block(c, terms, lo, hi, data, flag, interval_flag, extra, epsilon);
    }
}

// Test-oriented exact route: one rotation per frequency with the full basis
// pattern as controls, angles arcsin-corrected so the flag amplitude equals
// epsilon * symbol(j) exactly.
void append_symbol_exact_injected(Circuit &c, const FrequencySymbol &sym,
                                  const std::vector<int> &data, int flag,
                                  double epsilon) {
    const int n = static_cast<int>(data.size());
    for (long j = 0; j < sym.N; ++j) {
        const double v = epsilon * sym.at(j);
        if (v == 0.0) continue;
        const double angle = 2.0 * std::asin(std::clamp(v, -1.0, 1.0));
        std::vector<Control> ctl;
        for (int i = 0; i < n; ++i)
            ctl.push_back({data[i], ((j >> (n - 1 - i)) & 1L) == 0});
        c.append(g_ry(angle, flag, std::move(ctl)));
    }
}

// Two-axis version: flags t0/t1 or both prefixes directly.
void append_encoded_box(Circuit &c, const std::vector<RotationTerm> &terms, long lo0,
                        long hi0, long lo1, long hi1, const std::vector<int> &ax0,
                        const std::vector<int> &ax1, const std::vector<int> &all,
                        int flag, int t0, int t1, double epsilon) {
    const int n = static_cast<int>(ax0.size());
    const int p0 = n - block_bits(lo0, hi0);
    const int p1 = n - block_bits(lo1, hi1);
    double flag_cost = 2.0 * mcx_cost(p0) + 2.0 * mcx_cost(p1);
    double direct_cost = 0.0;
    for (const RotationTerm &t : terms) {
        if (t.angle == 0.0) continue;
        const int s = static_cast<int>(t.subset.size());
        flag_cost += mcu_cost(s + 2);
        direct_cost += mcu_cost(s + p0 + p1);
    }
    if (direct_cost <= flag_cost) {
        std::vector<Control> rot_extra = prefix_controls(lo0, n - p0, ax0);
        for (const Control &e : prefix_controls(lo1, n - p1, ax1)) rot_extra.push_back(e);
        append_rotation_terms(c, terms, all, flag, rot_extra, epsilon);
    } else {
        append_comparator(c, lo0, hi0, ax0, t0);
        append_comparator(c, lo1, hi1, ax1, t1);
        append_rotation_terms(c, terms, all, flag, {{t0, false}, {t1, false}}, epsilon);
        append_comparator(c, lo1, hi1, ax1, t1);
        append_comparator(c, lo0, hi0, ax0, t0);
    }
}

// Fitted source preparation: H on the data register, then a piecewise
// encode of the arcsin-warped x-space source, built on adaptively bisected
// (hence aligned) blocks. The good branch carries (w/sqrt N) f_k on flag=1.
struct FittedPrep {
    PiecewiseChebyshev fit;
    double scale = 0.0; // w: branch = (w/sqrt N) f_k
    double fit_error = 0.0;
};

FittedPrep append_fitted_source_prep(Circuit &c, const std::function<double(double)> &fx,
                                     long N, double L, const std::vector<int> &data,
                                     int flag, int interval_flag, double tol, int degree) {
    const int n = static_cast<int>(data.size());
    double fmax = 0.0;
    for (long k = 0; k < N; ++k) fmax = std::max(fmax, std::abs(fx(double(k) * L / N)));
    if (fmax <= 0.0) throw std::invalid_argument("fitted prep needs a nonzero source");
    const double w = 0.25 / fmax;
    auto target = [&](double k) {
        const double v = w * fx(k * L / double(N));
        return std::asin(std::clamp(v, -1.0, 1.0)) / w;
    };
    PiecewiseChebyshev pc = chebyshev_fit_adaptive(target, 0, N, degree, tol);
    lower_piece_degrees(pc, target, tol);

    for (int q : data) c.append(g_h(q));
    for (std::size_t i = 0; i + 1 < pc.breakpoints.size(); ++i) {
        const long lo = pc.breakpoints[i], hi = pc.breakpoints[i + 1];
        std::vector<RotationTerm> terms =
            expand_rotation_terms_block(pc.pieces[i], n, lo, block_bits(lo, hi));
        append_encoded_block(c, terms, lo, hi, data, flag, interval_flag, {}, w);
    }
    return {std::move(pc), w, 0.0};
}

std::uint64_t qubit_bit(int total, int q) {
    return std::uint64_t(1) << (total - 1 - q);
}

} // namespace

// --- 1D quantum solve ----------------------------------------------------------

Poisson1DResult poisson1d_quantum_solve(const SourceField1D &f, const GridSpec1D &grid,
                                        const PoissonFitConfig &cfg) {
    grid.validate();
    f.validate();
    const long N = grid.cells;
    const int n = grid.qubits();
    if (static_cast<long>(f.values.size()) != N)
        throw std::invalid_argument("source length does not match grid");

    const double eps_rel =
        cfg.eps_rel > 0.0 ? cfg.eps_rel : 0.5 * std::pow(8.0 / double(N), 0.25);
    const FrequencySymbol sym = inverse_laplace_symbol_1d(N, grid.length);
    double sym_max = 0.0;
    for (long j = 0; j < N; ++j) sym_max = std::max(sym_max, std::abs(sym.at(j)));
    const double eps_sym = eps_rel / sym_max;

    const bool fitted = cfg.source_prep == SourcePrep::fitted ||
                        (cfg.source_prep == SourcePrep::automatic && bool(f.fn));
    if (fitted && !f.fn)
        throw std::invalid_argument("fitted source preparation needs the x-space source");

    // register layout: field msb-first, then a0 (symbol flag), a1 (interval
    // flag, restored), and i0 (source flag) when the source is fitted
    const int a0 = n, a1 = n + 1;
    const int i0 = fitted ? n + 2 : -1;
    const int total = n + 2 + (fitted ? 1 : 0);
    Circuit c(total, "poisson1d");
    std::vector<int> data(n);
    for (int i = 0; i < n; ++i) data[i] = i;

    PoissonDiagnostics diag;
    diag.total_qubits = total;
    diag.epsilon_symbol = eps_sym;

    double prep_scale; // branch amplitude = prep_scale * f_k on the good branch
    if (fitted) {
        // the symbol suppresses within-interval fit wiggle quadratically in
        // the frequency, so a fixed absolute tolerance keeps the source term
        // well below the readout linearisation across the sweep
        double fmax = 0.0;
        for (long k = 0; k < N; ++k)
            fmax = std::max(fmax, std::abs(f.fn(double(k) * grid.length / N)));
        const double tol =
            cfg.source_fit_tol > 0.0 ? cfg.source_fit_tol : std::max(1e-10, 3e-4 * fmax);
        FittedPrep prep = append_fitted_source_prep(c, f.fn, N, grid.length, data, i0,
                                                    a1, tol, cfg.source_fit_degree);
        prep_scale = prep.scale / std::sqrt(double(N));
        diag.epsilon_source = prep.scale;
        // record the achieved deviation from the sampled nodal values
        double err = 0.0;
        for (long k = 0; k < N; ++k) {
            const double enc = std::sin(prep.scale * prep.fit.eval(double(k))) / prep.scale;
            err = std::max(err, std::abs(enc - f.values[k]));
        }
        diag.source_fit_error = err;
    } else {
        double nrm = 0.0;
        for (double v : f.values) nrm += v * v;
        nrm = std::sqrt(nrm);
        std::vector<double> unit(f.values);
        for (double &v : unit) v /= nrm;
        c.append(exact_state_prep(unit));
        prep_scale = 1.0 / nrm;
    }

    c.append(qft_circuit({n, true, 0}));

    PiecewiseChebyshev symfit;
    if (cfg.symbol_mode == SymbolMode::exact_injected) {
        append_symbol_exact_injected(c, sym, data, a0, eps_sym);
    } else {
        const double tol_rel = cfg.symbol_tol_rel > 0.0
                                   ? cfg.symbol_tol_rel
                                   : (cfg.arcsin_warp ? 1e-8 : eps_rel * eps_rel / 12.0);
        symfit = fit_symbol_1d(sym, cfg.degree, eps_sym, cfg.arcsin_warp,
                               tol_rel * sym_max);
        diag.fit_max_error = symfit.max_error();
        append_symbol_encode(c, symfit, data, a0, a1, {}, eps_sym);
    }

    c.append(iqft_circuit({n, true, 0}));

    StateVector state(total);
    state.apply(c);

    // success branch: a0 = 1, everything else (a1, i0) per pattern
    std::uint64_t pattern = qubit_bit(total, a0);
    if (fitted) pattern |= qubit_bit(total, i0);
    const int shift = total - n;
    Poisson1DResult result;
    result.v.resize(N);
    double succ = 0.0;
    const double scale = 1.0 / (prep_scale * eps_sym);
    for (long k = 0; k < N; ++k) {
        const cplx amp = state.amplitude((std::uint64_t(k) << shift) | pattern);
        succ += std::norm(amp);
        result.v[k] = amp.real() * scale;
    }
    diag.success_norm = succ;
    diag.junk_norm = 1.0 - succ;
    if (cfg.with_gate_counts) diag.gate_counts = count_transpiled(c);
    result.diag = std::move(diag);
    return result;
}

// --- 2D quantum solve ----------------------------------------------------------

namespace {

// Tensor fit of a bivariate target on one box, collocated at the box's
// integer grid: least squares per axis in the centered variable, exact when
// an axis holds at most degree+1 integers. Coefficients come back in the
// global (j0, j1) monomials.
BivariatePolynomial fit_box_bivariate(const std::function<double(double, double)> &target,
                                      long lo0, long hi0, long lo1, long hi1, int degree) {
    const long w0 = hi0 - lo0, w1 = hi1 - lo1;
    const int m0 = int(std::min<long>(w0, degree + 1)); // coefficients per axis
    const int m1 = int(std::min<long>(w1, degree + 1));
    const double c0 = 0.5 * (double(lo0) + double(hi0 - 1));
    const double c1 = 0.5 * (double(lo1) + double(hi1 - 1));

    std::vector<std::vector<double>> A(w0, std::vector<double>(w1));
    for (long i = 0; i < w0; ++i)
        for (long j = 0; j < w1; ++j) {
            A[i][j] = target(double(lo0 + i), double(lo1 + j));
            if (!std::isfinite(A[i][j]))
                throw std::runtime_error("bivariate fit: target not finite");
        }

    // least-squares solve along one axis in the centered variable; returns
    // the m coefficient rows for every input column
    auto solve_axis = [](const std::vector<std::vector<double>> &rhs, long w, int m,
                         long lo, double center) {
        // design matrix V[i][j] = (lo + i - center)^j
        std::vector<std::vector<double>> V(w, std::vector<double>(m));
        for (long i = 0; i < w; ++i) {
            double pw = 1.0;
            const double t = double(lo + i) - center;
            for (int j = 0; j < m; ++j) {
                V[i][j] = pw;
                pw *= t;
            }
        }
        const std::size_t cols = rhs[0].size();
        // normal equations with a shared factorisation
        std::vector<std::vector<double>> G(m, std::vector<double>(m + cols, 0.0));
        for (long i = 0; i < w; ++i)
            for (int r = 0; r < m; ++r) {
                for (int c = 0; c < m; ++c) G[r][c] += V[i][r] * V[i][c];
                for (std::size_t c = 0; c < cols; ++c)
                    G[r][m + c] += V[i][r] * rhs[i][c];
            }
        for (int col = 0; col < m; ++col) {
            int piv = col;
            for (int r = col + 1; r < m; ++r)
                if (std::abs(G[r][col]) > std::abs(G[piv][col])) piv = r;
            std::swap(G[col], G[piv]);
            for (int r = 0; r < m; ++r) {
                if (r == col || std::abs(G[col][col]) < 1e-300) continue;
                const double f = G[r][col] / G[col][col];
                for (std::size_t c = col; c < G[r].size(); ++c) G[r][c] -= f * G[col][c];
            }
        }
        std::vector<std::vector<double>> coef(m, std::vector<double>(cols, 0.0));
        for (int r = 0; r < m; ++r)
            for (std::size_t c = 0; c < cols; ++c)
                coef[r][c] = std::abs(G[r][r]) < 1e-300 ? 0.0 : G[r][m + c] / G[r][r];
        return coef;
    };

    // fit axis 0 (rows of A), then axis 1 on the coefficient rows
    std::vector<std::vector<double>> stage0 = solve_axis(A, w0, m0, lo0, c0);
    std::vector<std::vector<double>> stage0_t(w1, std::vector<double>(m0));
    for (int r = 0; r < m0; ++r)
        for (long j = 0; j < w1; ++j) stage0_t[j][r] = stage0[r][j];
    std::vector<std::vector<double>> stage1 = solve_axis(stage0_t, w1, m1, lo1, c1);
    // stage1[b][a] = centered coefficient of (j0-c0)^a (j1-c1)^b
    std::vector<std::vector<double>> coef_centered(m0, std::vector<double>(m1, 0.0));
    for (int a = 0; a < m0; ++a)
        for (int b = 0; b < m1; ++b) coef_centered[a][b] = stage1[b][a];

    // shift the centered variables back to global j
    const int deg = std::max(m0, m1) - 1;
    BivariatePolynomial out;
    out.coefficients.assign(deg + 1, std::vector<double>(deg + 1, 0.0));
    std::vector<std::vector<double>> binom(deg + 1, std::vector<double>(deg + 1, 0.0));
    for (int i = 0; i <= deg; ++i) {
        binom[i][0] = 1.0;
        for (int j = 1; j <= i; ++j)
            binom[i][j] = binom[i - 1][j - 1] + (j <= i - 1 ? binom[i - 1][j] : 0.0);
    }
    for (int a = 0; a < m0; ++a)
        for (int b = 0; b < m1; ++b) {
            const double cc = coef_centered[a][b];
            if (cc == 0.0) continue;
            for (int t0 = 0; t0 <= a; ++t0)
                for (int t1 = 0; t1 <= b; ++t1) {
                    out.coefficients[t0][t1] += cc * binom[a][t0] *
                                                std::pow(-c0, double(a - t0)) *
                                                binom[b][t1] *
                                                std::pow(-c1, double(b - t1));
                }
        }
    return out;
}

} // namespace

Poisson2DResult poisson2d_quantum_solve(const SourceField2D &f, const GridSpec2D &grid,
                                        const PoissonFitConfig &cfg) {
    grid.validate();
    f.validate();
    const long N = grid.cells_per_axis;
    const int n = grid.qubits_per_axis();
    const double L = grid.length;

    const double eps_rel = cfg.eps_rel > 0.0 ? cfg.eps_rel : 0.25;
    const bool warp = true; // 2D keeps only the fit error
    auto sym2 = [&](double j0, double j1) {
        const double r0 = j0 < double(N) / 2.0 ? j0 : j0 - double(N);
        const double r1 = j1 < double(N) / 2.0 ? j1 : j1 - double(N);
        const double rho = r0 * r0 + r1 * r1;
        if (rho < 0.25) return 0.0;
        return L * L / (4.0 * kPi * kPi * rho);
    };
    const double sym_max = sym2(0.0, 1.0); // largest at |r| = 1
    const double eps_sym = eps_rel / sym_max;
    auto target2 = [&](double j0, double j1) {
        const double v = eps_sym * sym2(j0, j1);
        if (!warp) return sym2(j0, j1);
        return std::asin(std::clamp(v, -1.0, 1.0)) / eps_sym;
    };

    const bool fitted = cfg.source_prep == SourcePrep::fitted;
    if (fitted && !f.fn)
        throw std::invalid_argument("fitted source preparation needs the x-space source");

    // layout: axis0 [0,n), axis1 [n,2n), a0 symbol flag, t0/t1 interval
    // flags per axis (restored), i0 source flag when fitted
    const int a0 = 2 * n, t0 = 2 * n + 1, t1 = 2 * n + 2;
    const int i0 = fitted ? 2 * n + 3 : -1;
    const int total = 2 * n + 3 + (fitted ? 1 : 0);
    Circuit c(total, "poisson2d");
    std::vector<int> ax0(n), ax1(n), all(2 * n);
    for (int i = 0; i < n; ++i) {
        ax0[i] = i;
        ax1[i] = n + i;
        all[i] = i;
        all[n + i] = n + i;
    }

    PoissonDiagnostics diag;
    diag.total_qubits = total;
    diag.epsilon_symbol = eps_sym;

    double prep_scale;
    double src_fit_err = 0.0;
    const bool sparse = !fitted && !f.spectrum.empty();
    if (sparse) {
        // exact preparation of a band-limited source: dense prep on the low
        // field qubits, amplitude swaps onto the mode labels (tag reuses
        // t0), then the inverse transform
        const std::size_t M = f.spectrum.size();
        int mini = 0;
        while ((std::size_t(1) << mini) < M) ++mini;
        mini = std::max(mini, 1);
        std::vector<double> dense(std::size_t(1) << mini, 0.0);
        double nrm = 0.0;
        for (const auto &[label, coef] : f.spectrum) nrm += coef * coef;
        nrm = std::sqrt(nrm);
        for (std::size_t m = 0; m < M; ++m) dense[m] = f.spectrum[m].second / nrm;
        Circuit prep = exact_state_prep(dense);
        for (GateInstance g : prep.gates) {
            for (int &t : g.targets) t += 2 * n - mini;
            for (Control &ctl : g.controls) ctl.qubit += 2 * n - mini;
            c.append(std::move(g));
        }
        // cycle-following placement so overlapping labels stay consistent
        std::map<std::uint64_t, std::size_t> occupant; // slot -> pending index
        std::vector<std::uint64_t> position(M);
        for (std::size_t m = 0; m < M; ++m) {
            occupant[m] = m;
            position[m] = m;
        }
        for (std::size_t m = 0; m < M; ++m) {
            const std::uint64_t want = f.spectrum[m].first;
            const std::uint64_t have = position[m];
            if (want == have) continue;
            append_amplitude_swap(c, have, want, all, t0);
            auto it = occupant.find(want);
            if (it != occupant.end()) {
                position[it->second] = have;
                occupant[have] = it->second;
            } else {
                occupant.erase(have);
            }
            position[m] = want;
            occupant[want] = m;
        }
        c.append(qft_2d(n, 0, n, total).adjoint());
        double vnrm = 0.0;
        for (double v : f.values) vnrm += v * v;
        prep_scale = 1.0 / std::sqrt(vnrm);
    } else if (fitted) {
        // bivariate warped fit of the x-space source on adaptively bisected
        // boxes; bisection of the full square keeps every box aligned
        double fmax = 0.0;
        for (long k0 = 0; k0 < N; ++k0)
            for (long k1 = 0; k1 < N; ++k1)
                fmax = std::max(fmax, std::abs(f.fn(double(k0) * L / N, double(k1) * L / N)));
        if (fmax <= 0.0) throw std::invalid_argument("fitted prep needs a nonzero source");
        const double w = 0.25 / fmax;
        auto starget = [&](double k0, double k1) {
            const double v = w * f.fn(k0 * L / double(N), k1 * L / double(N));
            return std::asin(std::clamp(v, -1.0, 1.0)) / w;
        };
        const double tol = cfg.source_fit_tol > 0.0 ? cfg.source_fit_tol : 1e-4 * fmax;

        struct Box {
            long lo0, hi0, lo1, hi1;
            BivariatePolynomial piece;
        };
        std::vector<Box> work{{0, N, 0, N, {}}}, done;
        auto box_error = [&](const Box &b) {
            double err = 0.0;
            for (long j0 = b.lo0; j0 < b.hi0; ++j0)
                for (long j1 = b.lo1; j1 < b.hi1; ++j1)
                    err = std::max(err, std::abs(b.piece.eval(double(j0), double(j1)) -
                                                 starget(double(j0), double(j1))));
            return err;
        };
        while (!work.empty()) {
            Box b = work.back();
            work.pop_back();
            b.piece = fit_box_bivariate(starget, b.lo0, b.hi0, b.lo1, b.hi1,
                                        cfg.source_fit_degree);
            double err = box_error(b);
            const bool can_split = (b.hi0 - b.lo0 >= 2) || (b.hi1 - b.lo1 >= 2);
            if (err > tol && can_split && done.size() + work.size() < 4096) {
                if (b.hi0 - b.lo0 >= b.hi1 - b.lo1) {
                    const long mid = b.lo0 + (b.hi0 - b.lo0) / 2;
                    work.push_back({b.lo0, mid, b.lo1, b.hi1, {}});
                    work.push_back({mid, b.hi0, b.lo1, b.hi1, {}});
                } else {
                    const long mid = b.lo1 + (b.hi1 - b.lo1) / 2;
                    work.push_back({b.lo0, b.hi0, b.lo1, mid, {}});
                    work.push_back({b.lo0, b.hi0, mid, b.hi1, {}});
                }
                continue;
            }
            // keep the cheapest degree that meets the tolerance
            for (int d = 0; d < cfg.source_fit_degree; ++d) {
                Box cand = b;
                cand.piece = fit_box_bivariate(starget, b.lo0, b.hi0, b.lo1, b.hi1, d);
                const double cerr = box_error(cand);
                if (cerr <= tol) {
                    b = std::move(cand);
                    err = cerr;
                    break;
                }
            }
            src_fit_err = std::max(src_fit_err, err);
            done.push_back(std::move(b));
        }
        for (int q : all) c.append(g_h(q));
        for (const Box &b : done) {
            std::vector<RotationTerm> terms = expand_rotation_terms_bivariate_block(
                b.piece, n, b.lo0, block_bits(b.lo0, b.hi0), b.lo1,
                block_bits(b.lo1, b.hi1));
            append_encoded_box(c, terms, b.lo0, b.hi0, b.lo1, b.hi1, ax0, ax1, all, i0,
                               t0, t1, w);
        }
        prep_scale = w / double(N); // w / sqrt(N^2)
        diag.epsilon_source = w;
    } else {
        double nrm = 0.0;
        for (double v : f.values) nrm += v * v;
        nrm = std::sqrt(nrm);
        std::vector<double> unit(f.values);
        for (double &v : unit) v /= nrm;
        c.append(exact_state_prep(unit));
        prep_scale = 1.0 / nrm;
    }

    c.append(qft_2d(n, 0, n, total));

    if (cfg.symbol_mode == SymbolMode::exact_injected) {
        // test-oriented exact route: one arcsin-corrected rotation per
        // frequency pair with the full basis pattern as controls
        for (long j0 = 0; j0 < N; ++j0)
            for (long j1 = 0; j1 < N; ++j1) {
                const double v = eps_sym * sym2(double(j0), double(j1));
                if (v == 0.0) continue;
                const double angle = 2.0 * std::asin(std::clamp(v, -1.0, 1.0));
                std::vector<Control> ctl;
                for (int i = 0; i < n; ++i)
                    ctl.push_back({ax0[i], ((j0 >> (n - 1 - i)) & 1L) == 0});
                for (int i = 0; i < n; ++i)
                    ctl.push_back({ax1[i], ((j1 >> (n - 1 - i)) & 1L) == 0});
                c.append(g_ry(angle, a0, std::move(ctl)));
            }
        c.append(qft_2d(n, 0, n, total).adjoint());
        StateVector state(total);
        state.apply(c);
        std::uint64_t pattern = qubit_bit(total, a0);
        if (fitted) pattern |= qubit_bit(total, i0);
        const int shift = total - 2 * n;
        Poisson2DResult result;
        result.v.resize(N * N);
        double succ = 0.0;
        const double scale = 1.0 / (prep_scale * eps_sym);
        for (long k = 0; k < N * N; ++k) {
            const cplx amp = state.amplitude((std::uint64_t(k) << shift) | pattern);
            succ += std::norm(amp);
            result.v[k] = amp.real() * scale;
        }
        diag.success_norm = succ;
        diag.junk_norm = 1.0 - succ;
        if (cfg.with_gate_counts) diag.gate_counts = count_transpiled(c);
        result.diag = std::move(diag);
        return result;
    }

    // symbol boxes: tensor product of the 1D frequency blocks, each encoded
    // with the lowest degree that holds the fit below the taper threshold
    const std::vector<long> bps = symbol_breakpoints_1d(N);
    const double warped_max = std::asin(std::clamp(eps_sym * sym_max, -1.0, 1.0)) / eps_sym;
    const double theta =
        (cfg.symbol_tol_rel > 0.0 ? cfg.symbol_tol_rel : 2e-8) * warped_max;
    double fit_err = 0.0;
    std::uint64_t boxes = 0;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i)
        for (std::size_t j = 0; j + 1 < bps.size(); ++j) {
            const long lo0 = bps[i], hi0 = bps[i + 1];
            const long lo1 = bps[j], hi1 = bps[j + 1];
            auto box_error = [&](const BivariatePolynomial &piece) {
                double err = 0.0;
                for (long j0 = lo0; j0 < hi0; ++j0)
                    for (long j1 = lo1; j1 < hi1; ++j1)
                        err = std::max(err,
                                       std::abs(piece.eval(double(j0), double(j1)) -
                                                target2(double(j0), double(j1))));
                return err;
            };
            bool all_zero = true;
            double box_max = 0.0;
            double rho_min = 1e300;
            for (long j0 = lo0; j0 < hi0; ++j0)
                for (long j1 = lo1; j1 < hi1; ++j1) {
                    const double t = target2(double(j0), double(j1));
                    if (t != 0.0) all_zero = false;
                    box_max = std::max(box_max, std::abs(t));
                    const double r0 = double(relabel(j0, N));
                    const double r1 = double(relabel(j1, N));
                    rho_min = std::min(rho_min, r0 * r0 + r1 * r1);
                }
            if (all_zero) continue;
            // boxes beyond the configured source bandwidth never multiply a
            // nonzero Fourier coefficient, so they tolerate coarse pieces
            const bool out_of_band =
                cfg.symbol_bandwidth > 0.0 &&
                rho_min > cfg.symbol_bandwidth * cfg.symbol_bandwidth;
            const double box_theta = out_of_band ? 0.25 * box_max : theta;
            BivariatePolynomial piece;
            double err = 0.0;
            for (int d = 0; d <= cfg.degree; ++d) {
                piece = fit_box_bivariate(target2, lo0, hi0, lo1, hi1, d);
                err = box_error(piece);
                if (err <= box_theta) break;
            }
            fit_err = std::max(fit_err, err);
            ++boxes;
            std::vector<RotationTerm> terms = expand_rotation_terms_bivariate_block(
                piece, n, lo0, block_bits(lo0, hi0), lo1, block_bits(lo1, hi1));
            append_encoded_box(c, terms, lo0, hi0, lo1, hi1, ax0, ax1, all, a0, t0, t1,
                               eps_sym);
        }
    diag.fit_max_error = fit_err;

    c.append(qft_2d(n, 0, n, total).adjoint());

    StateVector state(total);
    state.apply(c);

    std::uint64_t pattern = qubit_bit(total, a0);
    if (fitted) pattern |= qubit_bit(total, i0);
    const int shift = total - 2 * n;
    Poisson2DResult result;
    result.v.resize(N * N);
    double succ = 0.0;
    const double scale = 1.0 / (prep_scale * eps_sym);
    for (long k = 0; k < N * N; ++k) {
        const cplx amp = state.amplitude((std::uint64_t(k) << shift) | pattern);
        succ += std::norm(amp);
        result.v[k] = amp.real() * scale;
    }
    diag.success_norm = succ;
    diag.junk_norm = 1.0 - succ;
    diag.source_fit_error = src_fit_err;
    if (cfg.with_gate_counts) diag.gate_counts = count_transpiled(c);
    result.diag = std::move(diag);
    return result;
}

} // namespace qcm
