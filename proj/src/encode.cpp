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

#include "qcm/encode.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qcm {

double MonomialPolynomial::eval(double k) const {
    double r = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it)
        r = r * k + *it;
    return r;
}

double BivariatePolynomial::eval(double k0, double k1) const {
    double r = 0.0;
    for (std::size_t m0 = 0; m0 < coefficients.size(); ++m0) {
        double row = 0.0;
        for (auto it = coefficients[m0].rbegin(); it != coefficients[m0].rend(); ++it)
            row = row * k1 + *it;
        r += row * std::pow(k0, double(m0));
    }
    return r;
}

namespace {

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// One multinomial monomial of (sum_s 2^{n-1-s} k_s)^m: exponents e_s >= 0
// with sum m. Reports coefficient multinom(m; e) * prod 2^{(n-1-s) e_s} and
// the bit subset {s : e_s > 0}.
struct AxisTerm {
    std::vector<int> subset;
    double weight = 1.0;
};

void enumerate_axis_terms(int n, int m, std::vector<AxisTerm> &out) {
    std::vector<int> e(n, 0);
    std::function<void(int, int)> rec = [&](int s, int rem) {
        if (s == n - 1) {
            e[s] = rem;
            AxisTerm t;
            double denom = 1.0;
            double pw = 1.0;
            for (int j = 0; j < n; ++j) {
                if (e[j] > 0) t.subset.push_back(j);
                denom *= factorial(e[j]);
                pw *= std::pow(2.0, double((n - 1 - j) * e[j]));
            }
            t.weight = factorial(m) / denom * pw;
            out.push_back(std::move(t));
            return;
        }
        for (int v = 0; v <= rem; ++v) {
            e[s] = v;
            rec(s + 1, rem - v);
        }
        e[s] = 0;
    };
    if (n == 0) return;
    rec(0, m);
}

std::vector<RotationTerm> merge_terms(const std::vector<RotationTerm> &terms) {
    std::map<std::uint64_t, double> acc;
    for (const RotationTerm &t : terms) {
        std::uint64_t mask = 0;
        for (int s : t.subset) mask |= std::uint64_t(1) << s;
        acc[mask] += t.angle;
    }
    std::vector<RotationTerm> out;
    out.reserve(acc.size());
    for (const auto &[mask, angle] : acc) {
        RotationTerm t;
        t.angle = angle;
        for (int s = 0; s < 64; ++s)
            if ((mask >> s) & 1u) t.subset.push_back(s);
        out.push_back(std::move(t));
    }
    return out;
}

} // namespace

std::vector<RotationTerm> expand_rotation_terms(const MonomialPolynomial &f, int n,
                                                bool merge) {
    if (n < 1) throw std::invalid_argument("expand_rotation_terms: n >= 1");
    std::vector<RotationTerm> terms;
    for (int m = 0; m <= f.degree(); ++m) {
        std::vector<AxisTerm> axis;
        enumerate_axis_terms(n, m, axis);
        for (const AxisTerm &a : axis) {
            RotationTerm t;
            t.subset = a.subset;
            t.angle = 2.0 * f.coefficients[m] * a.weight;
            terms.push_back(std::move(t));
        }
    }
    return merge ? merge_terms(terms) : terms;
}

std::vector<RotationTerm> expand_rotation_terms(const BivariatePolynomial &f, int n,
                                                bool merge) {
    if (n < 1) throw std::invalid_argument("expand_rotation_terms: n >= 1");
    const int p = f.degree();
    std::vector<std::vector<AxisTerm>> by_order(p + 1);
    for (int m = 0; m <= p; ++m) enumerate_axis_terms(n, m, by_order[m]);

    std::vector<RotationTerm> terms;
    for (int m0 = 0; m0 <= p; ++m0)
        for (int m1 = 0; m1 <= p; ++m1) {
            const double alpha = f.coefficients[m0][m1];
            for (const AxisTerm &a0 : by_order[m0])
                for (const AxisTerm &a1 : by_order[m1]) {
                    RotationTerm t;
                    t.subset = a0.subset;
                    for (int s : a1.subset) t.subset.push_back(s + n);
                    t.angle = 2.0 * alpha * a0.weight * a1.weight;
                    terms.push_back(std::move(t));
                }
        }
    return merge ? merge_terms(terms) : terms;
}

std::vector<RotationTerm> multilinear_terms(const std::vector<double> &half_angles,
                                            int bits) {
    if (half_angles.size() != (std::size_t(1) << bits))
        throw std::invalid_argument("multilinear_terms: need 2^bits values");
    // Moebius transform over the subset lattice: c[S] = sum_{T subseteq S}
    // (-1)^{|S|-|T|} v[T]. Subscripts here treat bit (bits-1-s) of the
    // block-local label as variable s (most significant first).
    std::vector<double> c = half_angles;
    for (int b = 0; b < bits; ++b) {
        const std::size_t step = std::size_t(1) << b;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (i & step) c[i] -= c[i ^ step];
    }
    std::vector<RotationTerm> out;
    for (std::size_t mask = 0; mask < c.size(); ++mask) {
        if (c[mask] == 0.0) continue;
        RotationTerm t;
        t.angle = 2.0 * c[mask];
        for (int s = 0; s < bits; ++s)
            if ((mask >> (bits - 1 - s)) & 1u) t.subset.push_back(s);
        out.push_back(std::move(t));
    }
    return out;
}

void append_rotation_terms(Circuit &c, const std::vector<RotationTerm> &terms,
                           const std::vector<int> &data_qubits, int flag,
                           const std::vector<Control> &extra, double epsilon) {
    for (const RotationTerm &t : terms) {
        const double angle = epsilon * t.angle;
        if (angle == 0.0) continue;
        std::vector<Control> ctl;
        ctl.reserve(t.subset.size() + extra.size());
        for (int s : t.subset) ctl.push_back({data_qubits.at(s), false});
        for (const Control &e : extra) ctl.push_back(e);
        c.append(g_ry(angle, flag, std::move(ctl)));
    }
}

double resolve_epsilon(const EncodingConfig &cfg, double max_abs_value) {
    if (cfg.epsilon > 0.0) {
        if (cfg.epsilon * max_abs_value > 0.5 + 1e-12)
            throw std::invalid_argument("encoding scale out of range: eps*max|f| > 0.5");
        return cfg.epsilon;
    }
    if (max_abs_value <= 0.0) return 0.1;
    return 0.1 / max_abs_value;
}

namespace {

double max_abs_on_integers(const MonomialPolynomial &f, int n) {
    double m = 0.0;
    for (std::uint64_t k = 0; k < (std::uint64_t(1) << n); ++k)
        m = std::max(m, std::abs(f.eval(double(k))));
    return m;
}

} // namespace

Circuit poly_encode_circuit(const MonomialPolynomial &f, int n,
                            const EncodingConfig &cfg) {
    Circuit c(n + 1, "poly_encode");
    const double eps = resolve_epsilon(cfg, max_abs_on_integers(f, n));
    std::vector<int> data(n);
    for (int i = 0; i < n; ++i) data[i] = i;
    append_rotation_terms(c, expand_rotation_terms(f, n), data, n, {}, eps);
    return c;
}

Circuit bivariate_encode_circuit(const BivariatePolynomial &f, int n_per_axis,
                                 const EncodingConfig &cfg) {
    const int n = n_per_axis;
    Circuit c(2 * n + 1, "poly_encode_2d");
    double mx = 0.0;
    for (std::uint64_t k0 = 0; k0 < (std::uint64_t(1) << n); ++k0)
        for (std::uint64_t k1 = 0; k1 < (std::uint64_t(1) << n); ++k1)
            mx = std::max(mx, std::abs(f.eval(double(k0), double(k1))));
    const double eps = resolve_epsilon(cfg, mx);
    std::vector<int> data(2 * n);
    for (int i = 0; i < 2 * n; ++i) data[i] = i;
    append_rotation_terms(c, expand_rotation_terms(f, n), data, 2 * n, {}, eps);
    return c;
}

// --- Chebyshev fitting ------------------------------------------------------

namespace {

using Poly = std::vector<double>; // monomial coefficients, ascending

Poly poly_mul(const Poly &a, const Poly &b) {
    Poly r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

void poly_axpy(Poly &acc, double s, const Poly &p) {
    if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += s * p[i];
}

// Exact Newton interpolation through the integers lo .. hi-1.
MonomialPolynomial newton_interpolate(const std::function<double(double)> &target,
                                      long lo, long hi) {
    const long w = hi - lo;
    if (w < 1) throw std::invalid_argument("interpolation needs a nonempty interval");
    std::vector<double> node(w), dd(w);
    for (long i = 0; i < w; ++i) {
        node[i] = double(lo + i);
        dd[i] = target(node[i]);
        if (!std::isfinite(dd[i]))
            throw std::runtime_error("chebyshev_fit: target not finite at k=" +
                                     std::to_string(lo + i));
    }
    for (long level = 1; level < w; ++level)
        for (long i = w - 1; i >= level; --i)
            dd[i] = (dd[i] - dd[i - 1]) / (node[i] - node[i - level]);
    Poly result{dd[w - 1]};
    for (long i = w - 2; i >= 0; --i) {
        result = poly_mul(result, Poly{-node[i], 1.0});
        result[0] += dd[i];
    }
    return MonomialPolynomial(result);
}

// Degree-p least squares at the interval's integer points, assembled in the
// Chebyshev basis of the scaled variable for conditioning (degrades past
// p = 8). Intervals with at most p+1 integers interpolate exactly instead.
MonomialPolynomial fit_interval(const std::function<double(double)> &target, long lo,
                                long hi, int degree) {
    const long m = hi - lo;
    if (m <= degree + 1) return newton_interpolate(target, lo, hi);

    const double a = double(lo);
    const double b = double(hi - 1);
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const int p = degree;

    // Chebyshev design matrix at the integer points
    std::vector<std::vector<double>> T(m, std::vector<double>(p + 1));
    std::vector<double> y(m);
    for (long i = 0; i < m; ++i) {
        const double k = double(lo + i);
        y[i] = target(k);
        if (!std::isfinite(y[i]))
            throw std::runtime_error("chebyshev_fit: target not finite at k=" +
                                     std::to_string(lo + i));
        const double t = (k - center) / half;
        T[i][0] = 1.0;
        if (p >= 1) T[i][1] = t;
        for (int j = 2; j <= p; ++j) T[i][j] = 2.0 * t * T[i][j - 1] - T[i][j - 2];
    }
    // normal equations
    std::vector<std::vector<double>> G(p + 1, std::vector<double>(p + 2, 0.0));
    for (long i = 0; i < m; ++i)
        for (int r = 0; r <= p; ++r) {
            for (int c = 0; c <= p; ++c) G[r][c] += T[i][r] * T[i][c];
            G[r][p + 1] += T[i][r] * y[i];
        }
    for (int col = 0; col <= p; ++col) {
        int piv = col;
        for (int r = col + 1; r <= p; ++r)
            if (std::abs(G[r][col]) > std::abs(G[piv][col])) piv = r;
        std::swap(G[col], G[piv]);
        for (int r = 0; r <= p; ++r) {
            if (r == col || std::abs(G[col][col]) < 1e-300) continue;
            const double f = G[r][col] / G[col][col];
            for (int c = col; c <= p + 1; ++c) G[r][c] -= f * G[col][c];
        }
    }
    std::vector<double> coef(p + 1, 0.0);
    for (int r = 0; r <= p; ++r)
        coef[r] = std::abs(G[r][r]) < 1e-300 ? 0.0 : G[r][p + 1] / G[r][r];

    // T_m in the scaled variable via the recurrence, then accumulate.
    Poly tm_prev{1.0}, tm{0.0, 1.0};
    Poly in_t{coef[0]};
    if (p >= 1) poly_axpy(in_t, coef[1], tm);
    for (int j = 2; j <= p; ++j) {
        Poly next = poly_mul(Poly{0.0, 2.0}, tm);
        for (std::size_t i = 0; i < tm_prev.size(); ++i) next[i] -= tm_prev[i];
        tm_prev = tm;
        tm = next;
        poly_axpy(in_t, coef[j], tm);
    }
    // substitute t = (k - center)/half
    Poly shift{-center / half, 1.0 / half};
    Poly pw{1.0};
    Poly in_k{0.0};
    for (std::size_t j = 0; j < in_t.size(); ++j) {
        poly_axpy(in_k, in_t[j], pw);
        if (j + 1 < in_t.size()) pw = poly_mul(pw, shift);
    }
    return MonomialPolynomial(in_k);
}

double interval_error(const std::function<double(double)> &target,
                      const MonomialPolynomial &piece, long lo, long hi) {
    double e = 0.0;
    for (long k = lo; k < hi; ++k)
        e = std::max(e, std::abs(piece.eval(double(k)) - target(double(k))));
    return e;
}

} // namespace

MonomialPolynomial chebyshev_fit_interval(const std::function<double(double)> &target,
                                          long lo, long hi, int degree) {
    return fit_interval(target, lo, hi, degree);
}

MonomialPolynomial interpolate_at_integers(const std::function<double(double)> &target,
                                           long lo, long hi) {
    return newton_interpolate(target, lo, hi);
}

double interval_max_error(const std::function<double(double)> &target,
                          const MonomialPolynomial &piece, long lo, long hi) {
    return interval_error(target, piece, lo, hi);
}

MonomialPolynomial compose_shift(const MonomialPolynomial &f, double shift) {
    Poly pw{1.0};
    Poly out{0.0};
    const Poly lin{shift, 1.0};
    for (std::size_t j = 0; j < f.coefficients.size(); ++j) {
        poly_axpy(out, f.coefficients[j], pw);
        if (j + 1 < f.coefficients.size()) pw = poly_mul(pw, lin);
    }
    return MonomialPolynomial(out);
}

std::vector<RotationTerm> expand_rotation_terms_block(const MonomialPolynomial &f,
                                                      int n, long base, int bits) {
    if (bits < 0 || bits > n) throw std::invalid_argument("bad block width");
    if (base % (1L << bits) != 0)
        throw std::invalid_argument("block base must be aligned to its width");
    const MonomialPolynomial local = compose_shift(f, double(base));
    if (bits == 0) {
        RotationTerm t;
        t.angle = 2.0 * local.coefficients[0];
        return {t};
    }
    std::vector<RotationTerm> terms = expand_rotation_terms(local, bits, true);
    for (RotationTerm &t : terms)
        for (int &s : t.subset) s += n - bits;
    return terms;
}

std::vector<RotationTerm> expand_rotation_terms_bivariate_block(
    const BivariatePolynomial &f, int n_per_axis, long base0, int bits0, long base1,
    int bits1) {
    if (bits0 < 0 || bits1 < 0 || bits0 > n_per_axis || bits1 > n_per_axis)
        throw std::invalid_argument("bad block widths");
    if (base0 % (1L << bits0) != 0 || base1 % (1L << bits1) != 0)
        throw std::invalid_argument("box base must be aligned to its width");
    const int p = f.degree();
    // substitute j0 = base0 + l0 (rows), then j1 = base1 + l1 (columns)
    auto binom = [](int m, int t) {
        double r = 1.0;
        for (int i = 0; i < t; ++i) r = r * double(m - i) / double(i + 1);
        return r;
    };
    std::vector<std::vector<double>> a(p + 1, std::vector<double>(p + 1, 0.0));
    for (int m0 = 0; m0 <= p; ++m0)
        for (int m1 = 0; m1 <= p; ++m1) {
            const double c = f.coefficients[m0][m1];
            if (c == 0.0) continue;
            for (int t0 = 0; t0 <= m0; ++t0)
                a[t0][m1] += c * binom(m0, t0) * std::pow(double(base0), double(m0 - t0));
        }
    std::vector<std::vector<double>> b(p + 1, std::vector<double>(p + 1, 0.0));
    for (int m0 = 0; m0 <= p; ++m0)
        for (int m1 = 0; m1 <= p; ++m1) {
            const double c = a[m0][m1];
            if (c == 0.0) continue;
            for (int t1 = 0; t1 <= m1; ++t1)
                b[m0][t1] += c * binom(m1, t1) * std::pow(double(base1), double(m1 - t1));
        }

    // per-axis multinomial terms over the local bits; an axis with zero bits
    // only contributes its constant row/column
    std::vector<std::vector<AxisTerm>> ax0(p + 1), ax1(p + 1);
    for (int m = 0; m <= p; ++m) {
        if (bits0 > 0) enumerate_axis_terms(bits0, m, ax0[m]);
        if (bits1 > 0) enumerate_axis_terms(bits1, m, ax1[m]);
    }
    if (bits0 == 0) ax0[0].push_back({{}, 1.0});
    if (bits1 == 0) ax1[0].push_back({{}, 1.0});

    std::vector<RotationTerm> terms;
    for (int m0 = 0; m0 <= p; ++m0)
        for (int m1 = 0; m1 <= p; ++m1) {
            const double c = b[m0][m1];
            if (c == 0.0) continue;
            for (const AxisTerm &t0 : ax0[m0])
                for (const AxisTerm &t1 : ax1[m1]) {
                    RotationTerm t;
                    for (int s : t0.subset) t.subset.push_back(n_per_axis - bits0 + s);
                    for (int s : t1.subset)
                        t.subset.push_back(n_per_axis + n_per_axis - bits1 + s);
                    t.angle = 2.0 * c * t0.weight * t1.weight;
                    terms.push_back(std::move(t));
                }
        }
    return merge_terms(terms);
}

double PiecewiseChebyshev::max_error() const {
    double e = 0.0;
    for (double m : max_errors) e = std::max(e, m);
    return e;
}

double PiecewiseChebyshev::eval(double k) const {
    if (pieces.empty()) throw std::logic_error("empty piecewise polynomial");
    if (k < double(breakpoints.front()))
        return pieces.front().eval(double(breakpoints.front()));
    if (k >= double(breakpoints.back()))
        return pieces.back().eval(double(breakpoints.back() - 1));
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (k < double(breakpoints[i + 1])) return pieces[i].eval(k);
    return pieces.back().eval(k);
}

std::string PiecewiseChebyshev::to_json() const {
    nlohmann::json j;
    j["breakpoints"] = breakpoints;
    j["degree"] = degree;
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto &p : pieces) coeffs.push_back(p.coefficients);
    j["coeffs"] = coeffs;
    j["max_errors"] = max_errors;
    return j.dump();
}

PiecewiseChebyshev PiecewiseChebyshev::from_json(const std::string &text) {
    nlohmann::json j = nlohmann::json::parse(text);
    PiecewiseChebyshev pc;
    pc.breakpoints = j.at("breakpoints").get<std::vector<long>>();
    pc.degree = j.at("degree").get<int>();
    for (const auto &c : j.at("coeffs"))
        pc.pieces.push_back(MonomialPolynomial(c.get<std::vector<double>>()));
    pc.max_errors = j.at("max_errors").get<std::vector<double>>();
    return pc;
}

PiecewiseChebyshev chebyshev_fit(const std::function<double(double)> &target,
                                 const std::vector<long> &breakpoints, int degree) {
    if (breakpoints.size() < 2)
        throw std::invalid_argument("chebyshev_fit: need at least one interval");
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        if (breakpoints[i] >= breakpoints[i + 1])
            throw std::invalid_argument("chebyshev_fit: breakpoints must increase");
    PiecewiseChebyshev pc;
    pc.breakpoints = breakpoints;
    pc.degree = degree;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        MonomialPolynomial piece =
            fit_interval(target, breakpoints[i], breakpoints[i + 1], degree);
        pc.max_errors.push_back(
            interval_error(target, piece, breakpoints[i], breakpoints[i + 1]));
        pc.pieces.push_back(std::move(piece));
    }
    return pc;
}

PiecewiseChebyshev chebyshev_fit_adaptive(const std::function<double(double)> &target,
                                          long lo, long hi, int degree, double tol,
                                          int max_intervals) {
    std::vector<std::pair<long, long>> work{{lo, hi}}, done;
    while (!work.empty()) {
        auto [a, b] = work.back();
        work.pop_back();
        MonomialPolynomial piece = fit_interval(target, a, b, degree);
        const double err = interval_error(target, piece, a, b);
        if (err > tol && b - a >= 2 &&
            static_cast<int>(done.size() + work.size()) + 2 <= max_intervals) {
            const long mid = a + (b - a) / 2;
            work.push_back({mid, b});
            work.push_back({a, mid});
        } else {
            done.push_back({a, b});
        }
    }
    std::sort(done.begin(), done.end());
    std::vector<long> bps;
    bps.push_back(done.front().first);
    for (const auto &[a, b] : done) bps.push_back(b);
    return chebyshev_fit(target, bps, degree);
}

void lower_piece_degrees(PiecewiseChebyshev &pc,
                         const std::function<double(double)> &target, double tol) {
    for (std::size_t i = 0; i + 1 < pc.breakpoints.size(); ++i) {
        const long lo = pc.breakpoints[i], hi = pc.breakpoints[i + 1];
        const int current = pc.pieces[i].degree();
        for (int d = 0; d < current; ++d) {
            MonomialPolynomial cand = fit_interval(target, lo, hi, d);
            const double err = interval_error(target, cand, lo, hi);
            if (err <= tol) {
                pc.pieces[i] = std::move(cand);
                pc.max_errors[i] = err;
                break;
            }
        }
    }
}

// --- comparator -------------------------------------------------------------

void append_comparator(Circuit &c, long lo, long hi, const std::vector<int> &data_qubits,
                       int flag) {
    const int n = static_cast<int>(data_qubits.size());
    const long top = 1L << n;
    if (lo < 0 || hi > top || lo >= hi)
        throw std::invalid_argument("comparator bounds must satisfy 0 <= lo < hi <= 2^n");
    // Decompose [lo, hi) into aligned binary blocks; each block is a prefix
    // pattern and costs one multi-controlled X on the flag.
    long a = lo;
    while (a < hi) {
        int j = 0;
        while (j < n && (a & ((1L << (j + 1)) - 1)) == 0 && a + (1L << (j + 1)) <= hi)
            ++j;
        if (j == n) {
            c.append(g_x(flag));
        } else {
            std::vector<Control> ctl;
            for (int i = 0; i < n - j; ++i) {
                const bool bit = (a >> (n - 1 - i)) & 1L;
                ctl.push_back({data_qubits[i], !bit});
            }
            c.append(GateInstance(GateKind::X, {flag}, std::move(ctl)));
        }
        a += 1L << j;
    }
}

Circuit comparator_circuit(long lo, long hi, int n) {
    Circuit c(n + 1, "comparator");
    std::vector<int> data(n);
    for (int i = 0; i < n; ++i) data[i] = i;
    append_comparator(c, lo, hi, data, n);
    return c;
}

// --- piecewise encoding -----------------------------------------------------

void append_piecewise_encode(Circuit &c, const PiecewiseChebyshev &pc,
                             const std::vector<int> &data_qubits, int flag,
                             int interval_flag, const std::vector<Control> &extra,
                             double epsilon, bool merge_terms) {
    const int n = static_cast<int>(data_qubits.size());
    const long top = 1L << n;
    if (pc.pieces.empty()) throw std::invalid_argument("empty piecewise polynomial");
    for (std::size_t i = 0; i + 1 < pc.breakpoints.size(); ++i)
        if (pc.breakpoints[i] >= pc.breakpoints[i + 1])
            throw std::invalid_argument("overlapping piecewise intervals");

    struct Interval {
        long lo, hi;
        MonomialPolynomial poly;
    };
    std::vector<Interval> ivals;
    const long first = std::max(0L, pc.breakpoints.front());
    const long last = std::min(top, pc.breakpoints.back());
    if (first > 0) {
        // constant continuation below the covered range
        ivals.push_back({0, first,
                         MonomialPolynomial({pc.pieces.front().eval(
                             double(pc.breakpoints.front()))})});
    }
    for (std::size_t i = 0; i + 1 < pc.breakpoints.size(); ++i) {
        const long lo = std::max(0L, pc.breakpoints[i]);
        const long hi = std::min(top, pc.breakpoints[i + 1]);
        if (lo < hi) ivals.push_back({lo, hi, pc.pieces[i]});
    }
    if (last < top) {
        ivals.push_back({last, top,
                         MonomialPolynomial({pc.pieces.back().eval(
                             double(pc.breakpoints.back() - 1))})});
    }

    std::vector<Control> rot_extra = extra;
    rot_extra.push_back({interval_flag, false});
    for (const Interval &iv : ivals) {
        auto terms = expand_rotation_terms(iv.poly, n, merge_terms);
        bool all_zero = true;
        for (const auto &t : terms)
            if (t.angle != 0.0) all_zero = false;
        if (all_zero) continue;
        append_comparator(c, iv.lo, iv.hi, data_qubits, interval_flag);
        append_rotation_terms(c, terms, data_qubits, flag, rot_extra, epsilon);
        append_comparator(c, iv.lo, iv.hi, data_qubits, interval_flag);
    }
}

Circuit piecewise_encode_circuit(const PiecewiseChebyshev &pc, int n,
                                 const EncodingConfig &cfg) {
    Circuit c(n + 2, "piecewise_encode");
    double mx = 0.0;
    for (long k = 0; k < (1L << n); ++k) mx = std::max(mx, std::abs(pc.eval(double(k))));
    const double eps = resolve_epsilon(cfg, mx);
    std::vector<int> data(n);
    for (int i = 0; i < n; ++i) data[i] = i;
    append_piecewise_encode(c, pc, data, n, n + 1, {}, eps);
    return c;
}

Circuit approx_state_prep(const MonomialPolynomial &f, int n, const EncodingConfig &cfg) {
    Circuit c = poly_encode_circuit(f, n, cfg);
    Circuit prep(c.num_qubits, "approx_state_prep");
    for (int q = 0; q < n; ++q) prep.append(g_h(q));
    prep.append(c);
    return prep;
}

Circuit approx_state_prep(const PiecewiseChebyshev &pc, int n, const EncodingConfig &cfg) {
    Circuit c = piecewise_encode_circuit(pc, n, cfg);
    Circuit prep(c.num_qubits, "approx_state_prep");
    for (int q = 0; q < n; ++q) prep.append(g_h(q));
    prep.append(c);
    return prep;
}

// --- exact state preparation -------------------------------------------------

Circuit exact_state_prep(const std::vector<double> &q) {
    const std::size_t N = q.size();
    if (N < 2 || (N & (N - 1)) != 0)
        throw std::invalid_argument("exact_state_prep: length must be 2^n, n >= 1");
    int n = 0;
    while ((std::size_t(1) << n) < N) ++n;
    double nrm = 0.0;
    for (double v : q) nrm += v * v;
    if (std::abs(nrm - 1.0) > 1e-10)
        throw std::invalid_argument("exact_state_prep: input must be a unit vector");

    // Build U_S^dagger stage by stage: stage s zeroes the partner amplitude
    // of qubit n-1-s in every pair, using R_Y with the pair's remaining bits
    // as polarity-matched controls. U_S is the adjoint.
    std::vector<double> w = q;
    Circuit us_dagger(n, "state_prep_dg");
    for (int s = 0; s < n; ++s) {
        const int target = n - 1 - s;
        const std::size_t half = std::size_t(1) << s;
        const std::size_t stride = half << 1;
        for (std::size_t base = 0; base < N; base += stride) {
            const double a = w[base];
            const double b = w[base + half];
            const double r = std::hypot(a, b);
            const double beta = (r < 1e-15) ? 0.0 : std::atan2(b, a);
            w[base] = r;
            w[base + half] = 0.0;
            if (std::abs(beta) < 1e-15) continue;
            std::vector<Control> ctl;
            for (int qb = 0; qb < n; ++qb) {
                if (qb == target) continue;
                const bool bit = (base >> (n - 1 - qb)) & 1u;
                ctl.push_back({qb, !bit});
            }
            us_dagger.append(g_ry(-2.0 * beta, target, std::move(ctl)));
        }
    }
    Circuit us = us_dagger.adjoint();
    us.label = "state_prep";
    return us;
}

// --- amplitude swap -----------------------------------------------------------

void append_amplitude_swap(Circuit &c, std::uint64_t k1, std::uint64_t k2,
                           const std::vector<int> &data_qubits, int tag) {
    if (k1 == k2) throw std::invalid_argument("amplitude swap needs distinct labels");
    const int n = static_cast<int>(data_qubits.size());
    if (k1 >= (std::uint64_t(1) << n) || k2 >= (std::uint64_t(1) << n))
        throw std::invalid_argument("amplitude swap label out of range");

    auto tag_flip = [&](std::uint64_t k) {
        std::vector<Control> ctl;
        for (int i = 0; i < n; ++i) {
            const bool bit = (k >> (n - 1 - i)) & 1u;
            ctl.push_back({data_qubits[i], !bit});
        }
        c.append(GateInstance(GateKind::X, {tag}, std::move(ctl)));
    };
    tag_flip(k1);
    tag_flip(k2);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t bit = std::uint64_t(1) << (n - 1 - i);
        if ((k1 ^ k2) & bit)
            c.append(GateInstance(GateKind::X, {data_qubits[i]}, {{tag, false}}));
    }
    tag_flip(k2);
    tag_flip(k1);
}

Circuit amplitude_swap_circuit(std::uint64_t k1, std::uint64_t k2, int n,
                               bool use_vchain) {
    if (!use_vchain) {
        Circuit c(n + 1, "amplitude_swap");
        std::vector<int> data(n);
        for (int i = 0; i < n; ++i) data[i] = i;
        append_amplitude_swap(c, k1, k2, data, n);
        return c;
    }
    // Synthesised form: the four tag flips become V-chains over the data
    // prefix, 2n-3 Toffolis each for n >= 3.
    const int anc = std::max(0, n - 2);
    Circuit c(n + 1 + anc, "amplitude_swap_vchain");
    std::vector<int> data(n), ws(anc);
    for (int i = 0; i < n; ++i) data[i] = i;
    for (int i = 0; i < anc; ++i) ws[i] = n + 1 + i;
    const int tag = n;
    auto tag_flip = [&](std::uint64_t k) {
        std::vector<Control> ctl;
        for (int i = 0; i < n; ++i) {
            const bool bit = (k >> (n - 1 - i)) & 1u;
            ctl.push_back({data[i], !bit});
        }
        c.append(mcx_vchain(c.num_qubits, ctl, tag, ws));
    };
    tag_flip(k1);
    tag_flip(k2);
    for (int i = 0; i < n; ++i) {
        const std::uint64_t bit = std::uint64_t(1) << (n - 1 - i);
        if ((k1 ^ k2) & bit) c.append(g_cnot(tag, data[i]));
    }
    tag_flip(k2);
    tag_flip(k1);
    return c;
}

} // namespace qcm
