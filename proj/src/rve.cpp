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

#include "qcm/rve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcm/qft.hpp"

namespace qcm {

namespace {
const double kPi = std::acos(-1.0);
constexpr double kRangeHeadroom = 0.99;
} // namespace

void RveProblem::validate() const {
    grid.validate();
    if (static_cast<long>(mu.size()) != grid.cells)
        throw std::invalid_argument("modulus field does not match grid");
    for (double m : mu)
        if (!(m > 0.0)) throw std::invalid_argument("modulus must be positive");
    if (!(mu0 > 0.0)) throw std::invalid_argument("reference modulus must be positive");
    if (!(std::abs(std::sqrt(double(grid.cells)) * gamma_bar) < 1.0))
        throw std::invalid_argument("|sqrt(N) gamma_bar| must be < 1 for strain encoding");
}

double RveProblem::contrast() const {
    const auto [lo, hi] = std::minmax_element(mu.begin(), mu.end());
    return *hi / *lo;
}

RveProblem make_rve_problem(GridSpec1D grid, std::vector<double> mu, double gamma_bar) {
    RveProblem p;
    p.grid = grid;
    const auto [lo, hi] = std::minmax_element(mu.begin(), mu.end());
    p.mu0 = 0.5 * (*lo + *hi);
    p.mu = std::move(mu);
    p.gamma_bar = gamma_bar;
    p.validate();
    return p;
}

RveLayout make_rve_layout(int n, int S) {
    RveLayout l;
    l.n = n;
    l.S = S;
    l.field_start = 0;
    l.controls_start = n;
    l.as_start = n + 2 * S;
    l.tag = n + 3 * S;
    l.total = n + 3 * S + 1;
    return l;
}

// --- classical oracle ---------------------------------------------------------

namespace {

std::vector<cplx> dft(const std::vector<cplx> &v, bool inverse) {
    const std::size_t N = v.size();
    std::vector<cplx> out(N, cplx(0.0, 0.0));
    const double sgn = inverse ? -1.0 : 1.0;
    for (std::size_t j = 0; j < N; ++j) {
        cplx acc(0.0, 0.0);
        for (std::size_t k = 0; k < N; ++k) {
            const double arg = sgn * 2.0 * kPi * double((j * k) % N) / double(N);
            acc += v[k] * cplx(std::cos(arg), std::sin(arg));
        }
        out[j] = acc / std::sqrt(double(N));
    }
    return out;
}

std::vector<double> fixed_point_step(const RveProblem &p, const std::vector<double> &gamma) {
    const long N = p.grid.cells;
    std::vector<cplx> tau(N);
    for (long k = 0; k < N; ++k) tau[k] = (p.mu[k] - p.mu0) * gamma[k];
    std::vector<cplx> tau_hat = dft(tau, false);
    std::vector<cplx> gamma_hat(N);
    for (long j = 0; j < N; ++j) gamma_hat[j] = -tau_hat[j] / p.mu0;
    gamma_hat[0] = std::sqrt(double(N)) * p.gamma_bar; // pins the mean strain
    std::vector<cplx> g = dft(gamma_hat, true);
    std::vector<double> out(N);
    for (long k = 0; k < N; ++k) out[k] = g[k].real();
    return out;
}

std::vector<double> predictor_field(const RveProblem &p, bool uniform) {
    const long N = p.grid.cells;
    return std::vector<double>(N, uniform ? 1.0 / std::sqrt(double(N)) : p.gamma_bar);
}

double diff_norm(const std::vector<double> &a, const std::vector<double> &b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(d);
}

std::vector<double> converged_reference(const RveProblem &p, bool uniform_predictor) {
    std::vector<double> gamma = predictor_field(p, uniform_predictor);
    for (int s = 0; s < 400; ++s) {
        std::vector<double> next = fixed_point_step(p, gamma);
        const double delta = diff_norm(next, gamma);
        gamma = std::move(next);
        double nrm = 0.0;
        for (double v : gamma) nrm += v * v;
        if (delta < 1e-13 * std::max(1.0, std::sqrt(nrm))) break;
    }
    return gamma;
}

// Log-linear decay of the iterate error over the prefix above the noise
// floor. Trajectories that hit machine precision within a step report the
// floor ratio, so "at least this fast".
std::pair<double, double> fit_decay(const std::vector<std::vector<double>> &iters,
                                    const std::vector<double> &reference) {
    std::vector<double> xs, ys;
    for (std::size_t s = 0; s < iters.size(); ++s) {
        const double e = diff_norm(iters[s], reference);
        if (e <= 1e-13) {
            if (!xs.empty()) {
                xs.push_back(double(s + 1));
                ys.push_back(std::log(1e-16));
            }
            break;
        }
        xs.push_back(double(s + 1));
        ys.push_back(std::log(e));
    }
    if (xs.size() < 2) return {-30.0, 1.0};
    auto [coef, r2] = polyfit(xs, ys, 1);
    return {coef[1], r2};
}

} // namespace

RveResult classical_fixed_point(const RveProblem &problem, const RveSolveOptions &opts) {
    problem.validate();
    RveResult res;
    std::vector<double> gamma = predictor_field(problem, opts.uniform_predictor);
    double prev_delta = -1.0;
    int growth_streak = 0;
    const int max_steps = opts.tolerance > 0.0 ? 10000 : opts.iterations;
    res.converged = opts.tolerance <= 0.0;
    for (int s = 0; s < max_steps; ++s) {
        std::vector<double> next = fixed_point_step(problem, gamma);
        const double delta = diff_norm(next, gamma);
        gamma = std::move(next);
        res.gamma_per_iter.push_back(gamma);
        ++res.steps;
        if (prev_delta >= 0.0 && delta > prev_delta) {
            if (++growth_streak >= 3) {
                res.converged = false; // reference medium too aggressive
                break;
            }
        } else {
            growth_streak = 0;
        }
        prev_delta = delta;
        if (opts.tolerance > 0.0) {
            double nrm = 0.0;
            for (double v : gamma) nrm += v * v;
            if (delta < opts.tolerance * std::max(1.0, std::sqrt(nrm))) {
                res.converged = true;
                break;
            }
        }
    }
    res.sigma.resize(problem.grid.cells);
    for (long k = 0; k < problem.grid.cells; ++k)
        res.sigma[k] = problem.mu[k] * gamma[k];
    res.mu_eff = effective_modulus(problem, gamma);
    auto [rate, r2] = fit_decay(res.gamma_per_iter,
                                converged_reference(problem, opts.uniform_predictor));
    res.decay_rate = rate;
    res.decay_r2 = r2;
    return res;
}

double effective_modulus(const RveProblem &problem, const std::vector<double> &gamma) {
    double acc = 0.0;
    for (long k = 0; k < problem.grid.cells; ++k) acc += problem.mu[k] * gamma[k];
    return acc / double(problem.grid.cells) / problem.gamma_bar;
}

// --- quantum circuit ------------------------------------------------------------

Circuit encode_applied_strain(double gamma_bar, long N, int as_qubit, int total_qubits) {
    const double a = std::sqrt(double(N)) * gamma_bar;
    if (!(std::abs(a) < 1.0))
        throw std::invalid_argument("|sqrt(N) gamma_bar| must be < 1");
    Circuit c(total_qubits, "applied_strain");
    if (a != 0.0) c.append(g_ry(2.0 * std::asin(a), as_qubit));
    return c;
}

namespace {

// Per-iteration encoding prefactors; 1 whenever the physical ranges permit
// encoding the raw values (the paper's regime).
struct Prefactors {
    double eps_tau = 1.0;
    double eps_mu = 1.0;
    double per_iter() const { return eps_tau * eps_mu; }
};

Prefactors make_prefactors(const RveProblem &p) {
    Prefactors f;
    double gmax = 0.0;
    for (double m : p.mu) gmax = std::max(gmax, std::abs(m - p.mu0));
    if (gmax > kRangeHeadroom) f.eps_tau = kRangeHeadroom / gmax;
    if (1.0 / p.mu0 > kRangeHeadroom) f.eps_mu = kRangeHeadroom * p.mu0;
    return f;
}

// Working-branch scale after fragment s (0-based) is C0 * eps^{s+1}; the
// applied-strain copies are pre-scaled to match the slot they are swapped
// into, which is what keeps the mean-strain imposition consistent.
struct Ledger {
    double c0 = 1.0;
    double eps = 1.0;
    double after(int s) const { return c0 * std::pow(eps, double(s + 1)); }
};

Ledger make_ledger(const RveProblem &p, int S) {
    Ledger l;
    l.eps = make_prefactors(p).per_iter();
    const double N = double(p.grid.cells);
    double acc = 0.0;
    for (int s = 0; s < S; ++s)
        acc += std::pow(l.eps, 2.0 * (s + 1)) * N * p.gamma_bar * p.gamma_bar;
    l.c0 = 1.0 / std::sqrt(1.0 + acc);
    return l;
}

std::vector<Control> fragment_conditions(const RveLayout &l, int s) {
    std::vector<Control> cond;
    if (s == 0) {
        for (int t = 0; t < l.S; ++t) cond.push_back({l.as(t), true});
    } else {
        cond.push_back({l.control(2 * s - 2), false});
        cond.push_back({l.control(2 * s - 1), false});
    }
    return cond;
}

// The arcsin-corrected piecewise fit of mu(x_k) - mu0. Material interfaces
// become breakpoints through adaptive bisection, so piecewise-constant
// moduli are encoded exactly.
PiecewiseChebyshev fit_polarisation(const RveProblem &p, double eps_tau) {
    const long N = p.grid.cells;
    auto target = [&](double k) {
        long idx = static_cast<long>(std::floor(k));
        idx = std::clamp(idx, 0L, N - 1);
        const double g = p.mu[idx] - p.mu0;
        return std::asin(std::clamp(eps_tau * g, -1.0, 1.0)) / eps_tau;
    };
    return chebyshev_fit_adaptive(target, 0, N, 3, 1e-12, int(N) * 2);
}

std::uint64_t wire_bit(const RveLayout &l, int q) {
    return std::uint64_t(1) << (l.total - 1 - q);
}

// basis label (over all wires except the tag) with the given field value,
// number of leading control ones and AS one-hot position (-1 = none)
std::uint64_t swap_label(const RveLayout &l, std::uint64_t field, int control_ones,
                         int as_one) {
    std::uint64_t v = 0;
    const int width = l.total - 1; // tag excluded, tag is the top-index wire
    auto bit = [&](int q) { return std::uint64_t(1) << (width - 1 - q); };
    v |= field << (width - l.n);
    for (int i = 0; i < control_ones; ++i) v |= bit(l.control(i));
    if (as_one >= 0) v |= bit(l.as(as_one));
    return v;
}

} // namespace

Circuit polarisation_unitary(const RveProblem &problem, const RveLayout &layout, int s,
                             double *scale_out) {
    problem.validate();
    const Prefactors pf = make_prefactors(problem);
    if (scale_out) *scale_out = pf.eps_tau;
    Circuit c(layout.total, "polarisation");
    const PiecewiseChebyshev fit = fit_polarisation(problem, pf.eps_tau);
    std::vector<int> data(layout.n);
    for (int i = 0; i < layout.n; ++i) data[i] = layout.field_start + i;
    std::vector<Control> extra = fragment_conditions(layout, s);
    bool has_bs = false;
    for (const Control &ctl : extra) has_bs |= (ctl.qubit == layout.as(s));
    if (!has_bs) extra.push_back({layout.as(s), true});
    append_piecewise_encode(c, fit, data, layout.control(2 * s), layout.tag, extra,
                            pf.eps_tau);
    return c;
}

Circuit iteration_circuit(const RveProblem &problem, const RveLayout &layout, int s) {
    const Prefactors pf = make_prefactors(problem);
    Circuit c(layout.total, "rve_iteration");

    // (a) polarisation onto the first control of the pair
    c.append(polarisation_unitary(problem, layout, s));

    // conditioned F_N on the field; the AS copies must not be transformed
    std::vector<Control> qft_cond = fragment_conditions(layout, s);
    bool has_bs = false;
    for (const Control &ctl : qft_cond) has_bs |= (ctl.qubit == layout.as(s));
    if (!has_bs) qft_cond.push_back({layout.as(s), true});
    Circuit qft(layout.total, "qft");
    qft.append(qft_circuit({layout.n, true, layout.field_start}));
    c.append(qft.with_extra_controls(qft_cond));

    // (d) Fourier factor -1/mu0 onto the second control of the pair
    std::vector<Control> mu_cond = fragment_conditions(layout, s);
    mu_cond.push_back({layout.control(2 * s), false});
    const double angle = 2.0 * std::asin(-pf.eps_mu / problem.mu0);
    c.append(g_ry(angle, layout.control(2 * s + 1), mu_cond));

    // mean-strain imposition: swap the zero-frequency slot of the working
    // branch with this iteration's applied-strain amplitude
    std::vector<int> swap_data;
    for (int q = 0; q < layout.total; ++q)
        if (q != layout.tag) swap_data.push_back(q);
    const std::uint64_t k_as = swap_label(layout, 0, 0, s);
    const std::uint64_t k_work = swap_label(layout, 0, 2 * s + 2, -1);
    append_amplitude_swap(c, k_as, k_work, swap_data, layout.tag);

    c.append(qft.adjoint().with_extra_controls(qft_cond));
    return c;
}

std::pair<Circuit, RveLayout> fixed_point_circuit(const RveProblem &problem, int S) {
    problem.validate();
    if (S < 1) throw std::invalid_argument("need at least one iteration");
    const int n = problem.grid.qubits();
    const RveLayout layout = make_rve_layout(n, S);
    const Ledger ledger = make_ledger(problem, S);
    Circuit c(layout.total, "rve_fixed_point");

    // W-type applied-strain register: copy s carries the pre-scaled
    // amplitude for the swap in fragment s
    const double root_n_gbar = std::sqrt(double(problem.grid.cells)) * problem.gamma_bar;
    double cos_prod = 1.0;
    for (int s = 0; s < S; ++s) {
        const double amp = ledger.after(s) * root_n_gbar;
        if (amp == 0.0) continue;
        const double phi = std::asin(std::clamp(amp / cos_prod, -1.0, 1.0));
        std::vector<Control> prev;
        for (int t = 0; t < s; ++t) prev.push_back({layout.as(t), true});
        c.append(g_ry(2.0 * phi, layout.as(s), std::move(prev)));
        cos_prod *= std::cos(phi);
    }

    // uniform predictor on the field, protected from the AS copies
    std::vector<Control> all_b_zero;
    for (int t = 0; t < S; ++t) all_b_zero.push_back({layout.as(t), true});
    for (int i = 0; i < n; ++i)
        c.append(g_h(layout.field_start + i, all_b_zero));

    for (int s = 0; s < S; ++s) c.append(iteration_circuit(problem, layout, s));
    return {std::move(c), layout};
}

namespace {

std::vector<double> extract_strain_at(const StateVector &state, const RveLayout &layout,
                                      int pairs_done, double prefactor) {
    if (state.num_qubits() != layout.total)
        throw std::invalid_argument("state does not match layout");
    std::uint64_t pattern = 0;
    for (int i = 0; i < 2 * pairs_done; ++i)
        pattern |= wire_bit(layout, layout.control(i));
    const long N = 1L << layout.n;
    std::vector<double> gamma(N);
    double succ = 0.0;
    for (long k = 0; k < N; ++k) {
        const cplx amp =
            state.amplitude((std::uint64_t(k) << (layout.total - layout.n)) | pattern);
        succ += std::norm(amp);
        gamma[k] = amp.real() / prefactor;
    }
    if (succ < 1e-12)
        throw std::runtime_error("success branch norm below threshold");
    return gamma;
}

} // namespace

std::vector<double> extract_strain(const StateVector &state, const RveLayout &layout,
                                   double prefactor) {
    return extract_strain_at(state, layout, layout.S, prefactor);
}

RveResult rve_quantum_solve(const RveProblem &problem, const RveSolveOptions &opts) {
    problem.validate();
    const int S = opts.iterations;
    auto [circuit, layout] = fixed_point_circuit(problem, S);
    const Ledger ledger = make_ledger(problem, S);

    // apply the initialisation, then one fragment at a time so that every
    // iterate can be read off at its fragment boundary
    StateVector state(layout.total);
    Circuit init(layout.total);
    {
        std::size_t init_len = circuit.size();
        for (int s = 0; s < S; ++s)
            init_len -= iteration_circuit(problem, layout, s).size();
        init.gates.assign(circuit.gates.begin(), circuit.gates.begin() + init_len);
    }
    state.apply(init);

    RveResult res;
    for (int s = 0; s < S; ++s) {
        state.apply(iteration_circuit(problem, layout, s));
        res.gamma_per_iter.push_back(
            extract_strain_at(state, layout, s + 1, ledger.after(s)));
    }
    res.steps = S;
    res.converged = true;

    const std::vector<double> &gamma = res.gamma_per_iter.back();
    res.sigma.resize(problem.grid.cells);
    for (long k = 0; k < problem.grid.cells; ++k)
        res.sigma[k] = problem.mu[k] * gamma[k];
    res.mu_eff = effective_modulus(problem, gamma);

    // success and junk accounting on the final state
    std::uint64_t pattern = 0;
    for (int i = 0; i < 2 * S; ++i) pattern |= wire_bit(layout, layout.control(i));
    const std::uint64_t field_mask =
        ((std::uint64_t(1) << layout.n) - 1) << (layout.total - layout.n);
    double succ = 0.0;
    long junk = 0;
    for (std::uint64_t idx = 0; idx < state.dim(); ++idx) {
        const double p = std::norm(state.amplitude(idx));
        if ((idx & ~field_mask) == pattern) {
            succ += p;
        } else if (p > 1e-24) {
            ++junk;
        }
    }
    res.success_norm = succ;
    res.junk_norm = 1.0 - succ;
    res.junk_branches = junk;
    auto [rate, r2] = fit_decay(res.gamma_per_iter, converged_reference(problem, true));
    res.decay_rate = rate;
    res.decay_r2 = r2;
    if (opts.with_gate_counts) res.gate_counts = count_transpiled(circuit);
    return res;
}

} // namespace qcm
