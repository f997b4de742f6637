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

#include <functional>
#include <optional>
#include <vector>

#include "qcm/encode.hpp"
#include "qcm/statevector.hpp"
#include "qcm/transpile.hpp"

namespace qcm {

/// Uniform periodic grid of N = 2^n cells on [0, L); node k sits at kL/N.
struct GridSpec1D {
    long cells = 8;
    double length = 1.0;

    int qubits() const;
    double node(long k) const { return double(k) * length / double(cells); }
    void validate() const;
};

/// N x N tensor grid; multi-index (k0, k1) maps to row-major k0*N + k1.
struct GridSpec2D {
    long cells_per_axis = 8;
    double length = 1.0;

    int qubits_per_axis() const;
    void validate() const;
};

/// Cyclic frequency relabelling: r(k) = k for k < N/2, k - N otherwise.
long relabel(long k, long N);

/// Inverse-Laplace Fourier symbol (L / (2 pi r(j)))^2 with the zero-frequency
/// value overridden to 0 (zero-mean gauge). The callable accepts real j so
/// Chebyshev collocation points between integers are well defined.
struct FrequencySymbol {
    long N = 0;
    double length = 1.0;
    double zero_override = 0.0;
    std::function<double(double)> value; // of j in [0, N)

    double at(long j) const { return value(double(j)); }
};

FrequencySymbol inverse_laplace_symbol_1d(long N, double L);

/// Nodal source samples. The optional closure gives the smooth x-space
/// source; it enables the polylog fitted state preparation.
struct SourceField1D {
    std::vector<double> values;
    std::function<double(double)> fn; // optional

    void validate() const; // zero mean within 1e-8 * ||f||, nonzero
};

struct SourceField2D {
    long cells_per_axis = 0;
    std::vector<double> values; // row-major (k0 major)
    std::function<double(double, double)> fn; // optional

    /// Optional sparse unitary-DFT spectrum (label j0*N + j1, real
    /// coefficient), consistent with `values`. Band-limited sources carry a
    /// handful of entries and admit an exact polylog preparation: a dense
    /// prep on the low qubits, amplitude swaps onto the mode labels, then
    /// the inverse transform.
    std::vector<std::pair<std::uint64_t, double>> spectrum;

    void validate() const;
};

enum class SourcePrep { automatic, exact, fitted };
enum class SymbolMode { fitted, exact_injected };

/// Fit/encoding schedule of the quantum pipeline. Defaults reproduce the
/// documented behaviour: frequency blocks dyadic in |r|, blocks narrow
/// enough for exact integer interpolation are encoded exactly, wider blocks
/// get a Chebyshev fit of the configured degree. For the 1D solver the
/// sine readout is kept linearised and the scale eps shrinks as N^{-1/4},
/// which is what produces the observed order-1/2 convergence; the 2D solver
/// uses the arcsin-warped fit so only the fit error remains.
struct PoissonFitConfig {
    int degree = 3;
    bool arcsin_warp = false;
    double eps_rel = 0.0;        // 0 = policy default (see above)
    double symbol_tol_rel = 0.0; // degree-taper threshold, 0 = policy default
    double symbol_bandwidth = 0.0; // 2D: frequency radius that must be encoded
                                   // accurately; boxes beyond it taper hard.
                                   // 0 keeps full accuracy everywhere.
    SourcePrep source_prep = SourcePrep::automatic;
    SymbolMode symbol_mode = SymbolMode::fitted;
    double source_fit_tol = 0.0; // 0 = policy default
    int source_fit_degree = 4;
    bool with_gate_counts = true;
};

struct PoissonDiagnostics {
    GateCounts gate_counts;
    double junk_norm = 0.0;
    double success_norm = 0.0;
    double fit_max_error = 0.0;    // symbol fit, absolute at integer points
    double source_fit_error = 0.0; // 0 for exact preparation
    double epsilon_symbol = 0.0;
    double epsilon_source = 0.0;
    long total_qubits = 0;
};

struct Poisson1DResult {
    std::vector<double> v;
    PoissonDiagnostics diag;
};

struct Poisson2DResult {
    std::vector<double> v; // row-major
    PoissonDiagnostics diag;
};

/// Frequency-axis breakpoints dyadic in |r|, separating 0, 1, the Nyquist
/// index and mirrored negative blocks. Exposed for tests.
std::vector<long> symbol_breakpoints_1d(long N);

/// The symbol approximant the 1D pipeline encodes (after optional arcsin
/// warp), built on the dyadic schedule. Exposed for tests.
PiecewiseChebyshev fit_symbol_1d(const FrequencySymbol &sym, int degree,
                                 double epsilon, bool arcsin_warp,
                                 double lower_tol = 0.0);

/// U_I -> F_N -> U_P(symbol) -> F_N^dagger on a statevector; the flag-branch
/// amplitudes are rescaled by the recorded prefactors into nodal values.
Poisson1DResult poisson1d_quantum_solve(const SourceField1D &f, const GridSpec1D &grid,
                                        const PoissonFitConfig &cfg = {});

Poisson2DResult poisson2d_quantum_solve(const SourceField2D &f, const GridSpec2D &grid,
                                        const PoissonFitConfig &cfg = {});

/// Unitary-DFT spectrum of a real 2D field, keeping entries above
/// threshold_rel * ||f||. Throws when a kept entry is not real (sparse
/// preparation handles real spectra only).
std::vector<std::pair<std::uint64_t, double>> sparse_spectrum_2d(
    const std::vector<double> &values, long N, double threshold_rel = 1e-9);

/// Classical spectral oracle: forward DFT, exact symbol, inverse DFT.
std::vector<double> classical_spectral_solve_1d(const std::vector<double> &f,
                                                const GridSpec1D &grid);
std::vector<double> classical_spectral_solve_2d(const std::vector<double> &f,
                                                const GridSpec2D &grid);

/// Gaussian-bump fixture: f(x) = exp(-(x-a0)^2/a1^2) + a2 with a0 = 0.3,
/// a1 = 0.1, a2 = -0.1772, and its closed-form periodic solution with
/// integration constants a3 = 0.053, a4 = -0.0266.
struct Poisson1DFixture {
    std::function<double(double)> source;
    std::function<double(double)> solution;
};
Poisson1DFixture analytic_poisson1d_fixture();

/// Reference for error curves: the periodic solution of -v'' = f - shift
/// for the fixture source, with the integration constant re-derived in
/// closed form (the published 0.053 is rounded, which would floor every
/// error curve near 5e-3). `shift` is the sample mean subtracted from the
/// source so the discrete problem is solvable.
std::function<double(double)> poisson1d_reference_solution(double mean_shift);

/// Band-limited evaluation (1/sqrt(N)) sum_j vhat_j exp(i xi_j x) of unitary
/// DFT coefficients; the imaginary residual must stay below 1e-9 for real
/// nodal data.
double interpolate_bandlimited(const std::vector<cplx> &vhat, double x, double L);

/// Euclidean distance of the normalised vectors.
double l2_error(const std::vector<double> &a, const std::vector<double> &b);

/// Least-squares slope of log(err) against log(N).
double convergence_fit(const std::vector<double> &Ns, const std::vector<double> &errs);

/// Degree-d polynomial least squares y ~ poly(x); returns coefficients
/// (ascending) and R^2.
std::pair<std::vector<double>, double> polyfit(const std::vector<double> &x,
                                               const std::vector<double> &y, int degree);

} // namespace qcm
