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

#include <vector>

#include "qcm/poisson.hpp"

namespace qcm {

/// 1D periodic homogenisation problem: nodal shear modulus, constant
/// reference modulus and the prescribed average strain.
struct RveProblem {
    GridSpec1D grid;
    std::vector<double> mu;
    double mu0 = 0.0;
    double gamma_bar = 0.0;

    void validate() const;
    double contrast() const;
};

/// Reference-medium problem with the standard contraction choice
/// mu0 = (min mu + max mu) / 2.
RveProblem make_rve_problem(GridSpec1D grid, std::vector<double> mu, double gamma_bar);

/// Qubit layout of the fixed-point circuit: field, one control pair per
/// iteration, one applied-strain qubit per iteration, and a tag ancilla that
/// doubles as the piecewise-encoding interval flag (restored to |0>).
struct RveLayout {
    int n = 0;
    int S = 0;
    int field_start = 0;
    int controls_start = 0; // 2S wires
    int as_start = 0;       // S wires
    int tag = 0;
    int total = 0;

    int control(int i) const { return controls_start + i; }
    int as(int i) const { return as_start + i; }
};

RveLayout make_rve_layout(int n, int S);

struct RveResult {
    std::vector<std::vector<double>> gamma_per_iter; // iterates s = 1..S
    std::vector<double> sigma;                       // final stress mu_k gamma_k
    double mu_eff = 0.0;
    double success_norm = 1.0;
    double junk_norm = 0.0;
    long junk_branches = 0;
    GateCounts gate_counts;
    int steps = 0;
    bool converged = false;
    double decay_rate = 0.0; // log-linear slope of the error against s
    double decay_r2 = 0.0;   // goodness of the decay line
};

struct RveSolveOptions {
    int iterations = 4;
    double tolerance = 0.0; // classical solver only; 0 = fixed iteration count
    bool uniform_predictor = true; // 1/sqrt(N) predictor; false = gamma_bar
    bool with_gate_counts = true;
};

/// Classical Moulinec-Suquet fixed point, 1D specialisation: tau = (mu -
/// mu0) gamma, gamma_hat = -tau_hat / mu0 away from the zero frequency, and
/// the zero-frequency slot pinned so the mean strain equals gamma_bar.
/// Divergence (three consecutive growth steps) is reported as
/// non-convergence.
RveResult classical_fixed_point(const RveProblem &problem, const RveSolveOptions &opts);

/// R_Y(2 arcsin(sqrt(N) gamma_bar)) on the applied-strain qubit.
Circuit encode_applied_strain(double gamma_bar, long N, int as_qubit, int total_qubits);

/// Piecewise encoding of the polarisation factor mu(x_k) - mu0 onto the
/// iteration's first control qubit (arcsin-corrected, breakpoints aligned to
/// material interfaces). scale_out reports the encoding prefactor (1 when
/// the modulus range allows direct encoding).
Circuit polarisation_unitary(const RveProblem &problem, const RveLayout &layout, int s,
                             double *scale_out = nullptr);

/// One fixed-point update |q>^(s) -> |q>^(s+1): polarisation, conditioned
/// QFT, Fourier factor -1/mu0, the mean-strain amplitude swap and the
/// conditioned inverse QFT.
Circuit iteration_circuit(const RveProblem &problem, const RveLayout &layout, int s);

/// Full circuit: applied-strain register, uniform predictor and S
/// conditioned iteration fragments.
std::pair<Circuit, RveLayout> fixed_point_circuit(const RveProblem &problem, int S);

/// Reads the success branch (controls all |1>, AS and tag |0>) and rescales
/// by the accumulated prefactor ledger.
std::vector<double> extract_strain(const StateVector &state, const RveLayout &layout,
                                   double prefactor);

/// mu_eff = mean(mu_k gamma_k) / gamma_bar.
double effective_modulus(const RveProblem &problem, const std::vector<double> &gamma);

/// Simulates the fixed-point circuit, extracting every iterate at its
/// fragment boundary.
RveResult rve_quantum_solve(const RveProblem &problem, const RveSolveOptions &opts);

} // namespace qcm
