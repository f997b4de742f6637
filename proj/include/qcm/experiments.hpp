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

#include <map>
#include <string>
#include <vector>

#include "qcm/poisson.hpp"
#include "qcm/rve.hpp"

namespace qcm {

/// Deterministic text formatting for data files: shortest round-trip
/// representation of a double.
std::string format_double(double v);

/// Writes a file atomically (temp file + rename).
void write_file_atomic(const std::string &path, const std::string &content);

/// Simple CSV builder with a fixed header row.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns);
    void add_row(const std::vector<std::string> &cells);
    std::string str() const;

  private:
    std::vector<std::string> columns_;
    std::string body_;
};

struct QftVerifyRow {
    int n = 0;
    double max_deviation = 0.0;
    std::uint64_t hadamards = 0;
    std::uint64_t controlled_phases = 0;
    std::uint64_t swaps = 0;
};

struct QftVerifyReport {
    std::vector<QftVerifyRow> rows;
    double fixture_deviation = 0.0; // n = 3, |110> against the closed form
    bool ok = false;
};

QftVerifyReport run_qft_verify(int n_max);

struct Poisson1DExperiment {
    long cells = 64;
    int fit_degree = 3;
    bool sweep = false;
    std::vector<long> sweep_cells = {8, 16, 32, 64, 128, 256};
    std::string out_dir;
};

struct Poisson1DReport {
    std::vector<long> Ns;
    std::vector<double> l2_errors;  // against the analytic fixture
    std::vector<GateCounts> counts;
    double slope = 0.0;             // fitted convergence order
    double gate_fit_r2 = 0.0;
    Poisson1DResult solution;       // at `cells`
    std::vector<double> analytic;   // fixture at the nodes, mean-free
    std::vector<double> oracle;
};

Poisson1DReport run_poisson1d(const Poisson1DExperiment &cfg);

struct Poisson2DExperiment {
    long cells = 64;
    int modes = 3;
    std::uint64_t seed = 7;
    int fit_degree = 3;
    std::string out_dir;
    bool with_counts = false; // full-size counts are expensive; sweeps cover them
};

struct Poisson2DReport {
    Poisson2DResult solution;
    std::vector<double> oracle;
    double max_abs_error = 0.0;
};

/// Seeded sin-product source of the configured mode count; integer
/// frequencies are drawn from D_Z(-20, 20), real parameters from D_R(-1, 1),
/// and the sampled field is shifted to zero mean.
SourceField2D make_sin_product_source(long N, double L, int modes, std::uint64_t seed);

Poisson2DReport run_poisson2d(const Poisson2DExperiment &cfg);

struct RveExperiment {
    long cells = 8;
    int iterations = 4;
    double gamma_bar = 0.01;
    std::vector<double> phases = {1.0, 2.0}; // piecewise-constant modulus values
    std::vector<double> fractions = {0.5, 0.5};
    std::string out_dir;
};

RveProblem make_phase_problem(long N, const std::vector<double> &phases,
                              const std::vector<double> &fractions, double gamma_bar);

struct RveReport {
    RveResult quantum;
    RveResult oracle;
    double max_step_deviation = 0.0; // quantum vs classical, worst iterate
    double mu_eff_classical = 0.0;
};

RveReport run_rve(const RveExperiment &cfg);

struct GateCountExperiment {
    std::string kind = "poisson1d"; // poisson1d | poisson2d | rve
    std::vector<long> sizes;        // empty = per-kind defaults
    int rve_iterations = 2;
    std::string out_dir;
};

struct GateCountRow {
    long size = 0; // grid cells (N in 1D/RVE, N^2 in 2D)
    std::uint64_t u3 = 0;
    std::uint64_t cnot = 0;
    std::uint64_t depth = 0;
};

struct GateCountReport {
    std::vector<GateCountRow> rows;
    std::vector<double> fit_coeffs; // degree <= 3 polynomial in log2(size)
    double r2 = 0.0;
    double worst_quad_ratio = 0.0;  // max count(4N)/count(N) over the sweep
};

GateCountReport run_gatecount(const GateCountExperiment &cfg);

/// File emission used by the CLI commands; returns the written paths.
std::vector<std::string> write_poisson1d_files(const Poisson1DExperiment &cfg,
                                               const Poisson1DReport &rep);
std::vector<std::string> write_poisson2d_files(const Poisson2DExperiment &cfg,
                                               const Poisson2DReport &rep);
std::vector<std::string> write_rve_files(const RveExperiment &cfg, const RveReport &rep);
std::vector<std::string> write_gatecount_files(const GateCountExperiment &cfg,
                                               const GateCountReport &rep);

} // namespace qcm
