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

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcm/experiments.hpp"

namespace {

// "1,2@0.5,0.5" -> phase moduli and volume fractions
void parse_mu_spec(const std::string &spec, std::vector<double> &phases,
                   std::vector<double> &fractions) {
    phases.clear();
    fractions.clear();
    const auto at = spec.find('@');
    const std::string left = spec.substr(0, at);
    const std::string right = at == std::string::npos ? "" : spec.substr(at + 1);
    auto split = [](const std::string &s) {
        std::vector<double> out;
        std::size_t pos = 0;
        while (pos < s.size()) {
            std::size_t comma = s.find(',', pos);
            if (comma == std::string::npos) comma = s.size();
            out.push_back(std::stod(s.substr(pos, comma - pos)));
            pos = comma + 1;
        }
        return out;
    };
    phases = split(left);
    fractions = right.empty() ? std::vector<double>(phases.size(), 1.0 / phases.size())
                              : split(right);
    if (phases.empty() || phases.size() != fractions.size())
        throw CLI::ValidationError("--mu-spec", "expected v1,v2[,...]@f1,f2[,...]");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Gate-based quantum circuit toolkit for periodic spectral solvers"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value configuration file; flags override");

    // ---- qft-verify
    int qft_max = 6;
    CLI::App *qft = app.add_subcommand("qft-verify",
                                       "Compare the QFT circuit against the DFT matrix");
    qft->add_option("--qubits", qft_max, "Largest register to verify")->check(CLI::Range(1, 10));

    // ---- poisson1d
    qcm::Poisson1DExperiment p1;
    CLI::App *c1 = app.add_subcommand("poisson1d",
                                      "1D periodic Poisson solve on the Gaussian fixture");
    c1->add_option("--cells", p1.cells, "Grid cells (power of two)");
    c1->add_flag("--sweep", p1.sweep, "Run the convergence/gate-count sweep 8..256");
    c1->add_option("--fit-degree", p1.fit_degree, "Symbol fit degree");
    c1->add_option("--out", p1.out_dir, "Output directory")->required();

    // ---- poisson2d
    qcm::Poisson2DExperiment p2;
    CLI::App *c2 = app.add_subcommand("poisson2d",
                                      "2D periodic Poisson solve on a seeded sin-product source");
    c2->add_option("--cells", p2.cells, "Grid cells per axis (power of two)");
    c2->add_option("--modes", p2.modes, "Number of source modes");
    c2->add_option("--seed", p2.seed, "Source seed");
    c2->add_option("--fit-degree", p2.fit_degree, "Symbol fit degree");
    c2->add_option("--out", p2.out_dir, "Output directory")->required();

    // ---- rve
    qcm::RveExperiment rv;
    std::string mu_spec = "1,2@0.5,0.5";
    CLI::App *c3 = app.add_subcommand("rve", "1D periodic homogenisation fixed point");
    c3->add_option("--cells", rv.cells, "Grid cells (power of two)");
    c3->add_option("--iters", rv.iterations, "Fixed-point iterations S");
    c3->add_option("--gbar", rv.gamma_bar, "Applied average strain");
    c3->add_option("--mu-spec", mu_spec, "Phase moduli and fractions, e.g. 1,2@0.5,0.5");
    c3->add_option("--out", rv.out_dir, "Output directory")->required();

    // ---- gatecount
    qcm::GateCountExperiment gc;
    std::vector<long> gc_sizes;
    CLI::App *c4 = app.add_subcommand("gatecount",
                                      "Transpiled gate-count sweep with a polylog fit");
    c4->add_option("--experiment", gc.kind, "poisson1d | poisson2d | rve")->required();
    c4->add_option("--sweep", gc_sizes, "Explicit sweep sizes (default per experiment)");
    c4->add_option("--iters", gc.rve_iterations, "RVE iterations during the sweep");
    c4->add_option("--out", gc.out_dir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (qft->parsed()) {
            qcm::QftVerifyReport rep = qcm::run_qft_verify(qft_max);
            for (const auto &row : rep.rows)
                std::printf("n=%d  max|QFT - F_N| = %.3e  gates: %llu H, %llu CP, %llu SWAP\n",
                            row.n, row.max_deviation,
                            (unsigned long long)row.hadamards,
                            (unsigned long long)row.controlled_phases,
                            (unsigned long long)row.swaps);
            if (qft_max >= 3)
                std::printf("|110> fixture deviation: %.3e\n", rep.fixture_deviation);
            std::printf("%s\n", rep.ok ? "OK" : "FAILED");
            return rep.ok ? 0 : 1;
        }
        if (c1->parsed()) {
            qcm::Poisson1DReport rep = qcm::run_poisson1d(p1);
            for (const std::string &p : qcm::write_poisson1d_files(p1, rep))
                std::printf("wrote %s\n", p.c_str());
            if (p1.sweep)
                std::printf("convergence slope: %.3f (gate fit R^2 = %.4f)\n", rep.slope,
                            rep.gate_fit_r2);
            const bool ok = !p1.sweep || (rep.slope < -0.35 && rep.slope > -0.65);
            std::printf("%s\n", ok ? "OK" : "FAILED");
            return ok ? 0 : 1;
        }
        if (c2->parsed()) {
            qcm::Poisson2DReport rep = qcm::run_poisson2d(p2);
            for (const std::string &p : qcm::write_poisson2d_files(p2, rep))
                std::printf("wrote %s\n", p.c_str());
            std::printf("max abs error vs oracle: %.3e\n", rep.max_abs_error);
            const bool ok = rep.max_abs_error <= 1e-6;
            std::printf("%s\n", ok ? "OK" : "FAILED");
            return ok ? 0 : 1;
        }
        if (c3->parsed()) {
            parse_mu_spec(mu_spec, rv.phases, rv.fractions);
            qcm::RveReport rep = qcm::run_rve(rv);
            for (const std::string &p : qcm::write_rve_files(rv, rep))
                std::printf("wrote %s\n", p.c_str());
            std::printf("mu_eff = %.6f (classical %.6f), worst step deviation %.3e, "
                        "decay rate %.3f\n",
                        rep.quantum.mu_eff, rep.mu_eff_classical, rep.max_step_deviation,
                        rep.quantum.decay_rate);
            const bool ok = rep.max_step_deviation <= 1e-6 && rep.quantum.decay_rate < 0.0;
            std::printf("%s\n", ok ? "OK" : "FAILED");
            return ok ? 0 : 1;
        }
        if (c4->parsed()) {
            if (!gc_sizes.empty()) gc.sizes = gc_sizes;
            qcm::GateCountReport rep = qcm::run_gatecount(gc);
            for (const std::string &p : qcm::write_gatecount_files(gc, rep))
                std::printf("wrote %s\n", p.c_str());
            std::printf("polylog fit R^2 = %.4f, worst 4x growth ratio = %.3f\n", rep.r2,
                        rep.worst_quad_ratio);
            const bool ok = rep.r2 >= 0.99 && rep.worst_quad_ratio < 4.0;
            std::printf("%s\n", ok ? "OK" : "FAILED");
            return ok ? 0 : 1;
        }
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
