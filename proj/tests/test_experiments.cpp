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

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qcm/experiments.hpp"

using namespace qcm;

namespace {

std::string slurp(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
}

} // namespace

TEST_CASE("qft verification report") {
    QftVerifyReport rep = run_qft_verify(6);
    CHECK(rep.ok);
    REQUIRE(rep.rows.size() == 6);
    for (const QftVerifyRow &row : rep.rows) {
        CHECK(row.max_deviation <= 1e-10);
        CHECK(row.hadamards == std::uint64_t(row.n));
        CHECK(row.controlled_phases == std::uint64_t(row.n * (row.n - 1) / 2));
        CHECK(row.swaps == std::uint64_t(row.n / 2));
    }
    CHECK(rep.fixture_deviation <= 1e-12);

    QftVerifyReport one = run_qft_verify(1);
    CHECK(one.ok);
    CHECK(one.rows.size() == 1);
}

TEST_CASE("poisson 1d experiment sweep") {
    Poisson1DExperiment cfg;
    cfg.sweep = true;
    cfg.cells = 32;
    cfg.sweep_cells = {8, 16, 32, 64};
    Poisson1DReport rep = run_poisson1d(cfg);
    REQUIRE(rep.Ns.size() == 4);
    CHECK(rep.slope < 0.0);
    CHECK(rep.gate_fit_r2 > 0.99);
    for (double e : rep.l2_errors) CHECK(e < 0.05);
    CHECK(rep.solution.v.size() == 32);
    CHECK(rep.oracle.size() == 32);
    CHECK(rep.analytic.size() == 32);
}

TEST_CASE("poisson 2d experiment") {
    Poisson2DExperiment cfg;
    cfg.cells = 16;
    cfg.modes = 2;
    cfg.seed = 11;
    Poisson2DReport rep = run_poisson2d(cfg);
    CHECK(rep.max_abs_error < 1e-6);
    CHECK(rep.solution.v.size() == 256);
}

TEST_CASE("sin product source") {
    SourceField2D a = make_sin_product_source(16, 1.0, 3, 42);
    SourceField2D b = make_sin_product_source(16, 1.0, 3, 42);
    CHECK(a.values == b.values); // deterministic for a fixed seed
    double mean = 0.0;
    for (double v : a.values) mean += v;
    CHECK(std::abs(mean) < 1e-12 * a.values.size());
    SourceField2D c = make_sin_product_source(16, 1.0, 3, 43);
    CHECK(a.values != c.values);
}

TEST_CASE("gate count sweeps") {
    GateCountExperiment cfg;
    cfg.kind = "poisson1d";
    cfg.sizes = {8, 16, 32};
    GateCountReport rep = run_gatecount(cfg);
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].size == 8);
    CHECK(rep.rows[2].u3 + rep.rows[2].cnot > rep.rows[0].u3 + rep.rows[0].cnot);
    CHECK(rep.worst_quad_ratio > 0.0);
    CHECK(rep.worst_quad_ratio < 4.0);

    GateCountExperiment bad;
    bad.kind = "unknown";
    CHECK_THROWS(run_gatecount(bad));
}

TEST_CASE("deterministic file emission") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qcm_test_out";
    fs::remove_all(dir);

    RveExperiment cfg;
    cfg.cells = 8;
    cfg.iterations = 2;
    cfg.out_dir = (dir / "a").string();
    RveReport rep = run_rve(cfg);
    auto paths_a = write_rve_files(cfg, rep);
    cfg.out_dir = (dir / "b").string();
    auto paths_b = write_rve_files(cfg, rep);
    REQUIRE(paths_a.size() == paths_b.size());
    for (std::size_t i = 0; i < paths_a.size(); ++i)
        CHECK(slurp(paths_a[i]) == slurp(paths_b[i]));

    // header sanity of the strains table
    const std::string csv = slurp(paths_a[0]);
    CHECK(csv.rfind("k,x,mu,gamma_s1,gamma_s2,gamma_oracle,sigma", 0) == 0);
    const std::string json = slurp(paths_a[1]);
    CHECK(json.find("qcm-rve-diagnostics/1") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("double formatting round trips") {
    for (double v : {0.0, 1.0, -0.3333333333333333, 1e-17, 123456.789, 4.0 / 3.0}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}
