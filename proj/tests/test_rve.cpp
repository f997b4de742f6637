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

#include <cmath>

#include "qcm/experiments.hpp"
#include "qcm/rve.hpp"

using namespace qcm;

namespace {

RveProblem two_phase_fixture(long N = 8) {
    return make_phase_problem(N, {1.0, 2.0}, {0.5, 0.5}, 0.01);
}

double mean_of(const std::vector<double> &v) {
    double m = 0.0;
    for (double x : v) m += x;
    return m / double(v.size());
}

} // namespace

TEST_CASE("problem construction and validation") {
    RveProblem p = two_phase_fixture();
    CHECK(p.mu0 == doctest::Approx(1.5));
    CHECK(p.contrast() == doctest::Approx(2.0));
    for (long k = 0; k < 4; ++k) CHECK(p.mu[k] == 1.0);
    for (long k = 4; k < 8; ++k) CHECK(p.mu[k] == 2.0);

    RveProblem bad = p;
    bad.gamma_bar = 0.5; // sqrt(8) * 0.5 > 1
    CHECK_THROWS(bad.validate());
    bad = p;
    bad.mu[0] = -1.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("classical fixed point") {
    // homogeneous medium: first iterate is already the solution
    RveProblem homog = make_rve_problem(GridSpec1D{8, 1.0}, std::vector<double>(8, 1.5), 0.01);
    RveSolveOptions opts;
    opts.iterations = 1;
    RveResult r = classical_fixed_point(homog, opts);
    for (double g : r.gamma_per_iter.back()) CHECK(g == doctest::Approx(0.01).epsilon(1e-12));

    // two-phase composite: converged strain follows gamma_bar mu_eff / mu
    RveProblem p = two_phase_fixture();
    RveSolveOptions conv;
    conv.tolerance = 1e-13;
    RveResult rc = classical_fixed_point(p, conv);
    CHECK(rc.converged);
    const double mu_eff = 4.0 / 3.0; // harmonic mean of {1, 2} at 50/50
    for (long k = 0; k < 8; ++k) {
        const double want = 0.01 * mu_eff / p.mu[k];
        CHECK(rc.gamma_per_iter.back()[k] == doctest::Approx(want).epsilon(1e-8));
    }
    CHECK(rc.mu_eff == doctest::Approx(mu_eff).epsilon(1e-6));

    // imposed mean strain at every iterate
    RveSolveOptions four;
    four.iterations = 4;
    RveResult r4 = classical_fixed_point(p, four);
    for (const auto &it : r4.gamma_per_iter)
        CHECK(mean_of(it) == doctest::Approx(0.01).epsilon(1e-12));

    // uniform stress at convergence (series composite)
    for (long k = 0; k < 8; ++k)
        CHECK(rc.sigma[k] == doctest::Approx(mu_eff * 0.01).epsilon(1e-7));

    // geometric decay with the midpoint reference modulus
    CHECK(r4.decay_rate < 0.0);
}

TEST_CASE("effective modulus bounds") {
    RveProblem p = two_phase_fixture();
    RveSolveOptions conv;
    conv.tolerance = 1e-13;
    RveResult rc = classical_fixed_point(p, conv);
    double harmonic = 0.0, arithmetic = 0.0;
    for (double m : p.mu) {
        harmonic += 1.0 / m;
        arithmetic += m;
    }
    harmonic = double(p.mu.size()) / harmonic;
    arithmetic /= double(p.mu.size());
    CHECK(rc.mu_eff >= harmonic - 1e-9);
    CHECK(rc.mu_eff <= arithmetic + 1e-9);

    RveProblem h = make_rve_problem(GridSpec1D{8, 1.0}, std::vector<double>(8, 2.5), 0.01);
    RveSolveOptions one;
    one.iterations = 1;
    CHECK(classical_fixed_point(h, one).mu_eff == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("applied strain encoding") {
    // gamma_bar = 0 is the identity
    Circuit z = encode_applied_strain(0.0, 8, 0, 1);
    CHECK(z.size() == 0);

    // N = 8, gamma_bar = 0.1: AS-1 amplitude is sqrt(8) * 0.1
    Circuit c = encode_applied_strain(0.1, 8, 0, 1);
    StateVector s(1);
    s.apply(c);
    CHECK(s.amplitude(1).real() == doctest::Approx(std::sqrt(8.0) * 0.1).epsilon(1e-12));

    CHECK_THROWS(encode_applied_strain(0.5, 8, 0, 1)); // sqrt(N) gbar >= 1
}

TEST_CASE("polarisation unitary") {
    // homogeneous medium: no polarisation branch at all
    RveProblem homog = make_rve_problem(GridSpec1D{8, 1.0}, std::vector<double>(8, 1.5), 0.01);
    RveLayout lay = make_rve_layout(3, 1);
    double scale = 0.0;
    Circuit c0 = polarisation_unitary(homog, lay, 0, &scale);
    CHECK(scale == doctest::Approx(1.0));
    CHECK(c0.size() == 0);

    // two-phase fixture: the flagged branch carries (mu_k - mu0) gamma_k
    RveProblem p = two_phase_fixture();
    Circuit c = polarisation_unitary(p, lay, 0, &scale);
    CHECK(scale == doctest::Approx(1.0)); // |mu - mu0| = 0.5 needs no rescale

    // prepare a strain superposition on the field, everything else |0>
    std::vector<double> gamma{0.3, -0.2, 0.4, 0.1, -0.5, 0.25, 0.35, -0.15};
    double nrm = 0.0;
    for (double g : gamma) nrm += g * g;
    for (double &g : gamma) g /= std::sqrt(nrm);
    StateVector s(lay.total);
    {
        Circuit prep(lay.total);
        prep.append(exact_state_prep(gamma));
        s.apply(prep);
    }
    s.apply(c);
    const int shift = lay.total - lay.n;
    for (long k = 0; k < 8; ++k) {
        const std::uint64_t flag_bit = std::uint64_t(1)
                                       << (lay.total - 1 - lay.control(0));
        const cplx amp = s.amplitude((std::uint64_t(k) << shift) | flag_bit);
        const double want = gamma[k] * (p.mu[k] - p.mu0);
        CHECK(std::abs(amp - cplx(want, 0.0)) < 1e-10);
    }

    // encoded function values match (mu_k - mu0) at the nodes
    for (long k = 0; k < 8; ++k) {
        StateVector b(lay.total);
        Circuit prep(lay.total);
        if (k > 0) {
            for (int i = 0; i < lay.n; ++i)
                if ((k >> (lay.n - 1 - i)) & 1L) prep.append(g_x(i));
        }
        b.apply(prep);
        b.apply(c);
        const std::uint64_t flag_bit = std::uint64_t(1)
                                       << (lay.total - 1 - lay.control(0));
        const cplx amp = b.amplitude((std::uint64_t(k) << shift) | flag_bit);
        CHECK(std::abs(amp.real() - (p.mu[k] - p.mu0)) < 1e-10);
    }
}

TEST_CASE("single iteration against the oracle") {
    RveProblem p = two_phase_fixture();

    // homogeneous: one iteration lands on the constant field
    RveProblem homog = make_rve_problem(GridSpec1D{8, 1.0}, std::vector<double>(8, 1.5), 0.01);
    RveSolveOptions one;
    one.iterations = 1;
    one.with_gate_counts = false;
    RveResult rh = rve_quantum_solve(homog, one);
    for (double g : rh.gamma_per_iter.back())
        CHECK(g == doctest::Approx(0.01).epsilon(1e-9));

    // two-phase: first iterate matches the classical one
    RveResult rq = rve_quantum_solve(p, one);
    RveResult rc = classical_fixed_point(p, one);
    for (long k = 0; k < 8; ++k)
        CHECK(std::abs(rq.gamma_per_iter[0][k] - rc.gamma_per_iter[0][k]) < 1e-8);
}

TEST_CASE("fixed point circuit matches the oracle trajectory") {
    RveProblem p = two_phase_fixture();
    RveSolveOptions opts;
    opts.iterations = 4;
    opts.with_gate_counts = false;
    RveResult rq = rve_quantum_solve(p, opts);
    RveResult rc = classical_fixed_point(p, opts);

    REQUIRE(rq.gamma_per_iter.size() == 4);
    for (int s = 0; s < 4; ++s)
        for (long k = 0; k < 8; ++k)
            CHECK(std::abs(rq.gamma_per_iter[s][k] - rc.gamma_per_iter[s][k]) < 1e-6);

    // mean strain is imposed at every extracted iterate
    for (const auto &it : rq.gamma_per_iter)
        CHECK(mean_of(it) == doctest::Approx(0.01).epsilon(1e-8));

    // junk accounting: bounded branch count, norms sum to one
    CHECK(rq.junk_branches <= (3 * 4 * 4 + 4 - 1) * 8);
    CHECK(rq.success_norm + rq.junk_norm == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rq.success_norm > 0.0);

    // per-step error decays geometrically
    CHECK(rq.decay_rate < -0.5);
}

TEST_CASE("success probability decreases with iteration count") {
    RveProblem p = two_phase_fixture();
    double prev = 1.0;
    for (int S = 1; S <= 5; ++S) {
        RveSolveOptions opts;
        opts.iterations = S;
        opts.with_gate_counts = false;
        RveResult r = rve_quantum_solve(p, opts);
        CHECK(r.success_norm > 0.0);
        CHECK(r.success_norm < prev + 1e-12);
        prev = r.success_norm;
    }
}

TEST_CASE("quantum rve on a larger grid") {
    RveProblem p = two_phase_fixture(16);
    RveSolveOptions opts;
    opts.iterations = 2;
    opts.with_gate_counts = false;
    RveResult rq = rve_quantum_solve(p, opts);
    RveResult rc = classical_fixed_point(p, opts);
    for (int s = 0; s < 2; ++s)
        for (long k = 0; k < 16; ++k)
            CHECK(std::abs(rq.gamma_per_iter[s][k] - rc.gamma_per_iter[s][k]) < 1e-6);
}

TEST_CASE("experiment runner report") {
    RveExperiment cfg;
    cfg.cells = 8;
    cfg.iterations = 3;
    RveReport rep = run_rve(cfg);
    CHECK(rep.max_step_deviation < 1e-6);
    CHECK(rep.mu_eff_classical == doctest::Approx(4.0 / 3.0).epsilon(1e-4));
    CHECK(rep.quantum.gate_counts.total() > 0);
}
