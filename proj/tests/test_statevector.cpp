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
#include <random>
#include <sstream>

#include "qcm/statevector.hpp"

using namespace qcm;

namespace {

StateVector bell_state() {
    StateVector s(2);
    s.apply(g_h(0));
    s.apply(g_cnot(0, 1));
    return s;
}

StateVector random_state(int n, std::mt19937_64 &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<cplx> amps(std::size_t(1) << n);
    double nrm = 0.0;
    for (cplx &a : amps) {
        a = cplx(gauss(rng), gauss(rng));
        nrm += std::norm(a);
    }
    for (cplx &a : amps) a /= std::sqrt(nrm);
    return StateVector(n, std::move(amps));
}

GateInstance random_1q_gate(int target, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    return g_u3(angle(rng), angle(rng), angle(rng), target);
}

} // namespace

TEST_CASE("zero state construction") {
    StateVector s2 = new_zero_state(2);
    CHECK(s2.dim() == 4);
    CHECK(s2.amplitude(0) == cplx(1.0, 0.0));
    for (int k = 1; k < 4; ++k) CHECK(s2.amplitude(k) == cplx(0.0, 0.0));

    StateVector s1 = new_zero_state(1);
    CHECK(s1.dim() == 2);
    CHECK(s1.amplitude(0) == cplx(1.0, 0.0));

    StateVector s3 = new_zero_state(3);
    CHECK(s3.dim() == 8);
    CHECK(s3.amplitude(0) == cplx(1.0, 0.0));

    CHECK_THROWS(new_zero_state(0));
    CHECK_THROWS(new_zero_state(max_qubits() + 1));
}

TEST_CASE("kron composition") {
    // |1> (x) |0> = |2>
    StateVector one = StateVector::basis_state(1, 1);
    StateVector zero = StateVector::basis_state(1, 0);
    StateVector k10 = kron(one, zero);
    CHECK(k10.amplitude(2) == cplx(1.0, 0.0));
    CHECK(k10.amplitude(0) == cplx(0.0, 0.0));

    StateVector k00 = kron(zero, zero);
    CHECK(k00.amplitude(0) == cplx(1.0, 0.0));

    StateVector r(1, {cplx(0.6, 0.0), cplx(0.8, 0.0)});
    StateVector s(1, {cplx(0.0, 1.0), cplx(0.0, 0.0)});
    StateVector rs = kron(r, s);
    CHECK(rs.amplitude(0) == cplx(0.0, 0.6));
    CHECK(rs.amplitude(1) == cplx(0.0, 0.0));
    CHECK(rs.amplitude(2) == cplx(0.0, 0.8));
    CHECK(rs.amplitude(3) == cplx(0.0, 0.0));
}

TEST_CASE("gate application basics") {
    // X on qubit 1 of |00> gives |01>
    StateVector s(2);
    s.apply(g_x(1));
    CHECK(std::abs(s.amplitude(1) - cplx(1.0, 0.0)) < 1e-15);

    // H then CNOT produces the Bell state
    StateVector b = bell_state();
    CHECK(std::abs(b.amplitude(0) - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
    CHECK(std::abs(b.amplitude(3) - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
    CHECK(std::abs(b.amplitude(1)) < 1e-15);

    // identity leaves the state unchanged
    StateVector before = bell_state();
    StateVector after = bell_state();
    after.apply(GateInstance(GateKind::I, {0}));
    for (std::size_t k = 0; k < before.dim(); ++k)
        CHECK(before.amplitude(k) == after.amplitude(k));

    CHECK_THROWS(s.apply(g_x(5)));
    CHECK_THROWS(s.apply(GateInstance(GateKind::X, {0}, {{0, false}})));
}

TEST_CASE("born probabilities") {
    StateVector b = bell_state();
    CHECK(b.probability({0}) == doctest::Approx(0.5).epsilon(1e-12));
    StateVector z(2);
    CHECK(z.probability({0}) == doctest::Approx(1.0));
    CHECK(z.probability({3}) == doctest::Approx(0.0));

    double total = 0.0;
    for (int k = 0; k < 4; ++k) total += b.probability({std::uint64_t(k)});
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("projective measurement") {
    StateVector b = bell_state();
    auto [p, collapsed] = b.project({1, 0}); // right qubit in |0>
    CHECK(p == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(collapsed.amplitude(0) - cplx(1.0, 0.0)) < 1e-12);

    StateVector z(2);
    auto [p0, c0] = z.project({0, 0});
    CHECK(p0 == doctest::Approx(1.0));
    CHECK(std::abs(c0.amplitude(0) - cplx(1.0, 0.0)) < 1e-15);

    CHECK_THROWS(z.project({0, 1})); // degenerate projection

    // complementary projectors act as a resolution of identity
    StateVector s = bell_state();
    auto [pa, ca] = s.project({0, 0});
    auto [pb, cb] = s.project({0, 1});
    CHECK(pa + pb == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sampling statistics") {
    StateVector s01 = StateVector::basis_state(2, 1);
    auto hist = s01.sample(1234, 100);
    CHECK(hist.size() == 1);
    CHECK(hist[1] == 100);

    StateVector b = bell_state();
    auto h2 = b.sample(42, 100000);
    const double f0 = double(h2[0]) / 1e5;
    CHECK(f0 > 0.49);
    CHECK(f0 < 0.51);

    StateVector u(3);
    for (int q = 0; q < 3; ++q) u.apply(g_h(q));
    auto h3 = u.sample(7, 80000);
    for (int k = 0; k < 8; ++k) {
        const double f = double(h3[k]) / 8e4;
        CHECK(f > 0.115);
        CHECK(f < 0.135);
    }

    CHECK(b.sample(1, 0).empty());
    // deterministic for a fixed seed
    auto ha = b.sample(99, 1000);
    auto hb = b.sample(99, 1000);
    CHECK(ha == hb);
}

TEST_CASE("norm preservation under random gates") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        StateVector s = random_state(3, rng);
        s.apply(random_1q_gate(int(rng() % 3), rng));
        CHECK(std::abs(s.norm_squared() - 1.0) < 1e-12);
    }
}

TEST_CASE("kronecker-gate commutation" * doctest::description("apply A to left register")) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        StateVector r = random_state(1, rng);
        StateVector s = random_state(2, rng);
        GateInstance g = random_1q_gate(0, rng);

        StateVector joint = kron(r, s);
        joint.apply(g);

        StateVector r2 = r;
        r2.apply(g);
        StateVector expected = kron(r2, s);
        for (std::size_t k = 0; k < joint.dim(); ++k)
            CHECK(std::abs(joint.amplitude(k) - expected.amplitude(k)) < 1e-13);
    }
}

TEST_CASE("bell state admits no product factorisation") {
    StateVector b = bell_state();
    double best = 1e9;
    const int grid = 24;
    const double pi = std::acos(-1.0);
    for (int ia = 0; ia <= grid; ++ia)
        for (int ja = 0; ja <= grid; ++ja)
            for (int ib = 0; ib <= grid; ++ib)
                for (int jb = 0; jb <= grid; ++jb) {
                    const double ta = pi * ia / grid, pa = 2 * pi * ja / grid;
                    const double tb = pi * ib / grid, pb = 2 * pi * jb / grid;
                    const cplx r0 = std::cos(ta / 2);
                    const cplx r1 = std::sin(ta / 2) * std::exp(cplx(0, pa));
                    const cplx s0 = std::cos(tb / 2);
                    const cplx s1 = std::sin(tb / 2) * std::exp(cplx(0, pb));
                    double resid = 0.0;
                    const cplx prod[4] = {r0 * s0, r0 * s1, r1 * s0, r1 * s1};
                    for (int k = 0; k < 4; ++k)
                        resid += std::norm(prod[k] - b.amplitude(k));
                    best = std::min(best, std::sqrt(resid));
                }
    CHECK(best > 0.2);
}

TEST_CASE("basis label bit conventions") {
    BasisLabel k = BasisLabel::from_bits({1, 1, 0});
    CHECK(k.value == 6); // qubit 0 is the most significant bit
    auto bits = k.bits(3);
    CHECK(bits == std::vector<int>{1, 1, 0});
}

TEST_CASE("statevector dump round trip") {
    std::mt19937_64 rng(11);
    StateVector s = random_state(4, rng);
    std::stringstream ss;
    s.dump(ss);
    StateVector back = StateVector::load(ss);
    REQUIRE(back.num_qubits() == 4);
    for (std::size_t k = 0; k < s.dim(); ++k)
        CHECK(std::abs(s.amplitude(k) - back.amplitude(k)) == 0.0);
}
