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

#include "qcm/statevector.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qcm {

namespace {
constexpr double kNormTol = 1e-8;
constexpr int kPerGateNormCheckMaxQubits = 16;
} // namespace

int max_qubits() {
    if (const char *env = std::getenv("QCM_MAX_QUBITS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 26;
}

BasisLabel BasisLabel::from_bits(const std::vector<int> &bits) {
    std::uint64_t v = 0;
    for (int b : bits) v = (v << 1) | static_cast<std::uint64_t>(b & 1);
    return BasisLabel{v};
}

std::vector<int> BasisLabel::bits(int num_qubits) const {
    std::vector<int> r(num_qubits);
    for (int q = 0; q < num_qubits; ++q)
        r[q] = static_cast<int>((value >> (num_qubits - 1 - q)) & 1u);
    return r;
}

StateVector::StateVector(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > max_qubits())
        throw std::invalid_argument("qubit count outside simulator capacity");
    amps_.assign(std::size_t(1) << num_qubits, cplx(0.0, 0.0));
    amps_[0] = 1.0;
}

StateVector::StateVector(int num_qubits, std::vector<cplx> amplitudes)
    : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    if (num_qubits < 1 || num_qubits > max_qubits())
        throw std::invalid_argument("qubit count outside simulator capacity");
    if (amps_.size() != (std::size_t(1) << num_qubits))
        throw std::invalid_argument("amplitude vector length is not 2^n");
    check_norm(1e-10);
}

StateVector StateVector::basis_state(int num_qubits, std::uint64_t k) {
    StateVector s(num_qubits);
    if (k >= s.dim()) throw std::invalid_argument("basis label out of range");
    s.amps_[0] = 0.0;
    s.amps_[k] = 1.0;
    return s;
}

double StateVector::norm_squared() const {
    double n = 0.0;
    for (const cplx &a : amps_) n += std::norm(a);
    return n;
}

void StateVector::check_norm(double tol) const {
    const double n = norm_squared();
    if (std::abs(n - 1.0) > tol)
        throw std::runtime_error("statevector norm drifted: |1 - <q|q>| = " +
                                 std::to_string(std::abs(n - 1.0)));
}

namespace {

// Iterates the subspace spanned by qubits not pinned by `fixed_mask`,
// calling fn(base_index) with the pinned bits set to `fixed_value`.
template <typename Fn>
void for_each_subspace_index(int num_qubits, std::uint64_t fixed_mask,
                             std::uint64_t fixed_value, Fn &&fn) {
    std::vector<int> free_bits;
    for (int b = 0; b < num_qubits; ++b)
        if (!((fixed_mask >> b) & 1u)) free_bits.push_back(b);
    const std::uint64_t count = std::uint64_t(1) << free_bits.size();
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t idx = fixed_value;
        std::uint64_t rem = i;
        for (int b : free_bits) {
            idx |= (rem & 1u) << b;
            rem >>= 1;
        }
        fn(idx);
    }
}

} // namespace

void StateVector::apply(const GateInstance &g) {
    g.validate(num_qubits_);
    if (g.kind == GateKind::I && g.controls.empty()) return;

    std::uint64_t ctrl_mask = 0, ctrl_value = 0;
    for (const Control &c : g.controls) {
        const std::uint64_t bit = std::uint64_t(1) << (num_qubits_ - 1 - c.qubit);
        ctrl_mask |= bit;
        if (!c.negative) ctrl_value |= bit;
    }

    if (g.kind == GateKind::SWAP) {
        const std::uint64_t b0 = std::uint64_t(1) << (num_qubits_ - 1 - g.targets[0]);
        const std::uint64_t b1 = std::uint64_t(1) << (num_qubits_ - 1 - g.targets[1]);
        for_each_subspace_index(num_qubits_, ctrl_mask | b0 | b1, ctrl_value,
                                [&](std::uint64_t base) {
                                    std::swap(amps_[base | b0], amps_[base | b1]);
                                });
        return;
    }

    const CMatrix u = gate_matrix(g.kind, g.params);
    const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    const std::uint64_t tbit = std::uint64_t(1) << (num_qubits_ - 1 - g.targets[0]);
    for_each_subspace_index(num_qubits_, ctrl_mask | tbit, ctrl_value,
                            [&](std::uint64_t i0) {
                                const std::uint64_t i1 = i0 | tbit;
                                const cplx a0 = amps_[i0], a1 = amps_[i1];
                                amps_[i0] = u00 * a0 + u01 * a1;
                                amps_[i1] = u10 * a0 + u11 * a1;
                            });
    if (num_qubits_ <= kPerGateNormCheckMaxQubits) check_norm(kNormTol);
}

void StateVector::apply(const Circuit &c) {
    if (c.num_qubits != num_qubits_)
        throw std::invalid_argument("circuit width does not match register");
    for (const GateInstance &g : c.gates) apply(g);
    if (num_qubits_ > kPerGateNormCheckMaxQubits) check_norm(kNormTol);
}

double StateVector::probability(BasisLabel k) const {
    if (k.value >= dim()) throw std::invalid_argument("basis label out of range");
    return std::norm(amps_[k.value]);
}

std::pair<double, StateVector> StateVector::project(const Projector &p) const {
    if (p.qubit < 0 || p.qubit >= num_qubits_)
        throw std::invalid_argument("projector qubit out of range");
    if (p.bit != 0 && p.bit != 1)
        throw std::invalid_argument("projector bit must be 0 or 1");
    const std::uint64_t bit = std::uint64_t(1) << (num_qubits_ - 1 - p.qubit);
    double prob = 0.0;
    for (std::uint64_t i = 0; i < dim(); ++i)
        if (((i & bit) != 0) == (p.bit == 1)) prob += std::norm(amps_[i]);
    if (prob < 1e-14)
        throw std::runtime_error("degenerate projection: subspace probability ~ 0");
    std::vector<cplx> collapsed(dim(), cplx(0.0, 0.0));
    const double scale = 1.0 / std::sqrt(prob);
    for (std::uint64_t i = 0; i < dim(); ++i)
        if (((i & bit) != 0) == (p.bit == 1)) collapsed[i] = amps_[i] * scale;
    return {prob, StateVector(num_qubits_, std::move(collapsed))};
}

std::map<std::uint64_t, std::uint64_t> StateVector::sample(std::uint64_t rng_seed,
                                                           std::uint64_t shots) const {
    std::map<std::uint64_t, std::uint64_t> hist;
    if (shots == 0) return hist;
    std::vector<double> cdf(dim());
    double acc = 0.0;
    for (std::uint64_t i = 0; i < dim(); ++i) {
        acc += std::norm(amps_[i]);
        cdf[i] = acc;
    }
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = unif(rng) * acc;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const std::uint64_t k =
            it == cdf.end() ? dim() - 1 : static_cast<std::uint64_t>(it - cdf.begin());
        ++hist[k];
    }
    return hist;
}

void StateVector::dump(std::ostream &os) const {
    nlohmann::json header;
    header["num_qubits"] = num_qubits_;
    header["norm"] = std::sqrt(norm_squared());
    os << header.dump() << "\n";
    static_assert(sizeof(double) == 8);
    for (const cplx &a : amps_) {
        const double re = a.real(), im = a.imag();
        os.write(reinterpret_cast<const char *>(&re), sizeof(double));
        os.write(reinterpret_cast<const char *>(&im), sizeof(double));
    }
}

StateVector StateVector::load(std::istream &is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("missing dump header");
    nlohmann::json header = nlohmann::json::parse(line);
    const int n = header.at("num_qubits").get<int>();
    std::vector<cplx> amps(std::size_t(1) << n);
    for (cplx &a : amps) {
        double re = 0.0, im = 0.0;
        is.read(reinterpret_cast<char *>(&re), sizeof(double));
        is.read(reinterpret_cast<char *>(&im), sizeof(double));
        if (!is) throw std::runtime_error("truncated statevector dump");
        a = cplx(re, im);
    }
    return StateVector(n, std::move(amps));
}

StateVector new_zero_state(int num_qubits) { return StateVector(num_qubits); }

StateVector kron(const StateVector &a, const StateVector &b) {
    const int n = a.num_qubits() + b.num_qubits();
    if (n > max_qubits())
        throw std::invalid_argument("kron result exceeds simulator capacity");
    std::vector<cplx> amps(std::size_t(1) << n);
    for (std::size_t j = 0; j < a.dim(); ++j)
        for (std::size_t k = 0; k < b.dim(); ++k)
            amps[j * b.dim() + k] = a.amplitudes()[j] * b.amplitudes()[k];
    return StateVector(n, std::move(amps));
}

double probability(const StateVector &s, BasisLabel k) { return s.probability(k); }

} // namespace qcm
