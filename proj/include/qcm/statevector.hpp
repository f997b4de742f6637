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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "qcm/circuit.hpp"
#include "qcm/matrix.hpp"

namespace qcm {

/// Basis label of an n-qubit register. Qubit 0 is the most significant bit:
/// k = k_0 2^{n-1} + k_1 2^{n-2} + ... + k_{n-1} 2^0.
struct BasisLabel {
    std::uint64_t value = 0;

    static BasisLabel from_bits(const std::vector<int> &bits);
    std::vector<int> bits(int num_qubits) const;
};

/// I x ... x |bit><bit| x ... x I acting on one qubit.
struct Projector {
    int qubit = 0;
    int bit = 0;
};

/// Maximum register size accepted by the simulator. Defaults to 26 qubits
/// (1 GiB of amplitudes); override with the QCM_MAX_QUBITS environment
/// variable. At least 24 qubits are always supported.
int max_qubits();

/// Dense statevector of an n-qubit register. Amplitudes are stored as
/// double-precision complex numbers; gates are applied as strided in-place
/// updates over the masked subspace, never as full-matrix products.
class StateVector {
  public:
    /// |0...0> on n qubits.
    explicit StateVector(int num_qubits);

    /// Takes ownership of an amplitude vector; must have length 2^n and unit
    /// norm within 1e-10.
    StateVector(int num_qubits, std::vector<cplx> amplitudes);

    static StateVector basis_state(int num_qubits, std::uint64_t k);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<cplx> &amplitudes() const { return amps_; }
    cplx amplitude(std::uint64_t k) const { return amps_[k]; }

    double norm_squared() const;

    /// Applies one gate in place. Norm preservation is checked per gate for
    /// registers up to 16 qubits and at circuit granularity above that;
    /// drift beyond 1e-8 raises an internal-consistency error.
    void apply(const GateInstance &g);

    /// Applies every gate of a circuit in order.
    void apply(const Circuit &c);

    /// Born probability |q_k|^2.
    double probability(BasisLabel k) const;

    /// Projective measurement: returns <q|P|q> and the renormalised
    /// collapsed state. Probability below 1e-14 raises a degenerate
    /// projection error.
    std::pair<double, StateVector> project(const Projector &p) const;

    /// `shots` independent Born-rule draws, deterministic for a fixed seed
    /// (std::mt19937_64 with inverse-CDF sampling, documented so histograms
    /// reproduce bit-exactly across platforms).
    std::map<std::uint64_t, std::uint64_t> sample(std::uint64_t rng_seed,
                                                  std::uint64_t shots) const;

    /// Little-endian (real, imag) double pairs in index order, preceded by a
    /// one-line JSON header {num_qubits, norm}.
    void dump(std::ostream &os) const;
    static StateVector load(std::istream &is);

  private:
    void check_norm(double tol) const;

    int num_qubits_ = 0;
    std::vector<cplx> amps_;
};

/// |0...0> on n qubits; n must be within the capacity limit.
StateVector new_zero_state(int num_qubits);

/// Kronecker composition: (a kron b)[j*2^nb + k] = a_j * b_k.
StateVector kron(const StateVector &a, const StateVector &b);

double probability(const StateVector &s, BasisLabel k);

} // namespace qcm
