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
#include <map>
#include <string>

#include "qcm/circuit.hpp"

namespace qcm {

/// Gate accounting of a transpiled circuit. u3/cnot are defined only on
/// transpiled output; raw_by_kind tallies the source circuit.
struct GateCounts {
    std::uint64_t u3 = 0;
    std::uint64_t cnot = 0;
    std::map<std::string, std::uint64_t> raw_by_kind;
    std::uint64_t depth = 0;

    std::uint64_t total() const { return u3 + cnot; }
};

/// Rewrites a circuit over the universal set {CNOT, U3}. Multi-controlled
/// gates are synthesised with V-chains; the output circuit may be wider than
/// the input because chain ancillas are appended past the original register
/// (they enter and leave |0>). The composite unitary equals the input's up
/// to a single global phase.
std::pair<Circuit, GateCounts> transpile(const Circuit &c);

/// Same rewrite, counting only. Does not materialise the output, so it
/// stays cheap for multi-million-gate pipelines.
GateCounts count_transpiled(const Circuit &c);

} // namespace qcm
