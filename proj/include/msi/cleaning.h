// Copyright 2026 The msi-workbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MSI_CLEANING_H
#define MSI_CLEANING_H

#include <string>
#include <vector>

#include "msi/circuit.h"
#include "msi/codes.h"

namespace msi {

enum class CleanStrategy { First, MinWeight, MaxWeight };

CleanStrategy parse_clean_strategy(const std::string &name);

struct CleaningStep {
    PauliTerm consumed;  // s
    size_t qubit = 0;    // j
    char pauli = 'X';    // P_j
    int sign = 1;        // m
};

/// Outcome of stabilizer cleaning. `reduced_x/z` are the logicals times the
/// consumed stabilizers (on peeled qubits they carry only I or P_j);
/// `carrier_x/z` are the same operators restricted to the carrier qubits,
/// which is what the peeled qubits' preparation makes them act as.
struct CleaningResult {
    std::vector<CleaningStep> steps;
    std::vector<size_t> carrier_qubits;
    std::vector<PauliTerm> peeled;
    std::vector<PauliTerm> reduced_x;
    std::vector<PauliTerm> reduced_z;
    std::vector<PauliTerm> carrier_x;
    std::vector<PauliTerm> carrier_z;
};

/// Repeatedly picks a generator s of weight > 1 (by strategy), the lowest
/// unpeeled qubit j of its support and the first of X, Y, Z anticommuting
/// with s there, replaces s by +P_j and multiplies every generator and
/// logical that anticommutes with P_j by s.
CleaningResult clean(const CssCode &code, CleanStrategy strategy = CleanStrategy::MaxWeight);

/// (a) reduced logicals differ from the originals by consumed stabilizers,
/// (b) n - k independent weight-1 peeled generators, (c) each P_j is random
/// when measured in step order on a codestate. Returns violations.
std::vector<std::string> verify_preservation(const CssCode &code, const CleaningResult &result, uint64_t seed = 0);

/// H/S/CX circuit on the carrier qubits with C X_{Q_i} C^dagger = carrier_x[i]
/// and C Z_{Q_i} C^dagger = carrier_z[i], signs included, where Q_i is
/// carrier_qubits[i]. Verified by conjugation replay; throws on mismatch.
Circuit synth_encoding_clifford(const CleaningResult &result, size_t n);

/// Noiseless preparation: carriers in |+i>, the encoding Clifford, peeled
/// qubits in +1 eigenstates of their P_j, then every stabilizer row measured.
Circuit general_injection_plan(const CssCode &code, const CleaningResult &result);

std::string cleaning_to_json(const CleaningResult &result);

}  // namespace msi

#endif  // MSI_CLEANING_H
