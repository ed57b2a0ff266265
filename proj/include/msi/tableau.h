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

#ifndef MSI_TABLEAU_H
#define MSI_TABLEAU_H

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "msi/circuit.h"
#include "msi/gf2.h"

namespace msi {

// Heisenberg-picture updates P -> G P G^dagger on a single Pauli.
void conj_h(PauliTerm &p, size_t q);
void conj_s(PauliTerm &p, size_t q);
void conj_cx(PauliTerm &p, size_t c, size_t t);
/// Applies every H/S/CX of `circuit` in order; other ops are rejected.
PauliTerm conjugate_by(const Circuit &circuit, PauliTerm p);

struct MeasureResult {
    bool outcome = false;  // true means eigenvalue -1
    bool deterministic = false;
};

/// Stabilizer state on n qubits with destabilizers, starting in |0...0>.
class Tableau {
   public:
    Tableau(size_t n, uint64_t seed);

    size_t num_qubits() const { return n_; }
    const PauliTerm &stabilizer(size_t i) const { return stab_[i]; }
    const PauliTerm &destabilizer(size_t i) const { return destab_[i]; }

    void h(size_t q);
    void s(size_t q);
    void cx(size_t c, size_t t);
    /// Multiplies the state by the Pauli (phase ignored).
    void apply_pauli(const PauliTerm &p);

    /// Measures a Hermitian Pauli product. When the outcome is random and
    /// `forced` is set, that outcome is used instead of a coin flip.
    MeasureResult measure(const PauliTerm &p, std::optional<bool> forced = std::nullopt);
    MeasureResult measure_z(size_t q, std::optional<bool> forced = std::nullopt);
    MeasureResult measure_x(size_t q, std::optional<bool> forced = std::nullopt);
    void reset_z(size_t q);
    void reset_x(size_t q);
    /// Prepares the +1 eigenstate of Y.
    void reset_y(size_t q);

    /// +1 / -1 when p (Hermitian) has a definite value, nullopt when random.
    std::optional<int> expectation(const PauliTerm &p) const;

   private:
    // Product of stabilizers whose destabilizers anticommute with p.
    PauliTerm deterministic_product(const PauliTerm &p) const;

    size_t n_;
    std::vector<PauliTerm> stab_;
    std::vector<PauliTerm> destab_;
    std::mt19937_64 rng_;
};

/// Single Pauli fault injected into a tableau run: the Pauli is applied
/// right after instruction `after` (phase ignored); when `flip` is non-empty
/// those measurement indices are flipped in the record instead.
struct InjectedFault {
    size_t after = 0;
    PauliTerm pauli;
    std::vector<size_t> flip;
};

struct TableauRun {
    std::vector<uint8_t> record;
    std::vector<uint8_t> deterministic;
    /// Detector parities and observable parities (1 = flipped / -1 outcome).
    std::vector<uint8_t> detectors;
    std::vector<uint8_t> observables;
};

/// Runs the circuit ignoring NOISE instructions. Random measurement
/// outcomes come from `seed`.
TableauRun tableau_run(const Circuit &circuit, uint64_t seed, const InjectedFault *fault = nullptr);

}  // namespace msi

#endif  // MSI_TABLEAU_H
