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

#ifndef MSI_CODES_H
#define MSI_CODES_H

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "msi/gf2.h"

namespace msi {

/// CSS code with paired logical representatives. logical_x[i] is X-type,
/// logical_z[i] is Z-type, and they anticommute exactly when indices match.
struct CssCode {
    size_t n = 0;
    BitMatrix hx;
    BitMatrix hz;
    std::vector<PauliTerm> logical_x;
    std::vector<PauliTerm> logical_z;

    size_t k() const { return logical_x.size(); }
    /// Stabilizer row r as a Pauli: X rows first, then Z rows.
    PauliTerm stabilizer(size_t r) const;
    size_t num_stabilizers() const { return hx.rows() + hz.rows(); }
};

/// Polynomial terms x^p y^q of a bivariate bicycle code.
struct BbSpec {
    size_t ell = 0;
    size_t m = 0;
    std::vector<std::pair<int, int>> a_monomials;
    std::vector<std::pair<int, int>> b_monomials;
};

struct HgpSpec {
    BitMatrix h1;
    BitMatrix h2;
};

/// Sum over monomials of S_ell^p (x) S_m^q, where S is the cyclic shift.
BitMatrix bb_polynomial(size_t ell, size_t m, const std::vector<std::pair<int, int>> &monomials);
/// H_X = [A|B], H_Z = [B^T|A^T]; qubits [0, ell*m) are the left block.
CssCode build_bb(const BbSpec &spec);
/// H_X = [H1 (x) I | I (x) H2^T], H_Z = [I (x) H2 | H1^T (x) I]; the n1*n2 block comes first.
CssCode build_hgp(const HgpSpec &spec);
/// Builds a code from checks, computing and greedily shortening logicals.
CssCode make_css(BitMatrix hx, BitMatrix hz);
/// [[7,1,3]] Steane code from the Hamming [7,4] checks.
CssCode steane_code();
/// The [[144,12,12]] instance: ell=12, m=6, A = 1 + y + x^3 y^-1, B = 1 + x + x^-1 y^-3.
BbSpec gross_code_spec();

/// Logical X in ker(hz) mod rowspace(hx) and Z in ker(hx) mod rowspace(hz),
/// normalized so that X_i and Z_j anticommute iff i == j.
std::pair<std::vector<PauliTerm>, std::vector<PauliTerm>> compute_logicals(const BitMatrix &hx, const BitMatrix &hz);

/// Greedy descent: repeatedly multiply each representative by the same-type
/// stabilizer row that lowers its weight the most (lowest row on ties) until no
/// row helps. With `use_logicals`, other same-type representatives are also
/// allowed as moves and the conjugate partners are fixed up to keep pairing.
CssCode reduce_weight(const CssCode &code, bool use_logicals = false);

/// Randomized information-set search for short representatives. Qubit
/// permutations in `symmetries` must be automorphisms of both check matrices;
/// they are used to spread each short word found over its orbit.
CssCode search_short_logicals(const CssCode &code, uint64_t seed, size_t iterations,
                              const std::vector<std::vector<size_t>> &symmetries = {});
/// The ell*m translations x^a y^b of a bivariate bicycle code as qubit permutations.
std::vector<std::vector<size_t>> bb_translations(size_t ell, size_t m);

/// X(p, q) -> Z(q^T, p^T): maps X logicals of a bivariate bicycle code to
/// Z logicals (and back), with ^T the exponent negation x^-a y^-b.
BitVec bb_mirror(const BitVec &v, size_t ell, size_t m);

/// Distinct minimum-weight X logicals (outside the stabilizer span) found by
/// information-set sampling and closed under the given symmetries.
std::vector<BitVec> min_weight_x_logicals(const CssCode &code, uint64_t seed, size_t iterations,
                                          const std::vector<std::vector<size_t>> &symmetries = {});

/// Builds k conjugate pairs from candidate X words and candidate Z words by
/// randomized greedy selection: each new X commutes with the chosen Z's, each
/// new Z pairs with its X only. Returns nullopt when the greedy gets stuck.
/// `fixed` pairs (already conjugate) come first and are kept as given.
std::optional<CssCode> random_symplectic_basis(const CssCode &code, const std::vector<BitVec> &xpool,
                                               const std::vector<BitVec> &zpool, std::mt19937_64 &rng,
                                               const std::vector<std::pair<BitVec, BitVec>> &fixed = {});

/// The greedy step of random_symplectic_basis without the completeness
/// requirement: `fixed` followed by as many pool pairs as it could add.
std::vector<std::pair<BitVec, BitVec>> greedy_symplectic_pairs(const CssCode &code, const std::vector<BitVec> &xpool,
                                                               const std::vector<BitVec> &zpool, std::mt19937_64 &rng,
                                                               const std::vector<std::pair<BitVec, BitVec>> &fixed);

/// Extends mutually conjugate (X word, Z word) pairs to a full logical basis
/// with symplectic Gram-Schmidt over the code's own logicals. The given
/// pairs keep their order and come first.
CssCode complete_symplectic_basis(const CssCode &code, const std::vector<std::pair<BitVec, BitVec>> &pairs);

/// Every violated invariant, one message per check. Empty means valid.
std::vector<std::string> validate(const CssCode &code);

/// Minimum weight of a nontrivial logical of either type by exhaustive
/// search. Throws when n > max_n; returns nullopt when k = 0.
std::optional<size_t> estimate_distance_bruteforce(const CssCode &code, size_t max_n = 20);

/// Minimum weight in the coset rep + rowspace(stabilizers), exhaustive over the row space.
size_t min_coset_weight(const BitVec &rep, const BitMatrix &stabilizers);

std::string code_to_json(const CssCode &code);
CssCode code_from_json(const std::string &text);

}  // namespace msi

#endif  // MSI_CODES_H
