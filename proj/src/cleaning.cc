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

#include "msi/cleaning.h"

#include <stdexcept>

#include "json.hpp"
#include "msi/tableau.h"

namespace msi {

CleanStrategy parse_clean_strategy(const std::string &name) {
    if (name == "first") return CleanStrategy::First;
    if (name == "min_weight") return CleanStrategy::MinWeight;
    if (name == "max_weight") return CleanStrategy::MaxWeight;
    throw std::invalid_argument("unknown cleaning strategy: " + name);
}

namespace {

BitVec symplectic_vec(const PauliTerm &p) {
    size_t n = p.num_qubits();
    BitVec v(2 * n);
    for (size_t j : p.xs().ones()) v.set(j, true);
    for (size_t j : p.zs().ones()) v.set(n + j, true);
    return v;
}

PauliTerm restrict_to(const PauliTerm &p, const std::vector<size_t> &qubits) {
    PauliTerm out(p.num_qubits());
    for (size_t q : qubits) out.set_letter(q, p.letter(q));
    out.set_phase(p.phase());
    return out;
}

}  // namespace

CleaningResult clean(const CssCode &code, CleanStrategy strategy) {
    size_t n = code.n;
    // Independent generating set, X rows first.
    std::vector<PauliTerm> gens;
    RowSpace span(2 * n);
    for (size_t r = 0; r < code.num_stabilizers(); ++r) {
        PauliTerm s = code.stabilizer(r);
        if (span.insert(symplectic_vec(s))) gens.push_back(std::move(s));
    }
    CleaningResult res;
    res.reduced_x = code.logical_x;
    res.reduced_z = code.logical_z;
    std::vector<bool> peeled(n, false);
    for (const auto &g : gens) {
        if (g.weight() == 1) peeled[g.support().first_one()] = true;
    }

    while (true) {
        size_t pick = gens.size();
        for (size_t a = 0; a < gens.size(); ++a) {
            size_t w = gens[a].weight();
            if (w <= 1) continue;
            if (pick == gens.size()) {
                pick = a;
                continue;
            }
            size_t bw = gens[pick].weight();
            if ((strategy == CleanStrategy::MinWeight && w < bw) || (strategy == CleanStrategy::MaxWeight && w > bw)) {
                pick = a;
            }
        }
        if (pick == gens.size()) break;
        PauliTerm s = gens[pick];
        size_t j = n;
        for (size_t q : s.support().ones()) {
            if (!peeled[q]) {
                j = q;
                break;
            }
        }
        if (j == n) throw std::logic_error("clean: generator supported only on peeled qubits");
        char sj = s.letter(j), pj = 'X';
        for (char c : {'X', 'Y', 'Z'}) {
            if (anticommutes(PauliTerm::single(1, 0, c), PauliTerm::single(1, 0, sj))) {
                pj = c;
                break;
            }
        }
        PauliTerm pauli_j = PauliTerm::single(n, j, pj);
        for (size_t a = 0; a < gens.size(); ++a) {
            if (a != pick && anticommutes(gens[a], pauli_j)) gens[a] *= s;
        }
        for (auto &l : res.reduced_x) {
            if (anticommutes(l, pauli_j)) l *= s;
        }
        for (auto &l : res.reduced_z) {
            if (anticommutes(l, pauli_j)) l *= s;
        }
        gens[pick] = pauli_j;
        peeled[j] = true;
        res.steps.push_back({s, j, pj, 1});
    }

    for (const auto &g : gens) res.peeled.push_back(g);
    for (size_t q = 0; q < n; ++q) {
        if (!peeled[q]) res.carrier_qubits.push_back(q);
    }
    for (const auto &l : res.reduced_x) res.carrier_x.push_back(restrict_to(l, res.carrier_qubits));
    for (const auto &l : res.reduced_z) res.carrier_z.push_back(restrict_to(l, res.carrier_qubits));
    return res;
}

std::vector<std::string> verify_preservation(const CssCode &code, const CleaningResult &result, uint64_t seed) {
    std::vector<std::string> bad;
    size_t n = code.n, k = code.k();

    // (a) L' L in the span of the consumed stabilizers.
    BitMatrix consumed(result.steps.size(), 2 * n);
    for (size_t t = 0; t < result.steps.size(); ++t) consumed.set_row(t, symplectic_vec(result.steps[t].consumed));
    BitMatrix ct = consumed.transpose();
    auto check_rep = [&](const PauliTerm &orig, const PauliTerm &red, const std::string &name) {
        BitVec diff = symplectic_vec(orig) ^ symplectic_vec(red);
        if (result.steps.empty() ? diff.any() : !solve(ct, diff).has_value()) {
            bad.push_back("preservation: " + name + " is not the original times consumed stabilizers");
        }
    };
    if (result.reduced_x.size() != k || result.reduced_z.size() != k) {
        bad.push_back("preservation: wrong number of reduced logicals");
        return bad;
    }
    for (size_t i = 0; i < k; ++i) {
        check_rep(code.logical_x[i], result.reduced_x[i], "X" + std::to_string(i));
        check_rep(code.logical_z[i], result.reduced_z[i], "Z" + std::to_string(i));
    }
    // Pairing and carrier support of the restricted logicals.
    BitVec carriers(n);
    for (size_t q : result.carrier_qubits) carriers.set(q, true);
    if (result.carrier_qubits.size() != k) bad.push_back("carriers: expected k carrier qubits");
    for (size_t i = 0; i < k; ++i) {
        for (const auto *l : {&result.carrier_x[i], &result.carrier_z[i]}) {
            if ((l->support() & carriers) != l->support()) bad.push_back("carriers: logical leaves the carrier set");
        }
        for (size_t j = 0; j < k; ++j) {
            if (symplectic_product(result.carrier_x[i], result.carrier_z[j]) != (i == j)) {
                bad.push_back("pairing: carrier logicals not conjugate at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
            }
        }
    }

    // (b) n - k weight-1 generators on distinct qubits, independent.
    if (result.peeled.size() != n - k) bad.push_back("peeled: expected n - k weight-1 generators");
    RowSpace rs(2 * n);
    BitVec used(n);
    for (const auto &g : result.peeled) {
        if (g.weight() != 1) {
            bad.push_back("peeled: generator of weight != 1");
            continue;
        }
        size_t q = g.support().first_one();
        if (used.get(q)) bad.push_back("peeled: two generators on qubit " + std::to_string(q));
        used.set(q, true);
        if (!rs.insert(symplectic_vec(g))) bad.push_back("peeled: dependent generator");
    }

    // (c) Step-order measurements of P_j on a codestate are random.
    Tableau t(n, seed);
    for (size_t r = 0; r < code.num_stabilizers(); ++r) t.measure(code.stabilizer(r), false);
    for (const auto &step : result.steps) {
        PauliTerm p = PauliTerm::single(n, step.qubit, step.pauli);
        if (t.measure(p, step.sign < 0).deterministic) {
            bad.push_back("measurement: P_" + std::to_string(step.qubit) + " is deterministic");
        }
    }
    return bad;
}

Circuit synth_encoding_clifford(const CleaningResult &result, size_t n) {
    size_t k = result.carrier_qubits.size();
    std::vector<PauliTerm> xs = result.carrier_x, zs = result.carrier_z;
    if (xs.size() != k || zs.size() != k) throw std::invalid_argument("synth: need k carrier logical pairs");
    // Gates of D, which maps each (X'_i, Z'_i) to (X_{Q_i}, Z_{Q_i}).
    std::vector<std::pair<Op, std::pair<uint32_t, uint32_t>>> gates;
    auto apply = [&](Op op, uint32_t a, uint32_t b = 0) {
        gates.push_back({op, {a, b}});
        for (size_t i = 0; i < k; ++i) {
            for (auto *p : {&xs[i], &zs[i]}) {
                if (op == Op::H) conj_h(*p, a);
                if (op == Op::S) conj_s(*p, a);
                if (op == Op::CX) conj_cx(*p, a, b);
            }
        }
    };
    for (size_t i = 0; i < k; ++i) {
        uint32_t a = result.carrier_qubits[i];
        if (!xs[i].support().get(a)) {
            // Move some supported unprocessed qubit onto a with a swap.
            uint32_t b = (uint32_t)xs[i].support().first_one();
            apply(Op::CX, a, b);
            apply(Op::CX, b, a);
            apply(Op::CX, a, b);
        }
        for (size_t q : xs[i].support().ones()) {
            char c = xs[i].letter(q);
            if (c == 'Z') apply(Op::H, q);
            if (c == 'Y') apply(Op::S, q);
        }
        for (size_t q : xs[i].support().ones()) {
            if (q != a) apply(Op::CX, a, q);
        }
        if (zs[i].letter(a) == 'Y') {
            apply(Op::H, a);
            apply(Op::S, a);
            apply(Op::H, a);
        }
        for (size_t q : zs[i].support().ones()) {
            if (q == a) continue;
            char c = zs[i].letter(q);
            if (c == 'X') apply(Op::H, q);
            if (c == 'Y') {
                apply(Op::S, q);
                apply(Op::H, q);
            }
        }
        for (size_t q : zs[i].support().ones()) {
            if (q != a) apply(Op::CX, q, a);
        }
        if (xs[i].sign() < 0) {
            apply(Op::S, a);
            apply(Op::S, a);
        }
        if (zs[i].sign() < 0) {
            apply(Op::H, a);
            apply(Op::S, a);
            apply(Op::S, a);
            apply(Op::H, a);
        }
    }
    // C is the inverse of D: reversed order, S^dagger = S^3.
    Circuit c(n, 0);
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        auto [op, ab] = *it;
        if (op == Op::CX) {
            c.append(Op::CX, {ab.first, ab.second});
        } else if (op == Op::S) {
            for (int r = 0; r < 3; ++r) c.append(Op::S, {ab.first});
        } else {
            c.append(op, {ab.first});
        }
    }
    for (size_t i = 0; i < k; ++i) {
        size_t q = result.carrier_qubits[i];
        if (conjugate_by(c, PauliTerm::single(n, q, 'X')) != result.carrier_x[i] ||
            conjugate_by(c, PauliTerm::single(n, q, 'Z')) != result.carrier_z[i]) {
            throw std::logic_error("synth_encoding_clifford: conjugation replay mismatch");
        }
    }
    return c;
}

Circuit general_injection_plan(const CssCode &code, const CleaningResult &result) {
    size_t n = code.n;
    Circuit c(n, 0);
    std::vector<uint32_t> carriers(result.carrier_qubits.begin(), result.carrier_qubits.end());
    if (!carriers.empty()) c.append(Op::RY, carriers);
    Circuit enc = synth_encoding_clifford(result, n);
    for (const auto &ins : enc.instructions()) c.push(ins);
    for (const auto &g : result.peeled) {
        uint32_t q = (uint32_t)g.support().first_one();
        char l = g.letter(q);
        if (g.sign() < 0) throw std::logic_error("general_injection_plan: peeled signs are +1 by construction");
        c.append(l == 'X' ? Op::RX : l == 'Y' ? Op::RY : Op::RZ, {q});
    }
    for (size_t r = 0; r < code.num_stabilizers(); ++r) c.append_mpp(code.stabilizer(r));
    return c;
}

std::string cleaning_to_json(const CleaningResult &result) {
    using nlohmann::json;
    json j;
    json steps = json::array();
    for (const auto &s : result.steps) {
        steps.push_back({{"consumed", s.consumed.str()},
                         {"qubit", s.qubit},
                         {"pauli", std::string(1, s.pauli)},
                         {"sign", s.sign}});
    }
    j["steps"] = steps;
    j["carrier_qubits"] = result.carrier_qubits;
    auto strs = [](const std::vector<PauliTerm> &ps) {
        json a = json::array();
        for (const auto &p : ps) a.push_back(p.str());
        return a;
    };
    j["peeled"] = strs(result.peeled);
    j["reduced_x"] = strs(result.reduced_x);
    j["reduced_z"] = strs(result.reduced_z);
    j["carrier_x"] = strs(result.carrier_x);
    j["carrier_z"] = strs(result.carrier_z);
    return j.dump(1) + "\n";
}

}  // namespace msi
