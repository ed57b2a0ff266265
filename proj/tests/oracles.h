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

#ifndef MSI_TEST_ORACLES_H
#define MSI_TEST_ORACLES_H

// Brute-force references shared by the unit tests and the acceptance run.

#include <random>
#include <string>
#include <vector>

#include "msi/circuit.h"
#include "msi/codes.h"
#include "msi/injector.h"
#include "msi/tableau.h"

namespace msi {

inline CssCode rep_hgp13() {
    BitMatrix rep = BitMatrix::from_strings({"110", "011"});
    return build_hgp({rep, rep});
}

// Exhaustive search over perfect matchings of C that respect every C_{i,j}.
inline bool brute_pairing_exists(const OverlapData &od, std::vector<size_t> left) {
    if (left.empty()) return true;
    size_t u = left[0];
    for (size_t t = 1; t < left.size(); ++t) {
        size_t v = left[t];
        bool ok = true;
        for (const auto &row : od.c) {
            for (const auto &cij : row) ok = ok && cij.get(u) == cij.get(v);
        }
        if (!ok) continue;
        std::vector<size_t> rest;
        for (size_t w = 1; w < left.size(); ++w) {
            if (w != t) rest.push_back(left[w]);
        }
        if (brute_pairing_exists(od, rest)) return true;
    }
    return false;
}

// Up to 3 logicals and at most 10 qubits in C. Few distinct membership
// patterns so even classes actually occur.
inline OverlapData random_overlap_instance(std::mt19937_64 &rng) {
    size_t s = 1 + rng() % 3;
    size_t nq = 2 + rng() % 9;
    OverlapData od;
    od.c.assign(s, std::vector<BitVec>(s, BitVec(nq)));
    od.c_union = BitVec(nq);
    std::vector<std::vector<bool>> patterns(1 + rng() % 3, std::vector<bool>(s * s));
    for (auto &p : patterns) {
        for (size_t t = 0; t < s * s; ++t) p[t] = rng() % 3 == 0;
        p[rng() % (s * s)] = true;
    }
    for (size_t q = 0; q < nq; ++q) {
        if (rng() % 4 == 0) continue;
        const auto &p = patterns[rng() % patterns.size()];
        for (size_t t = 0; t < s * s; ++t) {
            if (p[t]) od.c[t / s][t % s].set(q, true);
        }
        od.c_union.set(q, true);
    }
    return od;
}

inline PauliTerm logical_y_of(const PauliTerm &x, const PauliTerm &z) {
    PauliTerm y = x;
    y *= z;
    y.set_phase(y.phase() + 1);
    return y;
}

// Prepares the plan (free qubits in random X/Z), checks X_{A_i} and Z_{B_i}
// before projection, measures every stabilizer, then checks <Y_i> = +1.
// Returns an empty string when everything holds.
inline std::string theorem_failure(const CssCode &code, const InjectableSet &set, uint64_t seed) {
    PreparationPlan plan = build_preparation_plan(code, set.config, set.pairing);
    std::mt19937_64 rng(seed);
    std::vector<Basis> full = plan.basis;
    for (size_t q : plan.free) full[q] = rng() & 1 ? Basis::X : Basis::Z;
    Circuit c = preparation_circuit(plan, &full);
    OverlapData od = overlaps(code, set.config);
    std::vector<size_t> pre;
    for (size_t a = 0; a < od.a.size(); ++a) {
        pre.push_back(c.append_mpp(PauliTerm::x_type(od.a[a])));
        pre.push_back(c.append_mpp(PauliTerm::z_type(od.b[a])));
    }
    for (size_t r = 0; r < code.num_stabilizers(); ++r) c.append_mpp(code.stabilizer(r));
    std::vector<size_t> post;
    for (size_t i : set.config.injected)
        post.push_back(c.append_mpp(logical_y_of(code.logical_x[i], code.logical_z[i])));
    TableauRun run = tableau_run(c, seed);
    for (size_t m : pre) {
        if (!run.deterministic[m] || run.record[m]) return "pre-projection operator not +1";
    }
    for (size_t m : post) {
        if (!run.deterministic[m] || run.record[m]) return "logical Y not +1";
    }
    return "";
}

}  // namespace msi

#endif
