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


#ifndef MSI_PROTOPT_ORACLE_H
#define MSI_PROTOPT_ORACLE_H

#include <algorithm>
#include <random>

#include "msi/protopt.h"

namespace msi {

// Random instance with free qubits 0..nu-1 followed by the targets.
inline ProtectionInstance random_instance(size_t nu, size_t nrows, size_t ntargets, std::mt19937_64 &rng) {
    ProtectionInstance inst;
    inst.n = nu + ntargets;
    for (size_t q = 0; q < nu; ++q) inst.free.push_back(q);
    std::bernoulli_distribution coin(0.5);
    for (size_t t = 0; t < ntargets; ++t) {
        inst.targets.push_back(nu + t);
        inst.target_basis.push_back(coin(rng) ? 'X' : 'Z');
    }
    std::uniform_int_distribution<size_t> qubit(0, inst.n - 1), width(1, 4);
    for (size_t r = 0; r < nrows; ++r) {
        CandidateRow row;
        row.type = coin(rng) ? 'X' : 'Z';
        row.row = r;
        size_t w = width(rng);
        for (size_t k = 0; k < w; ++k) row.support.push_back(qubit(rng));
        std::sort(row.support.begin(), row.support.end());
        row.support.erase(std::unique(row.support.begin(), row.support.end()), row.support.end());
        for (size_t q : row.support) {
            if (q < nu) row.supp_u.push_back(q);
        }
        inst.rows.push_back(row);
    }
    inst.dx.assign(ntargets, {});
    inst.dz.assign(ntargets, {});
    for (size_t pos = 0; pos < inst.rows.size(); ++pos) {
        for (size_t q : inst.rows[pos].support) {
            if (q >= nu) (inst.rows[pos].type == 'X' ? inst.dx : inst.dz)[q - nu].push_back(pos);
        }
    }
    return inst;
}

// Optimum by enumerating all 2^|U| free-basis assignments (bit set = X).
// MaxFixed counts only rows that touch U, matching the model objective.
inline long brute_force_optimum(const ProtectionInstance &inst, Objective objective) {
    size_t nu = inst.free.size();
    std::vector<uint32_t> mask(inst.rows.size(), 0);
    for (size_t pos = 0; pos < inst.rows.size(); ++pos) {
        for (size_t q : inst.rows[pos].supp_u) {
            size_t u = std::lower_bound(inst.free.begin(), inst.free.end(), q) - inst.free.begin();
            mask[pos] |= uint32_t(1) << u;
        }
    }
    long best = -1;
    std::vector<bool> fixed(inst.rows.size());
    for (uint64_t x = 0; x < (uint64_t(1) << nu); ++x) {
        long value = 0;
        for (size_t pos = 0; pos < inst.rows.size(); ++pos) {
            uint32_t m = mask[pos];
            fixed[pos] = inst.rows[pos].type == 'X' ? (x & m) == m : (x & m) == 0;
            value += fixed[pos] && m != 0;
        }
        if (objective == Objective::MaxProtection) {
            value = 0;
            for (size_t t = 0; t < inst.targets.size(); ++t) {
                const auto &d = inst.target_basis[t] == 'X' ? inst.dx[t] : inst.dz[t];
                bool prot = false;
                for (size_t pos : d) prot = prot || fixed[pos];
                value += prot;
            }
        }
        best = std::max(best, value);
    }
    return best;
}

}  // namespace msi

#endif
