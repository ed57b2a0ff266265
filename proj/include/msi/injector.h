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

#ifndef MSI_INJECTOR_H
#define MSI_INJECTOR_H

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "msi/circuit.h"
#include "msi/codes.h"

namespace msi {

/// Injected logicals (ascending), one site per injected logical and the
/// rotation angle carried as metadata (simulation always injects |Y>).
struct InjectionConfig {
    std::vector<size_t> injected;
    std::vector<size_t> sites;
    std::vector<double> angles;

    bool operator==(const InjectionConfig &other) const = default;
};

/// Sets indexed by position in config.injected.
struct OverlapData {
    std::vector<BitVec> o, a, b;
    /// c[i][j]; c[i][i] is O_i minus the site.
    std::vector<std::vector<BitVec>> c;
    BitVec c_union;
};

OverlapData overlaps(const CssCode &code, const InjectionConfig &config);

/// Pairs (i, j) of logical indices with Q_i on the support of logical j.
std::vector<std::pair<size_t, size_t>> site_independence_violations(const CssCode &code,
                                                                    const InjectionConfig &config);
inline bool check_site_independence(const CssCode &code, const InjectionConfig &config) {
    return site_independence_violations(code, config).empty();
}

/// Unordered pairs stored as (u, v) with u < v; u is the Bell control.
struct Pairing {
    std::vector<std::pair<size_t, size_t>> pairs;

    bool operator==(const Pairing &other) const = default;
};

/// Groups C by membership signature over all C_{i,j}; absent if some class
/// is odd, otherwise pairs each class in ascending qubit order.
std::optional<Pairing> find_pairing(const OverlapData &od);

/// True when every pair lies fully inside or outside each C_{i,j} and the
/// pairs partition C.
bool is_compatible(const OverlapData &od, const Pairing &pairing);

struct InjectableSet {
    InjectionConfig config;
    Pairing pairing;
};

struct EnumerateOptions {
    size_t max_set_size = 6;
    /// Candidate sites per logical: all of them when |O_i| <= 7, else the 7
    /// lowest. 0 means unlimited.
    size_t site_budget = 7;
    /// Site tuples kept per injectable index set. 0 means unlimited.
    size_t tuples_per_set = 4;
};

/// Injectable (index set, sites) pairs with a compatible pairing, sorted by
/// set size descending, then index set, then sites.
std::vector<InjectableSet> enumerate_injectable(const CssCode &code, const EnumerateOptions &options = {});

/// Direct form: every site tuple from the product of the candidate sites,
/// conflict graph, Bron-Kerbosch maximal independent sets, then every
/// subset of each MIS tested with find_pairing. Exponential; meant for small
/// codes and as a cross-check of enumerate_injectable.
std::vector<InjectableSet> enumerate_injectable_by_mis(const CssCode &code, size_t max_set_size,
                                                       size_t site_budget = 7);

/// Maximal independent sets of the graph given by adjacency bitmasks
/// (at most 64 vertices), each as a bitmask, in discovery order.
std::vector<uint64_t> maximal_independent_sets(const std::vector<uint64_t> &adjacency);

/// Largest injectable set size and, per size 1..max, the fewest Bell pairs
/// among the injectable sets of that size.
struct InjectabilityScore {
    size_t max_size = 0;
    std::vector<size_t> min_pairs;
    size_t total_pairs() const;
    /// More injectable logicals first, then fewer Bell pairs in total.
    bool better_than(const InjectabilityScore &other) const;
};

InjectabilityScore injectability(const CssCode &code, const EnumerateOptions &options = {});

/// Tries `trials` random symplectic bases drawn from the candidate pools
/// (plus the code's own basis) and keeps the best by injectability score.
CssCode search_injection_basis(const CssCode &code, const std::vector<BitVec> &xpool, const std::vector<BitVec> &zpool,
                               uint64_t seed, size_t trials, const EnumerateOptions &options = {});

/// Minimum-weight representatives for a bivariate bicycle code: X pool from
/// information-set sampling closed under translations, Z pool its mirror.
CssCode bb_injection_basis(const CssCode &code, const BbSpec &spec, uint64_t seed, size_t isd_iterations = 200,
                           size_t trials = 200);

enum class Basis : uint8_t { Free, X, Z, Y };

char basis_char(Basis b);
Basis basis_from_char(char c);

struct PreparationPlan {
    size_t n = 0;
    InjectionConfig config;
    Pairing bell;
    /// Bell controls are X, Bell targets Z, sites Y.
    std::vector<Basis> basis;
    /// Qubits on injected supports minus the sites (the protection targets).
    std::vector<size_t> targets;
    /// Everything else except the sites; bases chosen later.
    std::vector<size_t> free;
};

PreparationPlan build_preparation_plan(const CssCode &code, const InjectionConfig &config, const Pairing &pairing);

/// Resets every data qubit in its basis (free qubits use `full_basis` when
/// given, else Z) and entangles the Bell pairs with CX(u, v).
Circuit preparation_circuit(const PreparationPlan &plan, const std::vector<Basis> *full_basis = nullptr);

std::string injectable_sets_to_json(const std::vector<InjectableSet> &sets);
std::string plan_to_json(const PreparationPlan &plan);
PreparationPlan plan_from_json(const std::string &text);

}  // namespace msi

#endif  // MSI_INJECTOR_H
