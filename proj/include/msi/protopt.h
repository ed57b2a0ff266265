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

#ifndef MSI_PROTOPT_H
#define MSI_PROTOPT_H

#include <string>
#include <string_view>
#include <vector>

#include "msi/codes.h"
#include "msi/injector.h"

namespace msi {

enum class Objective { MaxProtection, MaxFixed };

Objective parse_objective(const std::string &name);
const char *objective_name(Objective o);

/// A stabilizer row that survived the commutation filter.
struct CandidateRow {
    char type = 'X';
    /// Row index into hx (type X) or hz (type Z).
    size_t row = 0;
    std::vector<size_t> support;
    /// support restricted to the free qubits; empty means fixed by the plan alone.
    std::vector<size_t> supp_u;
};

struct ProtectionInstance {
    size_t n = 0;
    std::vector<size_t> free;
    std::vector<size_t> targets;
    /// 'X' or 'Z' per target.
    std::vector<char> target_basis;
    std::vector<CandidateRow> rows;
    std::vector<size_t> removed_x, removed_z;
    /// Per target: positions into `rows` of X-type (dx) / Z-type (dz) rows
    /// containing it.
    std::vector<std::vector<size_t>> dx, dz;
    /// The initial stabilizers the filter used.
    std::vector<PauliTerm> initial;
};

/// Initial stabilizers of a plan: XX and ZZ per Bell pair, the site operator
/// (Y for any angle with nonzero sine, X otherwise), and X or Z on every other
/// qubit with a fixed basis.
std::vector<PauliTerm> initial_stabilizers(const PreparationPlan &plan);

ProtectionInstance build_instance(const CssCode &code, const PreparationPlan &plan);

/// sum(coef * var) <= rhs over binary variables.
struct Constraint {
    std::string name;
    std::vector<std::pair<size_t, int>> terms;
    int rhs = 0;

    bool operator==(const Constraint &other) const = default;
};

struct LinearProgram {
    std::vector<std::string> var_names;
    /// Maximized.
    std::vector<std::pair<size_t, int>> objective;
    std::vector<Constraint> constraints;

    bool operator==(const LinearProgram &other) const = default;
};

struct IlpModel {
    Objective objective = Objective::MaxProtection;
    ProtectionInstance instance;
    LinearProgram program;
    /// Variable index per free qubit / per row (SIZE_MAX for rows without one)
    /// / per target (SIZE_MAX under MaxFixed).
    std::vector<size_t> x_var, f_var, p_var;
};

IlpModel build_milp(const ProtectionInstance &instance, Objective objective);

struct Solution {
    /// One value per program variable.
    std::vector<uint8_t> values;
    long objective = 0;
    bool optimal = false;
    size_t nodes = 0;
};

/// Branch and bound over the free-qubit bases. Row indicators take their
/// largest consistent value and targets are protected whenever possible, so
/// only x is branched on. Branches on the free qubit touching the most rows
/// (ties by index); bound = current value + still-achievable remainder.
/// A nonzero node_limit also stops each component after that many nodes,
/// which unlike the time budget does not depend on machine speed.
Solution solve_exact(const IlpModel &model, double time_budget_seconds = 60.0, size_t node_limit = 0);

/// Checks every constraint of the program literally.
bool is_feasible(const LinearProgram &program, const std::vector<uint8_t> &values);
long evaluate_objective(const LinearProgram &program, const std::vector<uint8_t> &values);

std::string export_lp(const LinearProgram &program);
LinearProgram parse_lp(std::string_view text);

struct InitialConfiguration {
    std::vector<Basis> basis;
    std::vector<size_t> fixed_x, fixed_z;
    std::vector<size_t> protected_targets;
    Objective objective = Objective::MaxProtection;
    long objective_value = 0;
    bool optimal = false;

    size_t num_fixed() const { return fixed_x.size() + fixed_z.size(); }
};

/// Full basis map from the plan plus solved free bases. F is recomputed as
/// the rows commuting with every initial stabilizer of the completed
/// preparation; throws std::logic_error if a row with f = 1 is missing.
InitialConfiguration apply_solution(const CssCode &code, const PreparationPlan &plan, const IlpModel &model,
                                    const Solution &solution);

/// Rows commuting with all initial stabilizers of a fully specified preparation.
void recompute_fixed(const CssCode &code, const PreparationPlan &plan, const std::vector<Basis> &basis,
                     std::vector<size_t> &fixed_x, std::vector<size_t> &fixed_z);

struct ProtectedBasisOptions {
    /// Number of conjugate pairs the beam search builds before completion.
    size_t target_size = 6;
    /// Random pairs tried when collecting fully protected single pairs.
    size_t pair_samples = 400;
    size_t beam_width = 8;
    size_t expansions = 30;
    size_t completion_trials = 40;
    size_t isd_iterations = 200;
    uint64_t seed = 1;
};

/// Logical basis for a bivariate bicycle code picked for first-round
/// protection. Minimum-weight pairs whose single injection leaves no target
/// unprotected are collected (closed under translations), a beam search
/// grows a set of target_size mutually conjugate pairs ranked by
/// (unprotected targets, Bell pairs) of their joint injection, and the rest
/// of the basis is filled from the minimum-weight pools. The search pairs
/// occupy logical indices 0..target_size-1. Protection is scored with
/// solve_exact at zero time budget, so the result depends only on the
/// options.
CssCode protected_injection_basis(const CssCode &code, const BbSpec &spec, const ProtectedBasisOptions &options = {});

std::string initial_config_to_json(const InitialConfiguration &config);
InitialConfiguration initial_config_from_json(const std::string &text);

}  // namespace msi

#endif  // MSI_PROTOPT_H
