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


#include "msi/protopt.h"

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "msi/tableau.h"
#include "protopt_oracle.h"
#include "test_util.h"

using namespace msi;

namespace {

CssCode rep_hgp13() {
    BitMatrix rep = BitMatrix::from_strings({"110", "011"});
    return build_hgp({rep, rep});
}

PreparationPlan first_plan(const CssCode &code, size_t size = 0) {
    auto sets = enumerate_injectable(code);
    for (const auto &s : sets) {
        if (size == 0 || s.config.injected.size() == size) return build_preparation_plan(code, s.config, s.pairing);
    }
    throw std::runtime_error("no injectable set of that size");
}

}  // namespace

TEST(Protopt, InitialStabilizersSteane) {
    CssCode code = steane_code();
    PreparationPlan plan = first_plan(code);
    auto init = initial_stabilizers(plan);
    size_t fixed_basis = 0;
    for (Basis b : plan.basis) fixed_basis += b != Basis::Free;
    EXPECT_EQ(init.size(), fixed_basis);
    for (size_t a = 0; a < init.size(); ++a) {
        for (size_t b = a + 1; b < init.size(); ++b) EXPECT_FALSE(anticommutes(init[a], init[b]));
    }
    // Zero angle gives X on the site.
    plan.config.angles[0] = 0.0;
    auto flat = initial_stabilizers(plan);
    bool found = false;
    for (const auto &p : flat) found = found || (p.weight() == 1 && p.letter(plan.config.sites[0]) == 'X');
    EXPECT_TRUE(found);
}

TEST(Protopt, RowsTouchingSiteAreRemoved) {
    for (const CssCode &code : {steane_code(), rep_hgp13()}) {
        PreparationPlan plan = first_plan(code);
        auto inst = build_instance(code, plan);
        for (size_t q : plan.config.sites) {
            for (const auto &row : inst.rows) {
                EXPECT_FALSE(std::count(row.support.begin(), row.support.end(), q)) << "row " << row.row;
            }
        }
        EXPECT_EQ(inst.rows.size() + inst.removed_x.size() + inst.removed_z.size(), code.hx.rows() + code.hz.rows());
    }
}

TEST(Protopt, MatchesExhaustiveOracle) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<size_t> nu_d(0, 14), rows_d(1, 30), t_d(1, 8);
    for (int trial = 0; trial < 150; ++trial) {
        auto inst = random_instance(nu_d(rng), rows_d(rng), t_d(rng), rng);
        for (Objective obj : {Objective::MaxProtection, Objective::MaxFixed}) {
            auto model = build_milp(inst, obj);
            auto sol = solve_exact(model);
            ASSERT_TRUE(sol.optimal);
            ASSERT_TRUE(is_feasible(model.program, sol.values)) << trial;
            EXPECT_EQ(sol.objective, brute_force_optimum(inst, obj)) << "trial " << trial << " " << objective_name(obj);
        }
    }
}

TEST(Protopt, RealCodesMatchOracle) {
    std::vector<CssCode> codes = {steane_code(), rep_hgp13()};
    std::mt19937_64 rng(5);
    for (int t = 0; t < 4; ++t) {
        auto h = random_matrix(3, 4, 0.5, rng);
        CssCode c = build_hgp({h, h});
        if (c.k() > 0 && c.n <= 30) codes.push_back(c);
    }
    for (const auto &code : codes) {
        for (const auto &set : enumerate_injectable(code)) {
            PreparationPlan plan = build_preparation_plan(code, set.config, set.pairing);
            auto inst = build_instance(code, plan);
            if (inst.free.size() > 16) continue;
            for (Objective obj : {Objective::MaxProtection, Objective::MaxFixed}) {
                auto model = build_milp(inst, obj);
                auto sol = solve_exact(model);
                EXPECT_EQ(sol.objective, brute_force_optimum(inst, obj));
                auto ic = apply_solution(code, plan, model, sol);
                if (obj == Objective::MaxProtection) {
                    EXPECT_EQ(long(ic.protected_targets.size()), sol.objective);
                }
            }
        }
    }
}

TEST(Protopt, FixedRowsAreDeterministic) {
    // Every row in the recomputed F must measure deterministically +1 after
    // the preparation circuit.
    CssCode code = rep_hgp13();
    for (const auto &set : enumerate_injectable(code)) {
        PreparationPlan plan = build_preparation_plan(code, set.config, set.pairing);
        auto model = build_milp(build_instance(code, plan), Objective::MaxProtection);
        auto ic = apply_solution(code, plan, model, solve_exact(model));
        Circuit c = preparation_circuit(plan, &ic.basis);
        std::vector<PauliTerm> fixed;
        for (size_t r : ic.fixed_x) fixed.push_back(PauliTerm::x_type(code.hx.row(r)));
        for (size_t r : ic.fixed_z) fixed.push_back(PauliTerm::z_type(code.hz.row(r)));
        for (const auto &p : fixed) c.append_mpp(p);
        for (uint64_t seed : {1, 2, 3}) {
            auto run = tableau_run(c, seed, nullptr);
            for (size_t m = 0; m < fixed.size(); ++m) {
                EXPECT_TRUE(run.deterministic[m]);
                EXPECT_FALSE(run.record[m]);
            }
        }
    }
}

TEST(Protopt, PinningNeverHelps) {
    // Pinning a free qubit to a basis cannot raise the optimum.
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        auto inst = random_instance(8, 14, 5, rng);
        size_t q = inst.free.back();
        for (Objective obj : {Objective::MaxProtection, Objective::MaxFixed}) {
            long full = solve_exact(build_milp(inst, obj)).objective;
            for (char letter : {'X', 'Z'}) {
                ProtectionInstance pinned = inst;
                pinned.free.pop_back();
                pinned.rows.clear();
                std::vector<size_t> remap(inst.rows.size(), SIZE_MAX);
                for (size_t pos = 0; pos < inst.rows.size(); ++pos) {
                    CandidateRow row = inst.rows[pos];
                    if (!row.supp_u.empty() && row.supp_u.back() == q) {
                        if (row.type != letter) continue;
                        row.supp_u.pop_back();
                    }
                    remap[pos] = pinned.rows.size();
                    pinned.rows.push_back(row);
                }
                for (auto *d : {&pinned.dx, &pinned.dz}) {
                    for (auto &list : *d) {
                        std::vector<size_t> kept;
                        for (size_t pos : list) {
                            if (remap[pos] != SIZE_MAX) kept.push_back(remap[pos]);
                        }
                        list = kept;
                    }
                }
                long pinned_value = solve_exact(build_milp(pinned, obj)).objective;
                if (obj == Objective::MaxProtection) EXPECT_LE(pinned_value, full);
                EXPECT_EQ(pinned_value, brute_force_optimum(pinned, obj));
            }
        }
    }
}

TEST(Protopt, EmptyFreeSet) {
    std::mt19937_64 rng(3);
    auto inst = random_instance(0, 10, 4, rng);
    auto model = build_milp(inst, Objective::MaxProtection);
    EXPECT_TRUE(model.x_var.empty());
    auto sol = solve_exact(model);
    EXPECT_TRUE(sol.optimal);
    EXPECT_EQ(sol.objective, brute_force_optimum(inst, Objective::MaxProtection));
}

TEST(Protopt, ConstraintCount) {
    std::mt19937_64 rng(9);
    auto inst = random_instance(10, 20, 6, rng);
    size_t links = 0;
    for (const auto &row : inst.rows) links += row.supp_u.size();
    auto prot = build_milp(inst, Objective::MaxProtection);
    EXPECT_EQ(prot.program.constraints.size(), links + inst.targets.size());
    auto fixed = build_milp(inst, Objective::MaxFixed);
    EXPECT_EQ(fixed.program.constraints.size(), links);
    for (size_t v : fixed.p_var) EXPECT_EQ(v, SIZE_MAX);
}

TEST(Protopt, LpRoundTrip) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        auto inst = random_instance(12, 25, 7, rng);
        for (Objective obj : {Objective::MaxProtection, Objective::MaxFixed}) {
            auto model = build_milp(inst, obj);
            std::string text = export_lp(model.program);
            EXPECT_EQ(parse_lp(text), model.program);
            EXPECT_EQ(export_lp(parse_lp(text)), text);
        }
    }
    EXPECT_THROW(parse_lp("Maximize\n obj: y\nBinary\n x\nEnd\n"), std::invalid_argument);
}

TEST(Protopt, ApplySolutionRejectsBadSolution) {
    CssCode code = rep_hgp13();
    PreparationPlan plan = first_plan(code);
    auto model = build_milp(build_instance(code, plan), Objective::MaxFixed);
    auto sol = solve_exact(model);
    // Claim every row fixed while choosing Z everywhere.
    bool any_x = false;
    for (size_t pos = 0; pos < model.instance.rows.size(); ++pos) {
        if (model.f_var[pos] == SIZE_MAX) continue;
        sol.values[model.f_var[pos]] = 1;
        any_x = any_x || model.instance.rows[pos].type == 'X';
    }
    for (size_t v : model.x_var) sol.values[v] = 0;
    if (any_x) {
        EXPECT_THROW(apply_solution(code, plan, model, sol), std::logic_error);
    }
}

TEST(Protopt, JsonRoundTrip) {
    CssCode code = steane_code();
    PreparationPlan plan = first_plan(code);
    auto model = build_milp(build_instance(code, plan), Objective::MaxProtection);
    auto ic = apply_solution(code, plan, model, solve_exact(model));
    auto back = initial_config_from_json(initial_config_to_json(ic));
    EXPECT_EQ(back.basis, ic.basis);
    EXPECT_EQ(back.fixed_x, ic.fixed_x);
    EXPECT_EQ(back.fixed_z, ic.fixed_z);
    EXPECT_EQ(back.protected_targets, ic.protected_targets);
    EXPECT_EQ(back.objective_value, ic.objective_value);
    EXPECT_EQ(initial_config_to_json(back), initial_config_to_json(ic));
}

TEST(Protopt, SteaneInstanceByHand) {
    // Site 0, Bell pair (1, 2): the weight-4 rows through qubit 0 are removed,
    // rows {1,2,5,6} and {3,4,5,6} survive in both types. Target 1 (X) is
    // detected only by X row 1, target 2 (Z) only by Z row 1, and those two
    // rows clash on qubits 5 and 6.
    CssCode code = steane_code();
    PreparationPlan plan = first_plan(code);
    ASSERT_EQ(plan.config.sites, std::vector<size_t>({0}));
    ASSERT_EQ(plan.bell.pairs, (std::vector<std::pair<size_t, size_t>>{{1, 2}}));
    auto inst = build_instance(code, plan);
    EXPECT_EQ(inst.removed_x, std::vector<size_t>({0}));
    EXPECT_EQ(inst.removed_z, std::vector<size_t>({0}));
    EXPECT_EQ(inst.rows.size(), 4u);
    EXPECT_EQ(inst.free, std::vector<size_t>({3, 4, 5, 6}));
    EXPECT_EQ(inst.target_basis, std::vector<char>({'X', 'Z'}));
    auto model = build_milp(inst, Objective::MaxProtection);
    EXPECT_EQ(model.program.var_names.size(), 10u);
    EXPECT_EQ(model.program.constraints.size(), 14u);
    EXPECT_EQ(solve_exact(model).objective, 1);
    EXPECT_EQ(solve_exact(build_milp(inst, Objective::MaxFixed)).objective, 2);
}

TEST(Protopt, EmptyProgramExportsHeaderOnly) {
    std::string text = export_lp(LinearProgram{});
    EXPECT_EQ(text, "\\ msi-workbench protection model\nMaximize\n obj:\nSubject To\nBinary\nEnd\n");
    EXPECT_EQ(parse_lp(text), LinearProgram{});
}

TEST(Protopt, ProtectedTargetsHaveFixedRow) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        auto inst = random_instance(10, 18, 6, rng);
        auto prot = build_milp(inst, Objective::MaxProtection);
        auto sol = solve_exact(prot);
        for (size_t t = 0; t < inst.targets.size(); ++t) {
            if (!sol.values[prot.p_var[t]]) continue;
            bool has = false;
            for (size_t pos : inst.target_basis[t] == 'X' ? inst.dx[t] : inst.dz[t]) {
                has = has || prot.f_var[pos] == SIZE_MAX || sol.values[prot.f_var[pos]];
            }
            EXPECT_TRUE(has);
        }
        // The protection optimum dominates the protection reached by the
        // fixed-count optimum.
        auto fixed = build_milp(inst, Objective::MaxFixed);
        auto fsol = solve_exact(fixed);
        std::vector<uint8_t> replay(prot.program.var_names.size(), 0);
        for (size_t u = 0; u < inst.free.size(); ++u) replay[prot.x_var[u]] = fsol.values[fixed.x_var[u]];
        long induced = 0;
        for (size_t t = 0; t < inst.targets.size(); ++t) {
            bool p = false;
            for (size_t pos : inst.target_basis[t] == 'X' ? inst.dx[t] : inst.dz[t]) {
                p = p || fixed.f_var[pos] == SIZE_MAX || fsol.values[fixed.f_var[pos]];
            }
            induced += p;
        }
        EXPECT_GE(sol.objective, induced);
    }
}

TEST(Protopt, ProtectedBasisProtectsSearchPairs) {
    auto spec = gross_code_spec();
    CssCode code = build_bb(spec);
    ProtectedBasisOptions opt;
    opt.target_size = 4;
    opt.completion_trials = 2;
    CssCode b = protected_injection_basis(code, spec, opt);
    EXPECT_TRUE(validate(b).empty());
    for (size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(b.logical_x[i].weight(), 12u);
        EXPECT_EQ(b.logical_z[i].weight(), 12u);
    }
    // The search pairs inject together, and for some site choice a proven
    // optimum protects every target.
    bool full = false, seen = false;
    for (const auto &set : enumerate_injectable(b)) {
        if (set.config.injected != std::vector<size_t>{0, 1, 2, 3}) continue;
        seen = true;
        PreparationPlan plan = build_preparation_plan(b, set.config, set.pairing);
        IlpModel m = build_milp(build_instance(b, plan), Objective::MaxProtection);
        full = full || size_t(solve_exact(m, 20.0).objective) == plan.targets.size();
    }
    EXPECT_TRUE(seen);
    EXPECT_TRUE(full);
    EXPECT_EQ(protected_injection_basis(code, spec, opt).logical_z, b.logical_z);
}
