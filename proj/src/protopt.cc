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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace msi {

Objective parse_objective(const std::string &name) {
    if (name == "protection") return Objective::MaxProtection;
    if (name == "fixed") return Objective::MaxFixed;
    throw std::invalid_argument("unknown objective: " + name);
}

const char *objective_name(Objective o) { return o == Objective::MaxProtection ? "protection" : "fixed"; }

std::vector<PauliTerm> initial_stabilizers(const PreparationPlan &plan) {
    std::vector<PauliTerm> r;
    size_t n = plan.n;
    std::vector<bool> done(n, false);
    for (auto [u, v] : plan.bell.pairs) {
        PauliTerm xx = PauliTerm::single(n, u, 'X'), zz = PauliTerm::single(n, u, 'Z');
        xx.set_letter(v, 'X');
        zz.set_letter(v, 'Z');
        r.push_back(xx);
        r.push_back(zz);
        done[u] = done[v] = true;
    }
    for (size_t a = 0; a < plan.config.sites.size(); ++a) {
        size_t q = plan.config.sites[a];
        double theta = a < plan.config.angles.size() ? plan.config.angles[a] : std::acos(0.0);
        r.push_back(PauliTerm::single(n, q, std::abs(std::sin(theta)) > 1e-12 ? 'Y' : 'X'));
        done[q] = true;
    }
    for (size_t q = 0; q < n; ++q) {
        if (done[q]) continue;
        if (plan.basis[q] == Basis::X) r.push_back(PauliTerm::single(n, q, 'X'));
        if (plan.basis[q] == Basis::Z) r.push_back(PauliTerm::single(n, q, 'Z'));
        if (plan.basis[q] == Basis::Y) r.push_back(PauliTerm::single(n, q, 'Y'));
    }
    return r;
}

namespace {

bool commutes_with_all(const PauliTerm &p, const std::vector<PauliTerm> &set) {
    for (const auto &s : set) {
        if (anticommutes(p, s)) return false;
    }
    return true;
}

}  // namespace

ProtectionInstance build_instance(const CssCode &code, const PreparationPlan &plan) {
    ProtectionInstance inst;
    inst.n = code.n;
    inst.free = plan.free;
    inst.targets = plan.targets;
    inst.initial = initial_stabilizers(plan);
    std::vector<bool> is_free(code.n, false);
    for (size_t q : plan.free) is_free[q] = true;
    for (size_t q : plan.targets) {
        Basis b = plan.basis[q];
        if (b != Basis::X && b != Basis::Z) throw std::invalid_argument("instance: target without X/Z basis");
        inst.target_basis.push_back(basis_char(b));
    }
    for (char type : {'X', 'Z'}) {
        const BitMatrix &h = type == 'X' ? code.hx : code.hz;
        for (size_t r = 0; r < h.rows(); ++r) {
            BitVec s = h.row(r);
            PauliTerm p = type == 'X' ? PauliTerm::x_type(s) : PauliTerm::z_type(s);
            if (!commutes_with_all(p, inst.initial)) {
                (type == 'X' ? inst.removed_x : inst.removed_z).push_back(r);
                continue;
            }
            CandidateRow row;
            row.type = type;
            row.row = r;
            row.support = s.ones();
            for (size_t q : row.support) {
                if (is_free[q]) row.supp_u.push_back(q);
            }
            inst.rows.push_back(std::move(row));
        }
    }
    std::map<size_t, size_t> target_pos;
    for (size_t t = 0; t < inst.targets.size(); ++t) target_pos[inst.targets[t]] = t;
    inst.dx.assign(inst.targets.size(), {});
    inst.dz.assign(inst.targets.size(), {});
    for (size_t pos = 0; pos < inst.rows.size(); ++pos) {
        for (size_t q : inst.rows[pos].support) {
            auto it = target_pos.find(q);
            if (it == target_pos.end()) continue;
            (inst.rows[pos].type == 'X' ? inst.dx : inst.dz)[it->second].push_back(pos);
        }
    }
    return inst;
}

IlpModel build_milp(const ProtectionInstance &instance, Objective objective) {
    IlpModel m;
    m.objective = objective;
    m.instance = instance;
    auto &prog = m.program;
    auto add_var = [&](std::string name) {
        prog.var_names.push_back(std::move(name));
        return prog.var_names.size() - 1;
    };
    std::map<size_t, size_t> xv;
    for (size_t q : instance.free) {
        m.x_var.push_back(add_var("x_" + std::to_string(q)));
        xv[q] = m.x_var.back();
    }
    for (const auto &row : instance.rows) {
        if (row.supp_u.empty()) {
            m.f_var.push_back(SIZE_MAX);
        } else {
            m.f_var.push_back(add_var(std::string(row.type == 'X' ? "fx_" : "fz_") + std::to_string(row.row)));
        }
    }
    if (objective == Objective::MaxProtection) {
        for (size_t q : instance.targets) m.p_var.push_back(add_var("p_" + std::to_string(q)));
    } else {
        m.p_var.assign(instance.targets.size(), SIZE_MAX);
    }
    size_t cid = 0;
    auto add = [&](std::vector<std::pair<size_t, int>> terms, int rhs) {
        prog.constraints.push_back({"c" + std::to_string(cid++), std::move(terms), rhs});
    };
    for (size_t pos = 0; pos < instance.rows.size(); ++pos) {
        const auto &row = instance.rows[pos];
        for (size_t q : row.supp_u) {
            if (row.type == 'X') {
                add({{m.f_var[pos], 1}, {xv[q], -1}}, 0);
            } else {
                add({{m.f_var[pos], 1}, {xv[q], 1}}, 1);
            }
        }
    }
    if (objective == Objective::MaxProtection) {
        for (size_t t = 0; t < instance.targets.size(); ++t) {
            const auto &d = instance.target_basis[t] == 'X' ? instance.dx[t] : instance.dz[t];
            std::vector<std::pair<size_t, int>> terms = {{m.p_var[t], 1}};
            int rhs = 0;
            for (size_t pos : d) {
                if (m.f_var[pos] == SIZE_MAX) {
                    rhs = 1;
                } else {
                    terms.emplace_back(m.f_var[pos], -1);
                }
            }
            add(std::move(terms), rhs);
            prog.objective.emplace_back(m.p_var[t], 1);
        }
    } else {
        for (size_t v : m.f_var) {
            if (v != SIZE_MAX) prog.objective.emplace_back(v, 1);
        }
    }
    return m;
}

namespace {

using Clock = std::chrono::steady_clock;

// Exact search over one connected component. Rows carry their free qubits as
// positions in the branching order, so the unassigned part of a row is always
// a suffix.
class BranchAndBound {
   public:
    BranchAndBound(const ProtectionInstance &inst, bool protection, Clock::time_point deadline, size_t node_limit)
        : inst_(inst), protection_(protection), deadline_(deadline), node_limit_(node_limit) {
        size_t nu = inst_.free.size();
        std::vector<std::vector<size_t>> rows_of_u(nu);
        for (size_t pos = 0; pos < inst_.rows.size(); ++pos) {
            for (size_t q : inst_.rows[pos].supp_u) rows_of_u[upos(q)].push_back(pos);
        }
        std::vector<size_t> by_degree(nu);
        for (size_t u = 0; u < nu; ++u) by_degree[u] = u;
        std::stable_sort(by_degree.begin(), by_degree.end(),
                         [&](size_t a, size_t b) { return rows_of_u[a].size() > rows_of_u[b].size(); });
        for (size_t u : by_degree) {
            if (!rows_of_u[u].empty()) order_.push_back(u);
        }
        std::vector<size_t> rank(nu, SIZE_MAX);
        for (size_t d = 0; d < order_.size(); ++d) rank[order_[d]] = d;
        size_t nr = inst_.rows.size();
        need_.resize(nr);
        row_ranks_.resize(nr);
        for (size_t pos = 0; pos < nr; ++pos) {
            need_[pos] = inst_.rows[pos].type == 'X';
            for (size_t q : inst_.rows[pos].supp_u) row_ranks_[pos].push_back(rank[upos(q)]);
            std::sort(row_ranks_[pos].begin(), row_ranks_[pos].end());
        }
        rows_at_.assign(order_.size(), {});
        for (size_t pos = 0; pos < nr; ++pos) {
            for (size_t d : row_ranks_[pos]) rows_at_[d].push_back(pos);
        }
        unassigned_.resize(nr);
        for (size_t pos = 0; pos < nr; ++pos) unassigned_[pos] = row_ranks_[pos].size();
        bad_.assign(nr, 0);
        size_t nt = inst_.targets.size();
        targets_of_row_.assign(nr, {});
        target_rows_.assign(nt, {});
        for (size_t t = 0; t < nt; ++t) {
            target_rows_[t] = inst_.target_basis[t] == 'X' ? inst_.dx[t] : inst_.dz[t];
            for (size_t pos : target_rows_[t]) targets_of_row_[pos].push_back(t);
        }
        alive_.resize(nt);
        for (size_t t = 0; t < nt; ++t) alive_[t] = target_rows_[t].size();
        fixed_.assign(nt, 0);
        open_rows_ = long(nr);
        assign_.assign(order_.size(), 0);
        count_x_.assign(order_.size(), 0);
        count_z_.assign(order_.size(), 0);
    }

    // Best assignment per free qubit of the instance (1 = X).
    std::vector<uint8_t> run(bool &optimal) {
        local_search();
        // Nothing beats every target protected (or every row fixed).
        long ceiling = 0;
        if (protection_) {
            for (const auto &rows : target_rows_) ceiling += !rows.empty();
        } else {
            ceiling = long(inst_.rows.size());
        }
        if (best_ < ceiling) dfs(0);
        optimal = !timed_out_;
        std::vector<uint8_t> x(inst_.free.size(), 0);
        for (size_t d = 0; d < order_.size(); ++d) x[order_[d]] = best_assign_[d];
        return x;
    }

   private:
    size_t upos(size_t q) const {
        return std::lower_bound(inst_.free.begin(), inst_.free.end(), q) - inst_.free.begin();
    }

    long evaluate(const std::vector<uint8_t> &a) const {
        std::vector<bool> fixed(inst_.rows.size());
        long v = 0;
        for (size_t pos = 0; pos < inst_.rows.size(); ++pos) {
            bool ok = true;
            for (size_t d : row_ranks_[pos]) ok = ok && a[d] == need_[pos];
            fixed[pos] = ok;
            v += ok;
        }
        if (!protection_) return v;
        v = 0;
        for (const auto &rows : target_rows_) {
            bool prot = false;
            for (size_t pos : rows) prot = prot || fixed[pos];
            v += prot;
        }
        return v;
    }

    // Hill climbing from a few deterministic starts gives the first incumbent.
    void local_search() {
        size_t nd = order_.size();
        std::mt19937_64 rng(nd * 7919 + inst_.rows.size());
        std::vector<std::vector<uint8_t>> starts = {std::vector<uint8_t>(nd, 1), std::vector<uint8_t>(nd, 0)};
        for (int s = 0; s < 8; ++s) {
            std::vector<uint8_t> a(nd);
            for (auto &bit : a) bit = rng() & 1;
            starts.push_back(a);
        }
        best_assign_ = starts[0];
        best_ = evaluate(best_assign_);
        for (auto a : starts) {
            long v = evaluate(a);
            for (bool improved = true; improved;) {
                improved = false;
                for (size_t d = 0; d < nd; ++d) {
                    a[d] ^= 1;
                    long w = evaluate(a);
                    if (w > v) {
                        v = w;
                        improved = true;
                    } else {
                        a[d] ^= 1;
                    }
                }
            }
            if (v > best_) {
                best_ = v;
                best_assign_ = a;
            }
        }
    }

    long value() const {
        if (!protection_) return fixed_rows_;
        long v = 0;
        for (size_t f : fixed_) v += f > 0;
        return v;
    }

    // Open rows (or targets whose live rows all share an open qubit) are
    // charged to that qubit; only one letter can win there.
    long bound() {
        long b = 0;
        touched_.clear();
        auto charge = [&](size_t d, bool x) {
            if (count_x_[d] == 0 && count_z_[d] == 0) touched_.push_back(d);
            (x ? count_x_ : count_z_)[d] += 1;
        };
        if (!protection_) {
            b = fixed_rows_;
            for (size_t pos = 0; pos < inst_.rows.size(); ++pos) {
                if (bad_[pos] || unassigned_[pos] == 0) continue;
                const auto &r = row_ranks_[pos];
                charge(r[r.size() - unassigned_[pos]], need_[pos]);
            }
        } else {
            for (size_t t = 0; t < target_rows_.size(); ++t) {
                if (fixed_[t] > 0) {
                    ++b;
                    continue;
                }
                if (alive_[t] == 0) continue;
                // Open qubits shared by every live row.
                bool first = true;
                for (size_t pos : target_rows_[t]) {
                    if (bad_[pos]) continue;
                    const auto &r = row_ranks_[pos];
                    if (first) {
                        anchors_.assign(r.end() - unassigned_[pos], r.end());
                        first = false;
                        continue;
                    }
                    kept_.clear();
                    for (size_t d : anchors_) {
                        if (std::binary_search(r.begin(), r.end(), d)) kept_.push_back(d);
                    }
                    anchors_.swap(kept_);
                    if (anchors_.empty()) break;
                }
                if (anchors_.empty()) {
                    ++b;
                } else {
                    charge(anchors_[0], inst_.target_basis[t] == 'X');
                }
            }
        }
        for (size_t d : touched_) {
            b += std::max(count_x_[d], count_z_[d]);
            count_x_[d] = count_z_[d] = 0;
        }
        return b;
    }

    void set(size_t d, uint8_t val) {
        assign_[d] = val;
        for (size_t pos : rows_at_[d]) {
            --unassigned_[pos];
            if ((val == 1) != need_[pos]) {
                if (bad_[pos]++ == 0) {
                    --open_rows_;
                    for (size_t t : targets_of_row_[pos]) --alive_[t];
                }
            } else if (bad_[pos] == 0 && unassigned_[pos] == 0) {
                --open_rows_;
                ++fixed_rows_;
                for (size_t t : targets_of_row_[pos]) ++fixed_[t];
            }
        }
    }

    void unset(size_t d) {
        uint8_t val = assign_[d];
        for (size_t pos : rows_at_[d]) {
            if ((val == 1) != need_[pos]) {
                if (--bad_[pos] == 0) {
                    ++open_rows_;
                    for (size_t t : targets_of_row_[pos]) ++alive_[t];
                }
            } else if (bad_[pos] == 0 && unassigned_[pos] == 0) {
                ++open_rows_;
                --fixed_rows_;
                for (size_t t : targets_of_row_[pos]) --fixed_[t];
            }
            ++unassigned_[pos];
        }
        assign_[d] = 0;
    }

    void dfs(size_t depth) {
        if (timed_out_) return;
        if (++nodes_ == node_limit_ || (nodes_ % 1024 == 0 && Clock::now() > deadline_)) {
            timed_out_ = true;
            return;
        }
        if (bound() <= best_) return;
        if (depth == order_.size()) {
            best_ = value();
            best_assign_ = assign_;
            return;
        }
        size_t open_x = 0, open_z = 0;
        for (size_t pos : rows_at_[depth]) {
            if (!bad_[pos]) (need_[pos] ? open_x : open_z) += 1;
        }
        uint8_t first = open_x >= open_z ? 1 : 0;
        for (uint8_t val : {first, uint8_t(1 - first)}) {
            set(depth, val);
            dfs(depth + 1);
            unset(depth);
            if (timed_out_) return;
        }
    }

   public:
    size_t nodes_ = 0;

   private:
    const ProtectionInstance &inst_;
    bool protection_;
    Clock::time_point deadline_;
    size_t node_limit_ = 0;
    std::vector<size_t> order_;
    std::vector<bool> need_;
    std::vector<std::vector<size_t>> row_ranks_, rows_at_, targets_of_row_, target_rows_;
    std::vector<size_t> unassigned_, bad_, alive_, fixed_;
    std::vector<uint8_t> assign_, best_assign_;
    std::vector<long> count_x_, count_z_;
    std::vector<size_t> touched_, anchors_, kept_;
    long open_rows_ = 0, fixed_rows_ = 0;
    long best_ = -1;
    bool timed_out_ = false;
};

// Splits the instance into independent parts: free qubits joined by shared
// rows and, for protection, by shared targets. Rows without free qubits and
// targets already protected by such rows are left out.
std::vector<ProtectionInstance> components(const ProtectionInstance &inst, bool protection,
                                           std::vector<std::vector<size_t>> &row_map) {
    size_t nu = inst.free.size();
    std::vector<size_t> parent(nu);
    for (size_t u = 0; u < nu; ++u) parent[u] = u;
    std::function<size_t(size_t)> find = [&](size_t u) { return parent[u] == u ? u : parent[u] = find(parent[u]); };
    auto upos = [&](size_t q) {
        return size_t(std::lower_bound(inst.free.begin(), inst.free.end(), q) - inst.free.begin());
    };
    auto unite = [&](size_t a, size_t b) { parent[find(a)] = find(b); };
    for (const auto &row : inst.rows) {
        for (size_t q : row.supp_u) unite(upos(row.supp_u[0]), upos(q));
    }
    std::vector<bool> settled(inst.targets.size(), false);
    for (size_t t = 0; t < inst.targets.size(); ++t) {
        const auto &d = inst.target_basis[t] == 'X' ? inst.dx[t] : inst.dz[t];
        size_t anchor = SIZE_MAX;
        for (size_t pos : d) {
            const auto &su = inst.rows[pos].supp_u;
            if (su.empty()) {
                settled[t] = true;
                continue;
            }
            if (!protection) continue;
            if (anchor == SIZE_MAX) anchor = upos(su[0]);
            unite(anchor, upos(su[0]));
        }
    }
    std::map<size_t, size_t> comp_of_root;
    std::vector<ProtectionInstance> parts;
    auto part_of = [&](size_t u) {
        auto [it, fresh] = comp_of_root.emplace(find(u), parts.size());
        if (fresh) {
            parts.emplace_back();
            parts.back().n = inst.n;
            row_map.emplace_back();
        }
        return it->second;
    };
    for (size_t u = 0; u < nu; ++u) parts[part_of(u)].free.push_back(inst.free[u]);
    std::vector<size_t> new_pos(inst.rows.size(), SIZE_MAX), row_part(inst.rows.size(), SIZE_MAX);
    for (size_t pos = 0; pos < inst.rows.size(); ++pos) {
        const auto &row = inst.rows[pos];
        if (row.supp_u.empty()) continue;
        size_t c = part_of(upos(row.supp_u[0]));
        row_part[pos] = c;
        new_pos[pos] = parts[c].rows.size();
        parts[c].rows.push_back(row);
        row_map[c].push_back(pos);
    }
    if (protection) {
        for (size_t t = 0; t < inst.targets.size(); ++t) {
            if (settled[t]) continue;
            const auto &d = inst.target_basis[t] == 'X' ? inst.dx[t] : inst.dz[t];
            if (d.empty()) continue;
            auto &part = parts[row_part[d[0]]];
            part.targets.push_back(inst.targets[t]);
            part.target_basis.push_back(inst.target_basis[t]);
            std::vector<size_t> mapped;
            for (size_t pos : d) mapped.push_back(new_pos[pos]);
            (inst.target_basis[t] == 'X' ? part.dx : part.dz).push_back(mapped);
            (inst.target_basis[t] == 'X' ? part.dz : part.dx).push_back({});
        }
    }
    return parts;
}

void append_terms(std::ostringstream &os, const LinearProgram &p, const std::vector<std::pair<size_t, int>> &terms) {
    size_t on_line = 0;
    for (size_t t = 0; t < terms.size(); ++t) {
        auto [v, c] = terms[t];
        if (on_line == 10) {
            os << "\n   ";
            on_line = 0;
        }
        os << (c < 0 ? " - " : t == 0 ? " " : " + ");
        if (std::abs(c) != 1) os << std::abs(c) << " ";
        os << p.var_names[v];
        ++on_line;
    }
}

}  // namespace

Solution solve_exact(const IlpModel &model, double time_budget_seconds, size_t node_limit) {
    const auto &inst = model.instance;
    if (!std::is_sorted(inst.free.begin(), inst.free.end())) {
        throw std::invalid_argument("solve_exact: free qubits must be sorted");
    }
    bool protection = model.objective == Objective::MaxProtection;
    auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                       std::chrono::duration<double>(time_budget_seconds));
    std::vector<std::vector<size_t>> row_map;
    auto parts = components(inst, protection, row_map);
    std::vector<uint8_t> x(inst.free.size(), 0);
    Solution s;
    s.optimal = true;
    for (const auto &part : parts) {
        BranchAndBound bb(part, protection, deadline, node_limit);
        bool optimal = false;
        auto px = bb.run(optimal);
        s.optimal = s.optimal && optimal;
        s.nodes += bb.nodes_;
        for (size_t u = 0; u < part.free.size(); ++u) {
            x[std::lower_bound(inst.free.begin(), inst.free.end(), part.free[u]) - inst.free.begin()] = px[u];
        }
    }
    // f and p take their largest consistent values.
    s.values.assign(model.program.var_names.size(), 0);
    for (size_t u = 0; u < inst.free.size(); ++u) s.values[model.x_var[u]] = x[u];
    std::vector<bool> row_fixed(inst.rows.size());
    for (size_t pos = 0; pos < inst.rows.size(); ++pos) {
        const auto &row = inst.rows[pos];
        bool ok = true;
        for (size_t q : row.supp_u) {
            ok = ok && x[std::lower_bound(inst.free.begin(), inst.free.end(), q) - inst.free.begin()] ==
                           (row.type == 'X');
        }
        row_fixed[pos] = ok;
        if (model.f_var[pos] != SIZE_MAX) s.values[model.f_var[pos]] = ok;
    }
    if (protection) {
        for (size_t t = 0; t < inst.targets.size(); ++t) {
            bool prot = false;
            for (size_t pos : inst.target_basis[t] == 'X' ? inst.dx[t] : inst.dz[t]) prot = prot || row_fixed[pos];
            s.values[model.p_var[t]] = prot;
        }
    }
    s.objective = evaluate_objective(model.program, s.values);
    return s;
}

bool is_feasible(const LinearProgram &program, const std::vector<uint8_t> &values) {
    if (values.size() != program.var_names.size()) return false;
    for (uint8_t v : values) {
        if (v > 1) return false;
    }
    for (const auto &c : program.constraints) {
        long lhs = 0;
        for (auto [v, k] : c.terms) lhs += k * long(values[v]);
        if (lhs > c.rhs) return false;
    }
    return true;
}

long evaluate_objective(const LinearProgram &program, const std::vector<uint8_t> &values) {
    long s = 0;
    for (auto [v, k] : program.objective) s += k * long(values[v]);
    return s;
}

std::string export_lp(const LinearProgram &program) {
    std::ostringstream os;
    os << "\\ msi-workbench protection model\n";
    os << "Maximize\n obj:";
    append_terms(os, program, program.objective);
    os << "\nSubject To\n";
    for (const auto &c : program.constraints) {
        os << " " << c.name << ":";
        append_terms(os, program, c.terms);
        os << " <= " << c.rhs << "\n";
    }
    os << "Binary\n";
    for (const auto &name : program.var_names) os << " " << name << "\n";
    os << "End\n";
    return os.str();
}

LinearProgram parse_lp(std::string_view text) {
    enum Section { None, Obj, Cons, Bin, Done } sec = None;
    std::vector<std::string> obj_tok, con_tok;
    LinearProgram p;
    std::istringstream in{std::string(text)};
    std::string line;
    auto lower = [](std::string s) {
        for (auto &ch : s) ch = std::tolower(ch);
        return s;
    };
    while (std::getline(in, line)) {
        auto bs = line.find('\\');
        if (bs != std::string::npos) line.resize(bs);
        std::string key = lower(line);
        key.erase(0, key.find_first_not_of(" \t"));
        while (!key.empty() && std::isspace((unsigned char)key.back())) key.pop_back();
        if (key == "maximize" || key == "maximise" || key == "max") {
            sec = Obj;
            continue;
        }
        if (key == "subject to" || key == "st" || key == "s.t.") {
            sec = Cons;
            continue;
        }
        if (key == "binary" || key == "binaries" || key == "bin") {
            sec = Bin;
            continue;
        }
        if (key == "end") {
            sec = Done;
            continue;
        }
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            if (sec == Obj) obj_tok.push_back(tok);
            else if (sec == Cons) con_tok.push_back(tok);
            else if (sec == Bin) p.var_names.push_back(tok);
            else throw std::invalid_argument("lp: token outside a section: " + tok);
        }
    }
    std::map<std::string, size_t> index;
    for (size_t v = 0; v < p.var_names.size(); ++v) index[p.var_names[v]] = v;
    auto parse_terms = [&](const std::vector<std::string> &tok, size_t &i, bool stop_at_le) {
        std::vector<std::pair<size_t, int>> terms;
        int sign = 1, coef = 1;
        for (; i < tok.size(); ++i) {
            const std::string &t = tok[i];
            if (stop_at_le && t == "<=") return terms;
            if (t == "+") continue;
            if (t == "-") {
                sign = -sign;
                continue;
            }
            if (std::isdigit((unsigned char)t[0])) {
                coef = std::stoi(t);
                continue;
            }
            auto it = index.find(t);
            if (it == index.end()) throw std::invalid_argument("lp: unknown variable " + t);
            terms.emplace_back(it->second, sign * coef);
            sign = 1;
            coef = 1;
        }
        if (stop_at_le) throw std::invalid_argument("lp: constraint without <=");
        return terms;
    };
    size_t i = 0;
    if (!obj_tok.empty() && obj_tok[0].back() == ':') ++i;
    p.objective = parse_terms(obj_tok, i, false);
    i = 0;
    while (i < con_tok.size()) {
        Constraint c;
        if (con_tok[i].back() != ':') throw std::invalid_argument("lp: constraint needs a name");
        c.name = con_tok[i].substr(0, con_tok[i].size() - 1);
        ++i;
        c.terms = parse_terms(con_tok, i, true);
        ++i;
        if (i >= con_tok.size()) throw std::invalid_argument("lp: missing right-hand side");
        c.rhs = std::stoi(con_tok[i++]);
        p.constraints.push_back(std::move(c));
    }
    return p;
}

void recompute_fixed(const CssCode &code, const PreparationPlan &plan, const std::vector<Basis> &basis,
                     std::vector<size_t> &fixed_x, std::vector<size_t> &fixed_z) {
    PreparationPlan full = plan;
    full.basis = basis;
    full.free.clear();
    auto init = initial_stabilizers(full);
    fixed_x.clear();
    fixed_z.clear();
    for (size_t r = 0; r < code.hx.rows(); ++r) {
        if (commutes_with_all(PauliTerm::x_type(code.hx.row(r)), init)) fixed_x.push_back(r);
    }
    for (size_t r = 0; r < code.hz.rows(); ++r) {
        if (commutes_with_all(PauliTerm::z_type(code.hz.row(r)), init)) fixed_z.push_back(r);
    }
}

InitialConfiguration apply_solution(const CssCode &code, const PreparationPlan &plan, const IlpModel &model,
                                    const Solution &solution) {
    const auto &inst = model.instance;
    InitialConfiguration ic;
    ic.basis = plan.basis;
    for (size_t u = 0; u < inst.free.size(); ++u) {
        ic.basis[inst.free[u]] = solution.values[model.x_var[u]] ? Basis::X : Basis::Z;
    }
    for (Basis b : ic.basis) {
        if (b == Basis::Free) throw std::logic_error("apply_solution: qubit left without a basis");
    }
    recompute_fixed(code, plan, ic.basis, ic.fixed_x, ic.fixed_z);
    std::set<size_t> fx(ic.fixed_x.begin(), ic.fixed_x.end()), fz(ic.fixed_z.begin(), ic.fixed_z.end());
    for (size_t pos = 0; pos < inst.rows.size(); ++pos) {
        size_t v = model.f_var[pos];
        if (v == SIZE_MAX || !solution.values[v]) continue;
        const auto &row = inst.rows[pos];
        if (!(row.type == 'X' ? fx : fz).count(row.row)) {
            throw std::logic_error("apply_solution: solver row " + std::to_string(row.row) + " is not fixed");
        }
    }
    for (size_t t = 0; t < inst.targets.size(); ++t) {
        size_t q = inst.targets[t];
        bool prot = false;
        if (inst.target_basis[t] == 'X') {
            for (size_t r : ic.fixed_x) prot = prot || code.hx.get(r, q);
        } else {
            for (size_t r : ic.fixed_z) prot = prot || code.hz.get(r, q);
        }
        if (prot) ic.protected_targets.push_back(q);
    }
    ic.objective = model.objective;
    ic.objective_value = solution.objective;
    ic.optimal = solution.optimal;
    return ic;
}

std::string initial_config_to_json(const InitialConfiguration &c) {
    nlohmann::json j;
    std::string basis;
    for (Basis b : c.basis) basis += basis_char(b);
    j["basis"] = basis;
    j["fixed_x"] = c.fixed_x;
    j["fixed_z"] = c.fixed_z;
    j["num_fixed"] = c.num_fixed();
    j["protected"] = c.protected_targets;
    j["objective"] = objective_name(c.objective);
    j["objective_value"] = c.objective_value;
    j["optimal"] = c.optimal;
    return j.dump(1) + "\n";
}

InitialConfiguration initial_config_from_json(const std::string &text) {
    auto j = nlohmann::json::parse(text);
    InitialConfiguration c;
    for (char ch : j.at("basis").get<std::string>()) c.basis.push_back(basis_from_char(ch));
    c.fixed_x = j.at("fixed_x").get<std::vector<size_t>>();
    c.fixed_z = j.at("fixed_z").get<std::vector<size_t>>();
    c.protected_targets = j.at("protected").get<std::vector<size_t>>();
    c.objective = parse_objective(j.at("objective").get<std::string>());
    c.objective_value = j.at("objective_value").get<long>();
    c.optimal = j.at("optimal").get<bool>();
    return c;
}

namespace {

struct BeamState {
    std::vector<size_t> picks;
    long deficit = 0;
    size_t pairs = 0;
};

// Smallest (unprotected targets, Bell pairs) over the injectable sets that
// use every logical of `partial`; false when none is injectable.
bool joint_protection(const CssCode &partial, BeamState &state) {
    EnumerateOptions opt;
    opt.max_set_size = partial.logical_x.size();
    bool any = false;
    for (const auto &set : enumerate_injectable(partial, opt)) {
        if (set.config.injected.size() != partial.logical_x.size()) continue;
        PreparationPlan plan = build_preparation_plan(partial, set.config, set.pairing);
        IlpModel model = build_milp(build_instance(partial, plan), Objective::MaxProtection);
        InitialConfiguration init = apply_solution(partial, plan, model, solve_exact(model, 0.0));
        long deficit = long(plan.targets.size() - init.protected_targets.size());
        size_t pairs = plan.bell.pairs.size();
        if (!any || std::tie(deficit, pairs) < std::tie(state.deficit, state.pairs)) {
            state.deficit = deficit;
            state.pairs = pairs;
        }
        any = true;
    }
    return any;
}

CssCode with_logicals(const CssCode &code, const std::vector<std::pair<BitVec, BitVec>> &pairs) {
    CssCode out = code;
    out.logical_x.clear();
    out.logical_z.clear();
    for (const auto &[x, z] : pairs) {
        out.logical_x.push_back(PauliTerm::x_type(x));
        out.logical_z.push_back(PauliTerm::z_type(z));
    }
    return out;
}

}  // namespace

CssCode protected_injection_basis(const CssCode &code, const BbSpec &spec, const ProtectedBasisOptions &options) {
    auto translations = bb_translations(spec.ell, spec.m);
    auto xpool = min_weight_x_logicals(code, options.seed, options.isd_iterations, translations);
    std::vector<BitVec> zpool;
    for (const auto &x : xpool) zpool.push_back(bb_mirror(x, spec.ell, spec.m));
    if (xpool.empty()) return code;
    std::mt19937_64 rng(options.seed * 0x9e3779b97f4a7c15ULL + 17);

    std::set<std::pair<BitVec, BitVec>> good_set;
    for (size_t tried = 0, guard = 0; tried < options.pair_samples && guard < 1000 * options.pair_samples; ++guard) {
        const BitVec &x = xpool[rng() % xpool.size()];
        const BitVec &z = zpool[rng() % zpool.size()];
        if (!x.dot(z)) continue;
        ++tried;
        if (good_set.count({x, z})) continue;
        BeamState st;
        if (!joint_protection(with_logicals(code, {{x, z}}), st) || st.deficit != 0) continue;
        for (const auto &perm : translations) {
            BitVec a(code.n), b(code.n);
            for (size_t q : x.ones()) a.set(perm[q], true);
            for (size_t q : z.ones()) b.set(perm[q], true);
            good_set.insert({a, b});
        }
    }
    std::vector<std::pair<BitVec, BitVec>> good(good_set.begin(), good_set.end());
    if (good.empty()) return code;

    RowSpace stab(code.n);
    for (size_t r = 0; r < code.hx.rows(); ++r) stab.insert(code.hx.row(r));
    size_t depth = std::min(options.target_size, code.k());
    std::vector<BeamState> beam;
    for (size_t i = 0; i < options.beam_width; ++i) beam.push_back({{size_t(rng() % good.size())}, 0, 0});
    for (size_t level = 1; level < depth; ++level) {
        std::vector<BeamState> next;
        std::set<std::vector<size_t>> seen;
        for (const auto &st : beam) {
            RowSpace span = stab;
            for (size_t i : st.picks) span.insert(good[i].first);
            std::vector<size_t> compat;
            for (size_t g = 0; g < good.size(); ++g) {
                const auto &[x, z] = good[g];
                bool ok = true;
                for (size_t i : st.picks) ok = ok && !x.dot(good[i].second) && !z.dot(good[i].first);
                if (ok && !span.contains(x)) compat.push_back(g);
            }
            std::shuffle(compat.begin(), compat.end(), rng);
            size_t got = 0;
            for (size_t g : compat) {
                if (got == options.expansions) break;
                BeamState cand = st;
                cand.picks.push_back(g);
                auto key = cand.picks;
                std::sort(key.begin(), key.end());
                if (!seen.insert(key).second) continue;
                std::vector<std::pair<BitVec, BitVec>> chosen;
                for (size_t i : cand.picks) chosen.push_back(good[i]);
                if (!joint_protection(with_logicals(code, chosen), cand)) continue;
                ++got;
                next.push_back(std::move(cand));
            }
        }
        if (next.empty()) break;
        std::stable_sort(next.begin(), next.end(), [](const BeamState &a, const BeamState &b) {
            return std::tie(a.deficit, a.pairs) < std::tie(b.deficit, b.pairs);
        });
        if (next.size() > options.beam_width) next.resize(options.beam_width);
        beam = std::move(next);
    }

    std::vector<std::pair<BitVec, BitVec>> fixed;
    for (size_t i : beam.front().picks) fixed.push_back(good[i]);
    // Pool pairs fill as much of the rest as the greedy manages; whatever
    // is left comes from Gram-Schmidt on the code's own logicals.
    std::optional<CssCode> best;
    InjectabilityScore best_score;
    for (size_t t = 0; t < std::max<size_t>(1, options.completion_trials); ++t) {
        CssCode cand = complete_symplectic_basis(code, greedy_symplectic_pairs(code, xpool, zpool, rng, fixed));
        InjectabilityScore s = injectability(cand);
        if (!best || s.better_than(best_score)) {
            best = std::move(cand);
            best_score = std::move(s);
        }
    }
    return *best;
}

}  // namespace msi
