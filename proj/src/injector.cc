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

#include "msi/injector.h"

#include <algorithm>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace msi {

namespace {

BitVec logical_support(const CssCode &code, size_t i) {
    return code.logical_x[i].support() | code.logical_z[i].support();
}

std::vector<size_t> first_sites(const BitVec &o, size_t budget) {
    std::vector<size_t> s = o.ones();
    if (budget && s.size() > budget) s.resize(budget);
    return s;
}

// Calls f(combination) for all size-s subsets of [k] in lexicographic order.
template <class F>
void for_each_combination(size_t k, size_t s, F &&f) {
    if (s > k) return;
    std::vector<size_t> idx(s);
    for (size_t a = 0; a < s; ++a) idx[a] = a;
    while (true) {
        f(idx);
        size_t a = s;
        while (a > 0 && idx[a - 1] == k - s + a - 1) --a;
        if (a == 0) return;
        ++idx[a - 1];
        for (size_t b = a; b < s; ++b) idx[b] = idx[b - 1] + 1;
    }
}

bool set_less(const InjectableSet &x, const InjectableSet &y) {
    if (x.config.injected.size() != y.config.injected.size()) {
        return x.config.injected.size() > y.config.injected.size();
    }
    if (x.config.injected != y.config.injected) return x.config.injected < y.config.injected;
    return x.config.sites < y.config.sites;
}

InjectionConfig make_config(std::vector<size_t> injected, std::vector<size_t> sites) {
    InjectionConfig c;
    c.angles.assign(injected.size(), std::numbers::pi / 2);
    c.injected = std::move(injected);
    c.sites = std::move(sites);
    return c;
}

}  // namespace

OverlapData overlaps(const CssCode &code, const InjectionConfig &config) {
    size_t s = config.injected.size();
    if (config.sites.size() != s) throw std::invalid_argument("overlaps: one site per injected logical");
    OverlapData od;
    for (size_t a = 0; a < s; ++a) {
        size_t i = config.injected[a];
        if (i >= code.k()) throw std::out_of_range("overlaps: logical index out of range");
        BitVec sx = code.logical_x[i].support(), sz = code.logical_z[i].support();
        BitVec o = sx & sz;
        if (config.sites[a] >= code.n || !o.get(config.sites[a])) {
            throw std::invalid_argument("overlaps: site " + std::to_string(config.sites[a]) + " not in O_" +
                                        std::to_string(i));
        }
        od.a.push_back(sx ^ o);
        od.b.push_back(sz ^ o);
        od.o.push_back(std::move(o));
    }
    od.c_union = BitVec(code.n);
    od.c.assign(s, std::vector<BitVec>(s));
    for (size_t a = 0; a < s; ++a) {
        for (size_t b = 0; b < s; ++b) {
            if (a == b) {
                od.c[a][a] = od.o[a];
                od.c[a][a].set(config.sites[a], false);
            } else {
                od.c[a][b] = od.a[a] & od.b[b];
            }
            od.c_union |= od.c[a][b];
        }
    }
    return od;
}

std::vector<std::pair<size_t, size_t>> site_independence_violations(const CssCode &code,
                                                                    const InjectionConfig &config) {
    std::vector<std::pair<size_t, size_t>> bad;
    for (size_t a = 0; a < config.injected.size(); ++a) {
        for (size_t b = 0; b < config.injected.size(); ++b) {
            if (a == b) continue;
            if (logical_support(code, config.injected[b]).get(config.sites[a])) {
                bad.emplace_back(config.injected[a], config.injected[b]);
            }
        }
    }
    return bad;
}

std::optional<Pairing> find_pairing(const OverlapData &od) {
    size_t s = od.c.size();
    std::map<std::vector<bool>, std::vector<size_t>> classes;
    for (size_t q : od.c_union.ones()) {
        std::vector<bool> sig(s * s);
        for (size_t a = 0; a < s; ++a) {
            for (size_t b = 0; b < s; ++b) sig[a * s + b] = od.c[a][b].get(q);
        }
        classes[sig].push_back(q);
    }
    Pairing p;
    for (const auto &[sig, qs] : classes) {
        if (qs.size() % 2) return std::nullopt;
        for (size_t t = 0; t < qs.size(); t += 2) p.pairs.emplace_back(qs[t], qs[t + 1]);
    }
    std::sort(p.pairs.begin(), p.pairs.end());
    return p;
}

bool is_compatible(const OverlapData &od, const Pairing &pairing) {
    BitVec covered(od.c_union.size());
    for (auto [u, v] : pairing.pairs) {
        if (u == v || u >= covered.size() || v >= covered.size()) return false;
        if (covered.get(u) || covered.get(v)) return false;
        covered.set(u, true);
        covered.set(v, true);
        for (const auto &row : od.c) {
            for (const auto &cij : row) {
                if (cij.get(u) != cij.get(v)) return false;
            }
        }
    }
    return covered == od.c_union;
}

std::vector<InjectableSet> enumerate_injectable(const CssCode &code, const EnumerateOptions &options) {
    size_t k = code.k();
    std::vector<BitVec> supp, o;
    for (size_t i = 0; i < k; ++i) {
        supp.push_back(logical_support(code, i));
        o.push_back(code.logical_x[i].support() & code.logical_z[i].support());
    }
    std::vector<InjectableSet> out;
    size_t top = std::min(options.max_set_size, k);
    for (size_t s = top; s >= 1; --s) {
        for_each_combination(k, s, [&](const std::vector<size_t> &inj) {
            // A site is admissible iff it avoids every other injected support;
            // all admissible sites of a logical share one signature, so the
            // pairing test does not depend on which one is picked.
            std::vector<std::vector<size_t>> cand(s);
            for (size_t a = 0; a < s; ++a) {
                for (size_t q : first_sites(o[inj[a]], options.site_budget)) {
                    bool ok = true;
                    for (size_t b = 0; b < s && ok; ++b) ok = b == a || !supp[inj[b]].get(q);
                    if (ok) cand[a].push_back(q);
                }
                if (cand[a].empty()) return;
            }
            std::vector<size_t> pos(s, 0);
            size_t emitted = 0;
            while (true) {
                std::vector<size_t> sites(s);
                for (size_t a = 0; a < s; ++a) sites[a] = cand[a][pos[a]];
                InjectionConfig cfg = make_config(inj, sites);
                auto pairing = find_pairing(overlaps(code, cfg));
                if (!pairing) return;
                out.push_back({std::move(cfg), std::move(*pairing)});
                if (options.tuples_per_set && ++emitted >= options.tuples_per_set) return;
                size_t a = s;
                while (a > 0) {
                    if (++pos[a - 1] < cand[a - 1].size()) break;
                    pos[a - 1] = 0;
                    --a;
                }
                if (a == 0) return;
            }
        });
        if (s == 1) break;
    }
    std::sort(out.begin(), out.end(), set_less);
    return out;
}

std::vector<uint64_t> maximal_independent_sets(const std::vector<uint64_t> &adjacency) {
    size_t v = adjacency.size();
    if (v > 64) throw std::invalid_argument("maximal_independent_sets: at most 64 vertices");
    uint64_t all = v == 64 ? ~uint64_t{0} : (uint64_t{1} << v) - 1;
    // Maximal cliques of the complement graph, Bron-Kerbosch with pivoting.
    std::vector<uint64_t> comp(v);
    for (size_t i = 0; i < v; ++i) comp[i] = ~adjacency[i] & all & ~(uint64_t{1} << i);
    std::vector<uint64_t> out;
    auto rec = [&](auto &&self, uint64_t r, uint64_t p, uint64_t x) -> void {
        if (!p && !x) {
            out.push_back(r);
            return;
        }
        uint64_t px = p | x;
        size_t pivot = __builtin_ctzll(px);
        size_t best = 0;
        for (uint64_t w = px; w; w &= w - 1) {
            size_t u = __builtin_ctzll(w);
            size_t c = __builtin_popcountll(p & comp[u]);
            if (c > best) best = c, pivot = u;
        }
        for (uint64_t w = p & ~comp[pivot]; w; w &= w - 1) {
            size_t u = __builtin_ctzll(w);
            uint64_t bit = uint64_t{1} << u;
            self(self, r | bit, p & comp[u], x & comp[u]);
            p &= ~bit;
            x |= bit;
        }
    };
    if (v) rec(rec, 0, all, 0);
    return out;
}

std::vector<InjectableSet> enumerate_injectable_by_mis(const CssCode &code, size_t max_set_size,
                                                       size_t site_budget) {
    size_t k = code.k();
    if (k > 20) throw std::invalid_argument("enumerate_injectable_by_mis: too many logicals");
    std::vector<BitVec> supp;
    std::vector<std::vector<size_t>> cand;
    for (size_t i = 0; i < k; ++i) {
        supp.push_back(logical_support(code, i));
        cand.push_back(first_sites(code.logical_x[i].support() & code.logical_z[i].support(), site_budget));
    }
    std::set<std::pair<std::vector<size_t>, std::vector<size_t>>> seen;
    std::vector<InjectableSet> out;
    if (k == 0) return out;
    std::vector<size_t> pos(k, 0);
    while (true) {
        std::vector<uint64_t> adj(k, 0);
        for (size_t i = 0; i < k; ++i) {
            for (size_t j = 0; j < k; ++j) {
                if (i != j && (supp[j].get(cand[i][pos[i]]) || supp[i].get(cand[j][pos[j]]))) {
                    adj[i] |= uint64_t{1} << j;
                }
            }
        }
        for (uint64_t mis : maximal_independent_sets(adj)) {
            // Every non-empty subset of the MIS.
            for (uint64_t sub = mis; sub; sub = (sub - 1) & mis) {
                if ((size_t)__builtin_popcountll(sub) > max_set_size) continue;
                std::vector<size_t> inj, sites;
                for (size_t i = 0; i < k; ++i) {
                    if (sub >> i & 1) {
                        inj.push_back(i);
                        sites.push_back(cand[i][pos[i]]);
                    }
                }
                if (seen.count({inj, sites})) continue;
                seen.insert({inj, sites});
                InjectionConfig cfg = make_config(inj, sites);
                auto pairing = find_pairing(overlaps(code, cfg));
                if (pairing) out.push_back({std::move(cfg), std::move(*pairing)});
            }
        }
        size_t a = k;
        while (a > 0) {
            if (++pos[a - 1] < cand[a - 1].size()) break;
            pos[a - 1] = 0;
            --a;
        }
        if (a == 0) break;
    }
    std::sort(out.begin(), out.end(), set_less);
    return out;
}

size_t InjectabilityScore::total_pairs() const {
    size_t t = 0;
    for (size_t p : min_pairs) t += p;
    return t;
}

bool InjectabilityScore::better_than(const InjectabilityScore &other) const {
    if (max_size != other.max_size) return max_size > other.max_size;
    return total_pairs() < other.total_pairs();
}

InjectabilityScore injectability(const CssCode &code, const EnumerateOptions &options) {
    InjectabilityScore s;
    for (const auto &set : enumerate_injectable(code, options)) {
        size_t z = set.config.injected.size();
        if (z > s.max_size) {
            s.max_size = z;
            s.min_pairs.assign(z, SIZE_MAX);
        }
        s.min_pairs[z - 1] = std::min(s.min_pairs[z - 1], set.pairing.pairs.size());
    }
    return s;
}

CssCode search_injection_basis(const CssCode &code, const std::vector<BitVec> &xpool, const std::vector<BitVec> &zpool,
                               uint64_t seed, size_t trials, const EnumerateOptions &options) {
    std::mt19937_64 rng(seed);
    CssCode best = code;
    InjectabilityScore best_score = injectability(code, options);
    for (size_t t = 0; t < trials; ++t) {
        auto cand = random_symplectic_basis(code, xpool, zpool, rng);
        if (!cand) continue;
        InjectabilityScore s = injectability(*cand, options);
        if (s.better_than(best_score)) {
            best = std::move(*cand);
            best_score = std::move(s);
        }
    }
    return best;
}

CssCode bb_injection_basis(const CssCode &code, const BbSpec &spec, uint64_t seed, size_t isd_iterations,
                           size_t trials) {
    auto xpool = min_weight_x_logicals(code, seed, isd_iterations, bb_translations(spec.ell, spec.m));
    std::vector<BitVec> zpool;
    for (const auto &x : xpool) zpool.push_back(bb_mirror(x, spec.ell, spec.m));
    return search_injection_basis(code, xpool, zpool, seed + 1, trials);
}

char basis_char(Basis b) {
    switch (b) {
        case Basis::X:
            return 'X';
        case Basis::Z:
            return 'Z';
        case Basis::Y:
            return 'Y';
        default:
            return '.';
    }
}

Basis basis_from_char(char c) {
    switch (c) {
        case 'X':
            return Basis::X;
        case 'Z':
            return Basis::Z;
        case 'Y':
            return Basis::Y;
        case '.':
            return Basis::Free;
        default:
            throw std::invalid_argument(std::string("unknown basis '") + c + "'");
    }
}

PreparationPlan build_preparation_plan(const CssCode &code, const InjectionConfig &config, const Pairing &pairing) {
    auto bad = site_independence_violations(code, config);
    if (!bad.empty()) {
        throw std::invalid_argument("plan: site of logical " + std::to_string(bad[0].first) +
                                    " lies on logical " + std::to_string(bad[0].second));
    }
    OverlapData od = overlaps(code, config);
    if (!is_compatible(od, pairing)) throw std::invalid_argument("plan: pairing is not compatible");

    PreparationPlan plan;
    plan.n = code.n;
    plan.config = config;
    plan.bell = pairing;
    plan.basis.assign(code.n, Basis::Free);
    auto assign = [&](size_t q, Basis b) {
        if (plan.basis[q] != Basis::Free && plan.basis[q] != b) {
            throw std::logic_error("plan: conflicting basis on qubit " + std::to_string(q));
        }
        plan.basis[q] = b;
    };
    for (size_t q : config.sites) assign(q, Basis::Y);
    for (auto [u, v] : pairing.pairs) {
        assign(u, Basis::X);
        assign(v, Basis::Z);
    }
    BitVec not_c = od.c_union;
    for (size_t q = 0; q < code.n; ++q) not_c.flip(q);
    for (size_t a = 0; a < od.a.size(); ++a) {
        for (size_t q : (od.a[a] & not_c).ones()) assign(q, Basis::X);
        for (size_t q : (od.b[a] & not_c).ones()) assign(q, Basis::Z);
    }
    BitVec targets(code.n);
    for (size_t i : config.injected) targets |= logical_support(code, i);
    for (size_t q : config.sites) targets.set(q, false);
    plan.targets = targets.ones();
    for (size_t q = 0; q < code.n; ++q) {
        if (!targets.get(q) && plan.basis[q] != Basis::Y) plan.free.push_back(q);
    }
    for (size_t q : plan.targets) {
        if (plan.basis[q] == Basis::Free) throw std::logic_error("plan: target qubit left without a basis");
    }
    return plan;
}

Circuit preparation_circuit(const PreparationPlan &plan, const std::vector<Basis> *full_basis) {
    std::vector<uint32_t> rx, ry, rz;
    for (size_t q = 0; q < plan.n; ++q) {
        Basis b = plan.basis[q];
        if (b == Basis::Free && full_basis) b = (*full_basis)[q];
        if (b == Basis::X) rx.push_back(q);
        if (b == Basis::Y) ry.push_back(q);
        if (b == Basis::Z || b == Basis::Free) rz.push_back(q);
    }
    Circuit c(plan.n, 0);
    if (!rx.empty()) c.append(Op::RX, rx);
    if (!ry.empty()) c.append(Op::RY, ry);
    if (!rz.empty()) c.append(Op::RZ, rz);
    std::vector<uint32_t> cx;
    for (auto [u, v] : plan.bell.pairs) {
        cx.push_back(u);
        cx.push_back(v);
    }
    if (!cx.empty()) c.append(Op::CX, cx);
    return c;
}

namespace {

nlohmann::json config_json(const InjectionConfig &c) {
    return {{"injected", c.injected}, {"sites", c.sites}, {"angles", c.angles}};
}

nlohmann::json pairs_json(const Pairing &p) {
    nlohmann::json a = nlohmann::json::array();
    for (auto [u, v] : p.pairs) a.push_back({u, v});
    return a;
}

}  // namespace

std::string injectable_sets_to_json(const std::vector<InjectableSet> &sets) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto &s : sets) {
        nlohmann::json j = config_json(s.config);
        j["bell_pairs"] = pairs_json(s.pairing);
        a.push_back(j);
    }
    return a.dump(1) + "\n";
}

std::string plan_to_json(const PreparationPlan &plan) {
    nlohmann::json j = config_json(plan.config);
    j["n"] = plan.n;
    j["bell_pairs"] = pairs_json(plan.bell);
    std::string basis;
    for (Basis b : plan.basis) basis += basis_char(b);
    j["basis"] = basis;
    j["targets"] = plan.targets;
    j["free"] = plan.free;
    return j.dump(1) + "\n";
}

PreparationPlan plan_from_json(const std::string &text) {
    auto j = nlohmann::json::parse(text);
    PreparationPlan p;
    p.n = j.at("n").get<size_t>();
    p.config.injected = j.at("injected").get<std::vector<size_t>>();
    p.config.sites = j.at("sites").get<std::vector<size_t>>();
    p.config.angles = j.at("angles").get<std::vector<double>>();
    for (const auto &pr : j.at("bell_pairs")) p.bell.pairs.emplace_back(pr.at(0).get<size_t>(), pr.at(1).get<size_t>());
    std::string basis = j.at("basis").get<std::string>();
    if (basis.size() != p.n) throw std::invalid_argument("plan json: basis length mismatch");
    for (char c : basis) p.basis.push_back(basis_from_char(c));
    p.targets = j.at("targets").get<std::vector<size_t>>();
    p.free = j.at("free").get<std::vector<size_t>>();
    return p;
}

}  // namespace msi
