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


#include "msi/circuitgen.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace msi {

ScheduleKind parse_schedule_kind(const std::string &name) {
    if (name == "edge_coloring") return ScheduleKind::EdgeColoring;
    if (name == "product_coloration") return ScheduleKind::ProductColoration;
    if (name == "explicit") return ScheduleKind::Explicit;
    throw std::invalid_argument("unknown schedule kind: " + name);
}

const char *schedule_kind_name(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::EdgeColoring:
            return "edge_coloring";
        case ScheduleKind::ProductColoration:
            return "product_coloration";
        case ScheduleKind::Explicit:
            return "explicit";
    }
    return "?";
}

std::pair<std::vector<size_t>, size_t> edge_coloring(const BitMatrix &h) {
    size_t delta = 0;
    for (size_t r = 0; r < h.rows(); ++r) delta = std::max(delta, h.row(r).popcount());
    BitMatrix ht = h.transpose();
    for (size_t q = 0; q < h.cols(); ++q) delta = std::max(delta, ht.row(q).popcount());
    // at_row[r][c] = column joined to r by color c, at_col likewise.
    std::vector<std::vector<size_t>> at_row(h.rows(), std::vector<size_t>(delta, SIZE_MAX));
    std::vector<std::vector<size_t>> at_col(h.cols(), std::vector<size_t>(delta, SIZE_MAX));
    auto first_free = [&](const std::vector<size_t> &slots) {
        return size_t(std::find(slots.begin(), slots.end(), SIZE_MAX) - slots.begin());
    };
    for (size_t q = 0; q < h.cols(); ++q) {
        for (size_t r = 0; r < h.rows(); ++r) {
            if (!h.get(r, q)) continue;
            size_t a = first_free(at_row[r]);
            if (at_col[q][a] != SIZE_MAX) {
                // Swap a and b along the alternating path leaving q; in a
                // bipartite graph it never returns to r.
                size_t b = first_free(at_col[q]);
                std::vector<std::pair<size_t, size_t>> path;  // (row, col) edges
                size_t col = q, row = SIZE_MAX, want = a;
                bool on_col = true;
                while (true) {
                    if (on_col) {
                        row = at_col[col][want];
                        if (row == SIZE_MAX) break;
                        path.emplace_back(row, col);
                    } else {
                        col = at_row[row][want];
                        if (col == SIZE_MAX) break;
                        path.emplace_back(row, col);
                    }
                    on_col = !on_col;
                    want = want == a ? b : a;
                }
                for (auto [pr, pc] : path) {
                    size_t c = at_row[pr][a] == pc ? a : b;
                    at_row[pr][c] = SIZE_MAX;
                    at_col[pc][c] = SIZE_MAX;
                }
                // Path colors run a, b, a, ...; flip them.
                bool color_a = true;
                for (auto [pr, pc] : path) {
                    size_t c = color_a ? b : a;
                    at_row[pr][c] = pc;
                    at_col[pc][c] = pr;
                    color_a = !color_a;
                }
            }
            at_row[r][a] = q;
            at_col[q][a] = r;
        }
    }
    std::vector<size_t> colors;
    for (size_t q = 0; q < h.cols(); ++q) {
        for (size_t r = 0; r < h.rows(); ++r) {
            if (!h.get(r, q)) continue;
            for (size_t c = 0; c < delta; ++c) {
                if (at_col[q][c] == r) colors.push_back(c);
            }
        }
    }
    return {colors, delta};
}

namespace {

// Layers for one check matrix, stabilizer indices offset by `base`.
SeLayers colored_layers(const BitMatrix &h, size_t base) {
    auto [colors, num] = edge_coloring(h);
    SeLayers layers(num);
    size_t e = 0;
    for (size_t q = 0; q < h.cols(); ++q) {
        for (size_t r = 0; r < h.rows(); ++r) {
            if (h.get(r, q)) layers[colors[e++]].emplace_back(base + r, q);
        }
    }
    for (auto &layer : layers) std::sort(layer.begin(), layer.end());
    return layers;
}

// Color of every edge of a classical check matrix, indexed [row][col].
std::vector<std::vector<size_t>> color_table(const BitMatrix &h, size_t &num) {
    auto [colors, n] = edge_coloring(h);
    num = n;
    std::vector<std::vector<size_t>> t(h.rows(), std::vector<size_t>(h.cols(), SIZE_MAX));
    size_t e = 0;
    for (size_t q = 0; q < h.cols(); ++q) {
        for (size_t r = 0; r < h.rows(); ++r) {
            if (h.get(r, q)) t[r][q] = colors[e++];
        }
    }
    return t;
}

SeLayers product_layers(const CssCode &code, const BitMatrix &h1, const BitMatrix &h2) {
    CssCode check = build_hgp({h1, h2});
    if (check.hx != code.hx || check.hz != code.hz) {
        throw std::invalid_argument("product_coloration: code is not the product of the given checks");
    }
    size_t r1 = h1.rows(), n1 = h1.cols(), r2 = h2.rows(), n2 = h2.cols();
    size_t d1 = 0, d2 = 0;
    auto c1 = color_table(h1, d1);
    auto c2 = color_table(h2, d2);
    size_t mx = code.hx.rows();
    SeLayers layers(2 * (d1 + d2));
    // X check (a, j): left qubits (i, j) by the color of h1 edge (a, i), then
    // right qubits (a, b) by the color of h2 edge (b, j).
    for (size_t a = 0; a < r1; ++a) {
        for (size_t j = 0; j < n2; ++j) {
            size_t s = a * n2 + j;
            for (size_t i = 0; i < n1; ++i) {
                if (h1.get(a, i)) layers[c1[a][i]].emplace_back(s, i * n2 + j);
            }
            for (size_t b = 0; b < r2; ++b) {
                if (h2.get(b, j)) layers[d1 + c2[b][j]].emplace_back(s, n1 * n2 + a * r2 + b);
            }
        }
    }
    // Z check (i, b): left qubits (i, j) by h2 edge (b, j), right (a, b) by h1 edge (a, i).
    size_t off = d1 + d2;
    for (size_t i = 0; i < n1; ++i) {
        for (size_t b = 0; b < r2; ++b) {
            size_t s = mx + i * r2 + b;
            for (size_t j = 0; j < n2; ++j) {
                if (h2.get(b, j)) layers[off + c2[b][j]].emplace_back(s, i * n2 + j);
            }
            for (size_t a = 0; a < r1; ++a) {
                if (h1.get(a, i)) layers[off + d2 + c1[a][i]].emplace_back(s, n1 * n2 + a * r2 + b);
            }
        }
    }
    for (auto &layer : layers) std::sort(layer.begin(), layer.end());
    return layers;
}

}  // namespace

SeLayers se_layers(const CssCode &code, const ScheduleSpec &schedule) {
    SeLayers layers;
    switch (schedule.kind) {
        case ScheduleKind::EdgeColoring: {
            layers = colored_layers(code.hx, 0);
            SeLayers z = colored_layers(code.hz, code.hx.rows());
            layers.insert(layers.end(), z.begin(), z.end());
            break;
        }
        case ScheduleKind::ProductColoration:
            layers = product_layers(code, schedule.h1, schedule.h2);
            break;
        case ScheduleKind::Explicit:
            layers = schedule.layers;
            break;
    }
    validate_layers(code, layers);
    return layers;
}

void validate_layers(const CssCode &code, const SeLayers &layers) {
    size_t mx = code.hx.rows(), m = code.num_stabilizers();
    std::set<std::pair<size_t, size_t>> seen;
    bool z_started = false;
    for (size_t l = 0; l < layers.size(); ++l) {
        std::set<size_t> stabs, qubits;
        bool has_x = false, has_z = false;
        for (auto [s, q] : layers[l]) {
            if (s >= m || q >= code.n) throw std::invalid_argument("schedule: edge out of range");
            bool on = s < mx ? code.hx.get(s, q) : code.hz.get(s - mx, q);
            if (!on) throw std::invalid_argument("schedule: edge not in a stabilizer support");
            if (!seen.insert({s, q}).second) throw std::invalid_argument("schedule: edge scheduled twice");
            if (!stabs.insert(s).second || !qubits.insert(q).second) {
                throw std::invalid_argument("schedule: qubit used twice in layer " + std::to_string(l));
            }
            (s < mx ? has_x : has_z) = true;
        }
        if (has_x && z_started) throw std::invalid_argument("schedule: X-check layer after a Z-check layer");
        z_started = z_started || has_z;
    }
    size_t total = 0;
    for (size_t r = 0; r < code.hx.rows(); ++r) total += code.hx.row(r).popcount();
    for (size_t r = 0; r < code.hz.rows(); ++r) total += code.hz.row(r).popcount();
    if (seen.size() != total) throw std::invalid_argument("schedule: missing stabilizer edges");
}

namespace {

struct Step {
    std::vector<uint32_t> rx, ry, rz, cx, mx, mz, mx_stab, mz_stab;
    std::vector<uint8_t> busy, active;
};

// Preparation fused into a round: per data qubit its reset basis, plus the
// Bell pairs.
struct FusedPrep {
    std::vector<Basis> basis;
    std::vector<std::pair<size_t, size_t>> bell;
};

// Emits one round and returns the measurement index of every stabilizer.
std::vector<uint32_t> emit_round(Circuit &c, const CssCode &code, const SeLayers &layers, const FusedPrep *prep) {
    size_t n = code.n, mx = code.hx.rows(), m = code.num_stabilizers(), nq = n + m;
    size_t nl = layers.size();
    std::vector<size_t> first(m, SIZE_MAX), last(m, 0), first_q(n, SIZE_MAX);
    for (size_t l = 0; l < nl; ++l) {
        for (auto [s, q] : layers[l]) {
            first[s] = std::min(first[s], l);
            last[s] = std::max(last[s], l);
            first_q[q] = std::min(first_q[q], l + 1);
        }
    }
    // Round-local steps: 0 resets, 1..nl CX layers, nl + 1 measurements.
    size_t offset = 0;
    std::vector<size_t> data_start(n, 0);
    if (prep) {
        for (size_t q = 0; q < n; ++q) {
            if (first_q[q] == SIZE_MAX) first_q[q] = nl + 1;
        }
        for (auto [u, v] : prep->bell) {
            size_t t = std::min(first_q[u], first_q[v]);
            if (t < 2) offset = std::max(offset, 2 - t);
        }
    }
    std::vector<Step> steps(offset + nl + 2);
    for (auto &st : steps) {
        st.busy.assign(nq, 0);
        st.active.assign(nq, 0);
    }
    auto at = [&](size_t local) -> Step & { return steps[offset + local]; };
    auto mark = [&](Step &st, uint32_t q) {
        if (st.busy[q]) throw std::logic_error("circuitgen: qubit scheduled twice in a step");
        st.busy[q] = 1;
    };
    for (size_t s = 0; s < m; ++s) {
        uint32_t a = uint32_t(n + s);
        size_t f = first[s] == SIZE_MAX ? 0 : first[s], l = first[s] == SIZE_MAX ? 0 : last[s] + 1;
        Step &rs = at(f);
        (s < mx ? rs.rx : rs.rz).push_back(a);
        mark(rs, a);
        Step &ms = at(l + 1);
        (s < mx ? ms.mx : ms.mz).push_back(a);
        (s < mx ? ms.mx_stab : ms.mz_stab).push_back(uint32_t(s));
        mark(ms, a);
        for (size_t t = f; t <= l + 1; ++t) at(t).active[a] = 1;
    }
    for (size_t l = 0; l < nl; ++l) {
        Step &st = at(l + 1);
        for (auto [s, q] : layers[l]) {
            uint32_t a = uint32_t(n + s);
            if (s < mx) {
                st.cx.insert(st.cx.end(), {a, uint32_t(q)});
            } else {
                st.cx.insert(st.cx.end(), {uint32_t(q), a});
            }
            mark(st, a);
            mark(st, uint32_t(q));
        }
    }
    if (prep) {
        std::vector<bool> in_bell(n, false);
        for (auto [u, v] : prep->bell) {
            size_t t = offset + std::min(first_q[u], first_q[v]);
            Step &rs = steps[t - 2];
            rs.rx.push_back(uint32_t(u));
            rs.rz.push_back(uint32_t(v));
            mark(rs, uint32_t(u));
            mark(rs, uint32_t(v));
            Step &cs = steps[t - 1];
            cs.cx.insert(cs.cx.end(), {uint32_t(u), uint32_t(v)});
            mark(cs, uint32_t(u));
            mark(cs, uint32_t(v));
            in_bell[u] = in_bell[v] = true;
            data_start[u] = data_start[v] = t - 2;
        }
        for (size_t q = 0; q < n; ++q) {
            if (in_bell[q]) continue;
            size_t t = offset + first_q[q] - 1;
            Step &rs = steps[t];
            switch (prep->basis[q]) {
                case Basis::X:
                    rs.rx.push_back(uint32_t(q));
                    break;
                case Basis::Y:
                    rs.ry.push_back(uint32_t(q));
                    break;
                case Basis::Z:
                    rs.rz.push_back(uint32_t(q));
                    break;
                case Basis::Free:
                    throw std::invalid_argument("injection circuit: basis map incomplete");
            }
            mark(rs, uint32_t(q));
            data_start[q] = t;
        }
    }
    for (size_t q = 0; q < n; ++q) {
        for (size_t t = data_start[q]; t < steps.size(); ++t) steps[t].active[q] = 1;
    }
    std::vector<uint32_t> meas(m, 0);
    for (auto &st : steps) {
        for (auto &v : {&st.rx, &st.ry, &st.rz}) std::sort(v->begin(), v->end());
        if (!st.rx.empty()) c.append(Op::RX, st.rx);
        if (!st.ry.empty()) c.append(Op::RY, st.ry);
        if (!st.rz.empty()) c.append(Op::RZ, st.rz);
        if (!st.cx.empty()) c.append(Op::CX, st.cx);
        if (!st.mx.empty()) {
            size_t base = c.append(Op::MX, st.mx);
            for (size_t i = 0; i < st.mx.size(); ++i) meas[st.mx_stab[i]] = uint32_t(base + i);
        }
        if (!st.mz.empty()) {
            size_t base = c.append(Op::MZ, st.mz);
            for (size_t i = 0; i < st.mz.size(); ++i) meas[st.mz_stab[i]] = uint32_t(base + i);
        }
        std::vector<uint32_t> idle;
        for (uint32_t q = 0; q < nq; ++q) {
            if (st.active[q] && !st.busy[q]) idle.push_back(q);
        }
        if (!idle.empty()) c.append(Op::I, idle);
        c.append_tick();
    }
    return meas;
}

}  // namespace

Circuit build_se_round(const CssCode &code, const ScheduleSpec &schedule) {
    Circuit c(code.n, code.num_stabilizers());
    emit_round(c, code, se_layers(code, schedule), nullptr);
    return c;
}

PauliTerm logical_y(const CssCode &code, size_t i) {
    PauliTerm y = code.logical_x.at(i);
    y *= code.logical_z.at(i);
    y.set_phase(y.phase() + 1);
    return y;
}

Circuit build_injection_circuit(const CssCode &code, const PreparationPlan &plan, const InitialConfiguration &init,
                                size_t r2, const ScheduleSpec &schedule) {
    if (init.basis.size() != code.n || plan.n != code.n) throw std::invalid_argument("injection circuit: size mismatch");
    for (Basis b : init.basis) {
        if (b == Basis::Free) throw std::invalid_argument("injection circuit: basis map incomplete");
    }
    for (size_t a = 0; a < plan.config.sites.size(); ++a) {
        if (init.basis[plan.config.sites[a]] != Basis::Y) {
            throw std::invalid_argument("injection circuit: site without a Y preparation");
        }
    }
    SeLayers layers = se_layers(code, schedule);
    size_t m = code.num_stabilizers(), mx = code.hx.rows();
    Circuit c(code.n, m);
    FusedPrep prep{init.basis, plan.bell.pairs};
    auto m1 = emit_round(c, code, layers, &prep);
    for (size_t r : init.fixed_x) c.append_detector(DetectorLabel::Fixed, {m1[r]});
    for (size_t r : init.fixed_z) c.append_detector(DetectorLabel::Fixed, {m1[mx + r]});
    auto prev = m1;
    for (size_t round = 2; round <= 2 + r2; ++round) {
        auto cur = emit_round(c, code, layers, nullptr);
        DetectorLabel label = round == 2 ? DetectorLabel::RoundParity : DetectorLabel::Bulk;
        for (size_t s = 0; s < m; ++s) c.append_detector(label, {prev[s], cur[s]});
        prev = cur;
    }
    c.append_ideal_marker();
    auto last = emit_round(c, code, layers, nullptr);
    for (size_t s = 0; s < m; ++s) c.append_detector(DetectorLabel::Bulk, {prev[s], last[s]});
    for (size_t k = 0; k < plan.config.injected.size(); ++k) {
        PauliTerm y = logical_y(code, plan.config.injected[k]);
        PauliTerm full(c.num_qubits());
        for (size_t q = 0; q < code.n; ++q) full.set_letter(q, y.letter(q));
        if (!y.is_hermitian()) throw std::logic_error("injection circuit: logical Y not Hermitian");
        full.set_phase(y.phase());
        size_t idx = c.append_mpp(full);
        c.append_observable(uint32_t(k), {uint32_t(idx)});
    }
    return c;
}

}  // namespace msi
