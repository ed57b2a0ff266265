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

#include "msi/tableau.h"

#include <stdexcept>

namespace msi {

void conj_h(PauliTerm &p, size_t q) {
    bool x = p.xs().get(q), z = p.zs().get(q);
    if (x && z) p.set_phase(p.phase() + 2);
    p.xs().set(q, z);
    p.zs().set(q, x);
}

void conj_s(PauliTerm &p, size_t q) {
    bool x = p.xs().get(q), z = p.zs().get(q);
    if (x && z) p.set_phase(p.phase() + 2);
    p.zs().set(q, z ^ x);
}

void conj_cx(PauliTerm &p, size_t c, size_t t) {
    bool xc = p.xs().get(c), zc = p.zs().get(c), xt = p.xs().get(t), zt = p.zs().get(t);
    if (xc && zt && (xt == zc)) p.set_phase(p.phase() + 2);
    p.xs().set(t, xt ^ xc);
    p.zs().set(c, zc ^ zt);
}

PauliTerm conjugate_by(const Circuit &circuit, PauliTerm p) {
    for (const auto &ins : circuit.instructions()) {
        switch (ins.op) {
            case Op::H:
                for (uint32_t q : ins.targets) conj_h(p, q);
                break;
            case Op::S:
                for (uint32_t q : ins.targets) conj_s(p, q);
                break;
            case Op::CX:
                for (size_t k = 0; k < ins.targets.size(); k += 2) conj_cx(p, ins.targets[k], ins.targets[k + 1]);
                break;
            case Op::TICK:
                break;
            default:
                throw std::invalid_argument(std::string("conjugate_by: unsupported op ") + op_name(ins.op));
        }
    }
    return p;
}

Tableau::Tableau(size_t n, uint64_t seed) : n_(n), rng_(seed) {
    for (size_t q = 0; q < n; ++q) {
        stab_.push_back(PauliTerm::single(n, q, 'Z'));
        destab_.push_back(PauliTerm::single(n, q, 'X'));
    }
}

void Tableau::h(size_t q) {
    for (auto &r : stab_) conj_h(r, q);
    for (auto &r : destab_) conj_h(r, q);
}

void Tableau::s(size_t q) {
    for (auto &r : stab_) conj_s(r, q);
    for (auto &r : destab_) conj_s(r, q);
}

void Tableau::cx(size_t c, size_t t) {
    for (auto &r : stab_) conj_cx(r, c, t);
    for (auto &r : destab_) conj_cx(r, c, t);
}

void Tableau::apply_pauli(const PauliTerm &p) {
    for (auto &r : stab_) {
        if (anticommutes(r, p)) r.set_phase(r.phase() + 2);
    }
}

PauliTerm Tableau::deterministic_product(const PauliTerm &p) const {
    PauliTerm acc(n_);
    for (size_t i = 0; i < n_; ++i) {
        if (anticommutes(destab_[i], p)) acc *= stab_[i];
    }
    return acc;
}

MeasureResult Tableau::measure(const PauliTerm &p, std::optional<bool> forced) {
    if (p.num_qubits() != n_) throw std::invalid_argument("Tableau::measure: width mismatch");
    if (!p.is_hermitian()) throw std::invalid_argument("Tableau::measure: non-Hermitian observable");
    size_t piv = n_;
    for (size_t i = 0; i < n_; ++i) {
        if (anticommutes(stab_[i], p)) {
            piv = i;
            break;
        }
    }
    if (piv == n_) {
        PauliTerm acc = deterministic_product(p);
        return {acc.phase() != p.phase(), true};
    }
    for (size_t i = 0; i < n_; ++i) {
        if (i != piv && anticommutes(stab_[i], p)) stab_[i] *= stab_[piv];
        if (i != piv && anticommutes(destab_[i], p)) destab_[i] *= stab_[piv];
    }
    bool outcome = forced.has_value() ? *forced : (rng_() & 1);
    destab_[piv] = stab_[piv];
    stab_[piv] = p;
    stab_[piv].set_phase(p.phase() + (outcome ? 2 : 0));
    return {outcome, false};
}

MeasureResult Tableau::measure_z(size_t q, std::optional<bool> forced) {
    return measure(PauliTerm::single(n_, q, 'Z'), forced);
}

MeasureResult Tableau::measure_x(size_t q, std::optional<bool> forced) {
    return measure(PauliTerm::single(n_, q, 'X'), forced);
}

void Tableau::reset_z(size_t q) {
    if (measure_z(q).outcome) apply_pauli(PauliTerm::single(n_, q, 'X'));
}

void Tableau::reset_x(size_t q) {
    reset_z(q);
    h(q);
}

void Tableau::reset_y(size_t q) {
    reset_z(q);
    h(q);
    s(q);
}

std::optional<int> Tableau::expectation(const PauliTerm &p) const {
    for (const auto &r : stab_) {
        if (anticommutes(r, p)) return std::nullopt;
    }
    return deterministic_product(p).phase() == p.phase() ? 1 : -1;
}

TableauRun tableau_run(const Circuit &circuit, uint64_t seed, const InjectedFault *fault) {
    Tableau t(circuit.num_qubits(), seed);
    TableauRun run;
    run.observables.assign(circuit.num_observables(), 0);
    auto record = [&](MeasureResult r) {
        run.record.push_back(r.outcome);
        run.deterministic.push_back(r.deterministic);
    };
    const auto &ins_list = circuit.instructions();
    for (size_t idx = 0; idx < ins_list.size(); ++idx) {
        const Instruction &ins = ins_list[idx];
        switch (ins.op) {
            case Op::RX:
                for (uint32_t q : ins.targets) t.reset_x(q);
                break;
            case Op::RY:
                for (uint32_t q : ins.targets) t.reset_y(q);
                break;
            case Op::RZ:
                for (uint32_t q : ins.targets) t.reset_z(q);
                break;
            case Op::H:
                for (uint32_t q : ins.targets) t.h(q);
                break;
            case Op::S:
                for (uint32_t q : ins.targets) t.s(q);
                break;
            case Op::CX:
                for (size_t k = 0; k < ins.targets.size(); k += 2) t.cx(ins.targets[k], ins.targets[k + 1]);
                break;
            case Op::MX:
                for (uint32_t q : ins.targets) record(t.measure_x(q));
                break;
            case Op::MZ:
                for (uint32_t q : ins.targets) record(t.measure_z(q));
                break;
            case Op::MPP:
                record(t.measure(ins.pauli));
                break;
            case Op::DETECTOR: {
                uint8_t v = 0;
                for (uint32_t m : ins.meas) v ^= run.record[m];
                run.detectors.push_back(v);
                break;
            }
            case Op::OBSERVABLE:
                for (uint32_t m : ins.meas) run.observables[ins.index] ^= run.record[m];
                break;
            default:
                break;
        }
        if (fault && fault->after == idx) {
            if (!fault->flip.empty()) {
                for (size_t m : fault->flip) run.record.at(m) ^= 1;
            } else {
                t.apply_pauli(fault->pauli);
            }
        }
    }
    return run;
}

}  // namespace msi
