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

#include "msi/circuit.h"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace msi {

const char *op_name(Op op) {
    switch (op) {
        case Op::RX: return "RX";
        case Op::RY: return "RY";
        case Op::RZ: return "RZ";
        case Op::H: return "H";
        case Op::S: return "S";
        case Op::CX: return "CX";
        case Op::MX: return "MX";
        case Op::MZ: return "MZ";
        case Op::MPP: return "MPP";
        case Op::I: return "I";
        case Op::TICK: return "TICK";
        case Op::NOISE: return "NOISE";
        case Op::DETECTOR: return "DETECTOR";
        case Op::OBSERVABLE: return "OBSERVABLE";
        case Op::IDEAL: return "IDEAL";
    }
    return "?";
}

const char *noise_name(NoiseKind k) {
    switch (k) {
        case NoiseKind::XERR: return "XERR";
        case NoiseKind::ZERR: return "ZERR";
        case NoiseKind::MERR: return "MERR";
        case NoiseKind::DEP1: return "DEP1";
        case NoiseKind::DEP2: return "DEP2";
    }
    return "?";
}

const char *label_name(DetectorLabel l) {
    switch (l) {
        case DetectorLabel::Fixed: return "fixed";
        case DetectorLabel::RoundParity: return "round-parity";
        case DetectorLabel::Bulk: return "bulk";
    }
    return "?";
}

namespace {

void check_probability(double p) {
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument("noise probability outside [0,1]");
}

bool is_measurement(Op op) { return op == Op::MX || op == Op::MZ; }

// Shortest decimal text that parses back to the same double.
std::string format_double(double v) {
    char buf[40];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

}  // namespace

NoiseModel uniform_model(double p) {
    check_probability(p);
    return NoiseModel{p, p, p, p, p};
}

NoiseModel asymmetric_model(double p) {
    check_probability(p);
    double q = 0.1 * p;
    return NoiseModel{q, q, q, q, p};
}

void Circuit::push(Instruction ins) {
    size_t nq = num_qubits();
    for (uint32_t t : ins.targets) {
        if (t >= nq) throw std::out_of_range("circuit: qubit target out of range");
    }
    switch (ins.op) {
        case Op::CX:
            if (ins.targets.size() % 2) throw std::invalid_argument("circuit: CX needs target pairs");
            for (size_t k = 0; k < ins.targets.size(); k += 2) {
                if (ins.targets[k] == ins.targets[k + 1]) throw std::invalid_argument("circuit: CX on one qubit");
            }
            break;
        case Op::MX:
        case Op::MZ:
            num_meas_ += ins.targets.size();
            break;
        case Op::MPP:
            if (ins.pauli.num_qubits() != nq) throw std::invalid_argument("circuit: MPP width mismatch");
            if (!ins.pauli.is_hermitian()) throw std::invalid_argument("circuit: MPP must be Hermitian");
            ++num_meas_;
            break;
        case Op::NOISE:
            check_probability(ins.p);
            if (ins.noise == NoiseKind::DEP2 && ins.targets.size() % 2) {
                throw std::invalid_argument("circuit: DEP2 needs target pairs");
            }
            break;
        case Op::DETECTOR:
        case Op::OBSERVABLE:
            for (uint32_t m : ins.meas) {
                if (m >= num_meas_) throw std::invalid_argument("circuit: annotation refers to a future measurement");
            }
            if (ins.op == Op::DETECTOR) {
                ++num_det_;
            } else {
                num_obs_ = std::max<size_t>(num_obs_, ins.index + 1);
            }
            break;
        default:
            break;
    }
    ins_.push_back(std::move(ins));
}

size_t Circuit::append(Op op, std::vector<uint32_t> targets) {
    size_t first = is_measurement(op) ? num_meas_ : SIZE_MAX;
    Instruction ins;
    ins.op = op;
    ins.targets = std::move(targets);
    push(std::move(ins));
    return first;
}

size_t Circuit::append_mpp(const PauliTerm &p) {
    size_t first = num_meas_;
    Instruction ins;
    ins.op = Op::MPP;
    ins.pauli = p;
    push(std::move(ins));
    return first;
}

void Circuit::append_noise(NoiseKind kind, double p, std::vector<uint32_t> targets) {
    Instruction ins;
    ins.op = Op::NOISE;
    ins.noise = kind;
    ins.p = p;
    ins.targets = std::move(targets);
    push(std::move(ins));
}

size_t Circuit::append_detector(DetectorLabel label, std::vector<uint32_t> meas) {
    Instruction ins;
    ins.op = Op::DETECTOR;
    ins.label = label;
    ins.meas = std::move(meas);
    push(std::move(ins));
    return num_det_ - 1;
}

void Circuit::append_observable(uint32_t index, std::vector<uint32_t> meas) {
    Instruction ins;
    ins.op = Op::OBSERVABLE;
    ins.index = index;
    ins.meas = std::move(meas);
    push(std::move(ins));
}

std::vector<DetectorLabel> Circuit::detector_labels() const {
    std::vector<DetectorLabel> out;
    for (const auto &ins : ins_) {
        if (ins.op == Op::DETECTOR) out.push_back(ins.label);
    }
    return out;
}

Circuit Circuit::without_noise() const {
    Circuit out(n_data_, n_ancilla_);
    for (const auto &ins : ins_) {
        if (ins.op != Op::NOISE) out.push(ins);
    }
    return out;
}

bool Circuit::has_noise() const {
    return std::any_of(ins_.begin(), ins_.end(), [](const Instruction &i) { return i.op == Op::NOISE; });
}

std::string Circuit::to_text() const {
    std::ostringstream out;
    out << "QUBITS " << n_data_ << " " << n_ancilla_ << "\n";
    for (const auto &ins : ins_) {
        switch (ins.op) {
            case Op::TICK:
            case Op::IDEAL:
                out << op_name(ins.op);
                break;
            case Op::NOISE:
                out << "NOISE " << noise_name(ins.noise) << " " << format_double(ins.p);
                for (uint32_t t : ins.targets) out << " " << t;
                break;
            case Op::DETECTOR:
                out << "DETECTOR " << label_name(ins.label);
                for (uint32_t m : ins.meas) out << " m[" << m << "]";
                break;
            case Op::OBSERVABLE:
                out << "OBSERVABLE " << ins.index;
                for (uint32_t m : ins.meas) out << " m[" << m << "]";
                break;
            case Op::MPP: {
                out << "MPP " << (ins.pauli.sign() < 0 ? "-" : "+");
                bool first = true;
                for (size_t q = 0; q < ins.pauli.num_qubits(); ++q) {
                    char c = ins.pauli.letter(q);
                    if (c == 'I') continue;
                    if (!first) out << "*";
                    out << c << q;
                    first = false;
                }
                break;
            }
            default:
                out << op_name(ins.op);
                for (uint32_t t : ins.targets) out << " " << t;
        }
        out << "\n";
    }
    return out.str();
}

namespace {

Op parse_op(const std::string &name) {
    static const Op all[] = {Op::RX, Op::RY, Op::RZ, Op::H, Op::S, Op::CX, Op::MX, Op::MZ,
                             Op::MPP, Op::I, Op::TICK, Op::NOISE, Op::DETECTOR, Op::OBSERVABLE, Op::IDEAL};
    for (Op op : all) {
        if (name == op_name(op)) return op;
    }
    throw std::invalid_argument("circuit text: unknown op " + name);
}

NoiseKind parse_noise(const std::string &name) {
    static const NoiseKind all[] = {NoiseKind::XERR, NoiseKind::ZERR, NoiseKind::MERR, NoiseKind::DEP1,
                                    NoiseKind::DEP2};
    for (NoiseKind k : all) {
        if (name == noise_name(k)) return k;
    }
    throw std::invalid_argument("circuit text: unknown noise " + name);
}

DetectorLabel parse_label(const std::string &name) {
    for (DetectorLabel l : {DetectorLabel::Fixed, DetectorLabel::RoundParity, DetectorLabel::Bulk}) {
        if (name == label_name(l)) return l;
    }
    throw std::invalid_argument("circuit text: unknown detector label " + name);
}

uint32_t parse_meas_ref(const std::string &tok) {
    if (tok.size() < 4 || tok.compare(0, 2, "m[") != 0 || tok.back() != ']') {
        throw std::invalid_argument("circuit text: bad measurement reference " + tok);
    }
    return (uint32_t)std::stoul(tok.substr(2, tok.size() - 3));
}

}  // namespace

Circuit Circuit::from_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("circuit text: empty");
    std::istringstream head(line);
    std::string kw;
    size_t nd = 0, na = 0;
    if (!(head >> kw >> nd >> na) || kw != "QUBITS") throw std::invalid_argument("circuit text: missing QUBITS header");
    Circuit c(nd, na);
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string name;
        if (!(ls >> name)) continue;
        Instruction ins;
        ins.op = parse_op(name);
        std::string tok;
        switch (ins.op) {
            case Op::NOISE:
                ls >> tok;
                ins.noise = parse_noise(tok);
                ls >> tok;
                ins.p = std::stod(tok);
                while (ls >> tok) ins.targets.push_back((uint32_t)std::stoul(tok));
                break;
            case Op::DETECTOR:
                ls >> tok;
                ins.label = parse_label(tok);
                while (ls >> tok) ins.meas.push_back(parse_meas_ref(tok));
                break;
            case Op::OBSERVABLE:
                ls >> ins.index;
                while (ls >> tok) ins.meas.push_back(parse_meas_ref(tok));
                break;
            case Op::MPP: {
                ls >> tok;
                ins.pauli = PauliTerm(c.num_qubits());
                if (tok.empty() || (tok[0] != '+' && tok[0] != '-')) throw std::invalid_argument("circuit text: MPP sign");
                if (tok[0] == '-') ins.pauli.set_phase(2);
                std::string body = tok.substr(1);
                size_t pos = 0;
                while (pos < body.size()) {
                    size_t star = body.find('*', pos);
                    std::string factor = body.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
                    if (factor.size() < 2) throw std::invalid_argument("circuit text: bad MPP factor");
                    size_t q = std::stoul(factor.substr(1));
                    if (q >= c.num_qubits()) throw std::out_of_range("circuit text: MPP qubit out of range");
                    ins.pauli.set_letter(q, factor[0]);
                    if (star == std::string::npos) break;
                    pos = star + 1;
                }
                break;
            }
            default:
                while (ls >> tok) ins.targets.push_back((uint32_t)std::stoul(tok));
        }
        c.push(std::move(ins));
    }
    return c;
}

Circuit apply_noise(const Circuit &circuit, const NoiseModel &model) {
    if (circuit.has_noise()) throw std::invalid_argument("apply_noise: circuit already has noise");
    Circuit out(circuit.n_data(), circuit.n_ancilla());
    bool ideal = false;
    for (const auto &ins : circuit.instructions()) {
        out.push(ins);
        if (ins.op == Op::IDEAL) ideal = true;
        if (ideal) continue;
        switch (ins.op) {
            case Op::RX: out.append_noise(NoiseKind::ZERR, model.p_in, ins.targets); break;
            case Op::RY:
            case Op::RZ: out.append_noise(NoiseKind::XERR, model.p_in, ins.targets); break;
            case Op::MX:
            case Op::MZ: out.append_noise(NoiseKind::MERR, model.p_m, ins.targets); break;
            case Op::H:
            case Op::S: out.append_noise(NoiseKind::DEP1, model.p_1q, ins.targets); break;
            case Op::CX: out.append_noise(NoiseKind::DEP2, model.p_2q, ins.targets); break;
            case Op::I: out.append_noise(NoiseKind::DEP1, model.p_idle, ins.targets); break;
            default: break;
        }
    }
    return out;
}

CircuitVolume circuit_volume(const Circuit &circuit) {
    CircuitVolume v;
    v.qubits = circuit.num_qubits();
    std::vector<size_t> count(v.qubits, 0);
    for (const auto &ins : circuit.instructions()) {
        if (ins.op == Op::IDEAL) break;
        if (ins.op != Op::CX) continue;
        for (uint32_t t : ins.targets) ++count[t];
    }
    for (size_t c : count) v.critical_path_2q = std::max(v.critical_path_2q, c);
    v.volume = v.qubits * v.critical_path_2q;
    return v;
}

}  // namespace msi
