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


#include "msi/analysis.h"

#include <bit>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "msi/frame.h"
#include "msi/tableau.h"

namespace msi {

namespace {

std::string format_double(double v) {
    char buf[40];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

struct Fault {
    size_t site = 0;
    size_t outcome = 0;
    double p = 0;
};

std::vector<Fault> list_faults(const FrameProgram &prog) {
    std::vector<Fault> faults;
    for (size_t s = 0; s < prog.sites.size(); ++s) {
        size_t k = noise_outcomes(prog.sites[s].kind);
        double p = prog.sites[s].p / double(k);
        if (p <= 0) continue;
        for (size_t o = 0; o < k; ++o) faults.push_back({s, o, p});
    }
    return faults;
}

}  // namespace

std::vector<Mechanism> elementary_mechanisms(const Circuit &noisy) {
    FrameProgram prog = compile_frame_program(noisy);
    std::vector<Fault> faults = list_faults(prog);
    std::vector<Mechanism> out(faults.size());
    FrameState f(prog.num_qubits, prog.num_measurements);
    for (size_t begin = 0; begin < faults.size(); begin += 64) {
        size_t end = std::min(faults.size(), begin + 64);
        f.clear();
        size_t next = begin;
        for (size_t pos = prog.sites[faults[begin].site].op; pos < prog.ops.size(); ++pos) {
            const FrameOp &op = prog.ops[pos];
            if (op.kind != FrameOp::Noise) {
                frame_apply(prog, op, f);
                continue;
            }
            while (next < end && faults[next].site == op.index) {
                const NoiseSite &s = prog.sites[op.index];
                uint64_t lane = uint64_t(1) << (next - begin);
                if (s.kind == NoiseKind::MERR) {
                    f.meas[s.meas] ^= lane;
                } else {
                    auto [l1, l2] = noise_outcome(s.kind, faults[next].outcome);
                    frame_inject(f, s.a, l1, lane);
                    if (s.kind == NoiseKind::DEP2) frame_inject(f, s.b, l2, lane);
                }
                ++next;
            }
        }
        for (size_t d = 0; d < prog.detectors.size(); ++d) {
            for (uint64_t w = frame_parity(f, prog.detectors[d]); w; w &= w - 1) {
                out[begin + std::countr_zero(w)].dets.push_back(uint32_t(d));
            }
        }
        for (size_t o = 0; o < prog.observables.size(); ++o) {
            for (uint64_t w = frame_parity(f, prog.observables[o]); w; w &= w - 1) {
                out[begin + std::countr_zero(w)].obs |= uint64_t(1) << o;
            }
        }
        for (size_t i = begin; i < end; ++i) out[i].p = faults[i].p;
    }
    return out;
}

std::vector<Mechanism> merge_mechanisms(std::vector<Mechanism> list) {
    std::map<std::pair<std::vector<uint32_t>, uint64_t>, double> merged;
    for (auto &m : list) {
        if (m.dets.empty() && m.obs == 0) continue;
        std::sort(m.dets.begin(), m.dets.end());
        auto [it, fresh] = merged.emplace(std::make_pair(std::move(m.dets), m.obs), m.p);
        if (!fresh) it->second = xor_probability(it->second, m.p);
    }
    std::vector<Mechanism> out;
    out.reserve(merged.size());
    for (auto &[key, p] : merged) out.push_back({p, key.first, key.second});
    return out;
}

Dem build_dem(const Circuit &noisy) {
    Dem dem;
    dem.num_detectors = noisy.num_detectors();
    dem.num_observables = noisy.num_observables();
    dem.labels = noisy.detector_labels();
    if (dem.num_observables > 64) throw std::invalid_argument("build_dem: more than 64 observables");
    dem.mechanisms = merge_mechanisms(elementary_mechanisms(noisy));
    return dem;
}

std::string Dem::to_text() const {
    std::ostringstream os;
    os << "# dem detectors " << num_detectors << " observables " << num_observables << "\n";
    for (size_t d = 0; d < labels.size(); ++d) os << "detector D" << d << " " << label_name(labels[d]) << "\n";
    for (const auto &m : mechanisms) {
        os << "error(" << format_double(m.p) << ")";
        for (uint32_t d : m.dets) os << " D" << d;
        for (size_t o = 0; o < 64; ++o) {
            if (m.obs >> o & 1) os << " L" << o;
        }
        os << "\n";
    }
    return os.str();
}

Dem Dem::from_text(std::string_view text) {
    Dem dem;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "#") {
            std::string w1, w2;
            ls >> tok >> w1 >> dem.num_detectors >> w2 >> dem.num_observables;
            if (tok != "dem" || w1 != "detectors" || w2 != "observables") throw std::invalid_argument("dem: bad header");
            header = true;
        } else if (tok == "detector") {
            std::string d, label;
            ls >> d >> label;
            if (d != "D" + std::to_string(dem.labels.size())) throw std::invalid_argument("dem: detector out of order");
            if (label == "fixed") dem.labels.push_back(DetectorLabel::Fixed);
            else if (label == "round-parity") dem.labels.push_back(DetectorLabel::RoundParity);
            else if (label == "bulk") dem.labels.push_back(DetectorLabel::Bulk);
            else throw std::invalid_argument("dem: bad label " + label);
        } else if (tok.rfind("error(", 0) == 0 && tok.back() == ')') {
            Mechanism m;
            m.p = std::stod(tok.substr(6, tok.size() - 7));
            while (ls >> tok) {
                if (tok.size() < 2) throw std::invalid_argument("dem: bad target " + tok);
                unsigned long v = std::stoul(tok.substr(1));
                if (tok[0] == 'D') m.dets.push_back(uint32_t(v));
                else if (tok[0] == 'L' && v < 64) m.obs |= uint64_t(1) << v;
                else throw std::invalid_argument("dem: bad target " + tok);
            }
            dem.mechanisms.push_back(std::move(m));
        } else {
            throw std::invalid_argument("dem: bad line " + line);
        }
    }
    if (!header) throw std::invalid_argument("dem: missing header");
    return dem;
}

std::vector<uint32_t> postselection_detectors(const Dem &dem) {
    std::vector<uint32_t> p;
    for (size_t d = 0; d < dem.labels.size(); ++d) {
        if (dem.labels[d] != DetectorLabel::Bulk) p.push_back(uint32_t(d));
    }
    return p;
}

namespace {

void finish(FirstOrderReport &r) {
    r.p_tot = r.p_corr = 0;
    for (auto [mask, p] : r.p_by_subset) {
        r.p_tot += p;
        if (std::popcount(mask) > 1) r.p_corr += p;
    }
}

}  // namespace

FirstOrderReport first_order(const Dem &dem, const std::vector<uint32_t> &postselect, FirstOrderMode mode) {
    FirstOrderReport r;
    r.num_logicals = dem.num_observables;
    std::vector<bool> in_p(dem.num_detectors, false);
    for (uint32_t d : postselect) in_p.at(d) = true;
    const auto &ms = dem.mechanisms;
    for (size_t i = 0; i < ms.size(); ++i) {
        const auto &m = ms[i];
        if (m.dets.empty()) {
            if (m.obs) r.p_by_subset[m.obs] += m.p;
            continue;
        }
        if (mode == FirstOrderMode::Undetectable) continue;
        bool hits_p = false;
        for (uint32_t d : m.dets) hits_p = hits_p || in_p[d];
        if (hits_p) continue;
        // Same-detector mechanisms are adjacent in the sorted list.
        size_t lo = i, hi = i;
        while (lo > 0 && ms[lo - 1].dets == m.dets) --lo;
        while (hi + 1 < ms.size() && ms[hi + 1].dets == m.dets) ++hi;
        size_t best = lo;
        for (size_t j = lo; j <= hi; ++j) {
            if (ms[j].p > ms[best].p) best = j;
        }
        uint64_t residual = m.obs ^ ms[best].obs;
        if (residual) r.p_by_subset[residual] += m.p;
    }
    finish(r);
    return r;
}

FirstOrderReport undetectable_from_mechanisms(const std::vector<Mechanism> &mechanisms, size_t num_logicals) {
    FirstOrderReport r;
    r.num_logicals = num_logicals;
    for (const auto &m : mechanisms) {
        if (m.dets.empty() && m.obs) r.p_by_subset[m.obs] += m.p;
    }
    finish(r);
    return r;
}

DiscardReport discard_proxy(const Dem &dem, const std::vector<uint32_t> &postselect) {
    std::vector<bool> in_p(dem.num_detectors, false);
    for (uint32_t d : postselect) in_p.at(d) = true;
    DiscardReport r;
    for (const auto &m : dem.mechanisms) {
        bool hits_p = false, hits_fixed = false;
        for (uint32_t d : m.dets) {
            if (!in_p[d]) continue;
            hits_p = true;
            hits_fixed = hits_fixed || dem.labels[d] == DetectorLabel::Fixed;
        }
        if (hits_fixed) {
            r.a_fix *= 1 - m.p;
        } else if (hits_p) {
            r.a_par_given_fix *= 1 - m.p;
        }
    }
    r.a = r.a_fix * r.a_par_given_fix;
    r.r_up = 1 - r.a;
    return r;
}

double spacetime_volume(double v_inj, double r_disc, double v_grow) {
    if (!(r_disc >= 0 && r_disc < 1)) throw std::invalid_argument("spacetime_volume: r_disc must be in [0, 1)");
    return v_inj / (1 - r_disc) + v_grow;
}

std::vector<Mechanism> single_fault_oracle(const Circuit &noisy) {
    FrameProgram prog = compile_frame_program(noisy);
    TableauRun ref = tableau_run(noisy, 1);
    std::vector<Mechanism> out;
    size_t nq = noisy.num_qubits();
    for (const Fault &fault : list_faults(prog)) {
        const NoiseSite &s = prog.sites[fault.site];
        InjectedFault inj;
        inj.after = s.instruction;
        inj.pauli = PauliTerm(nq);
        if (s.kind == NoiseKind::MERR) {
            inj.flip = {s.meas};
        } else {
            auto [l1, l2] = noise_outcome(s.kind, fault.outcome);
            inj.pauli.set_letter(s.a, l1);
            if (s.kind == NoiseKind::DEP2) inj.pauli.set_letter(s.b, l2);
        }
        TableauRun run = tableau_run(noisy, 1, &inj);
        Mechanism m;
        m.p = fault.p;
        for (size_t d = 0; d < run.detectors.size(); ++d) {
            if (run.detectors[d] != ref.detectors[d]) m.dets.push_back(uint32_t(d));
        }
        for (size_t o = 0; o < run.observables.size(); ++o) {
            if (run.observables[o] != ref.observables[o]) m.obs |= uint64_t(1) << o;
        }
        out.push_back(std::move(m));
    }
    return merge_mechanisms(std::move(out));
}

std::string first_order_to_json(const FirstOrderReport &r) {
    nlohmann::json j;
    j["num_logicals"] = r.num_logicals;
    j["p_tot"] = r.p_tot;
    j["p_corr"] = r.p_corr;
    j["per_logical"] = r.per_logical();
    nlohmann::json subsets = nlohmann::json::array();
    for (auto [mask, p] : r.p_by_subset) {
        std::vector<size_t> idx;
        for (size_t o = 0; o < 64; ++o) {
            if (mask >> o & 1) idx.push_back(o);
        }
        subsets.push_back({{"subset", idx}, {"p", p}});
    }
    j["p_by_subset"] = subsets;
    return j.dump(1) + "\n";
}

}  // namespace msi
