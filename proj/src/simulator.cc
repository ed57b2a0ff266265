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


#include "msi/simulator.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "msi/frame.h"

namespace msi {

uint64_t ShotBatch::observables(size_t shot) const {
    uint64_t m = 0;
    for (size_t o = 0; o < num_observables; ++o) m |= (obs[o * words + shot / 64] >> (shot % 64) & 1) << o;
    return m;
}

size_t default_workers() {
    if (const char *env = std::getenv("MSI_WORKERS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 0) return size_t(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

void parallel_for(size_t jobs, size_t workers, const std::function<void(size_t job, size_t worker)> &fn) {
    workers = std::max<size_t>(1, std::min(workers, jobs));
    if (workers == 1) {
        for (size_t j = 0; j < jobs; ++j) fn(j, 0);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mu;
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (size_t j; (j = next.fetch_add(1)) < jobs;) fn(j, w);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!error) error = std::current_exception();
                next = jobs;
            }
        });
    }
    for (auto &t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::mt19937_64 block_rng(uint64_t seed, uint64_t block) {
    std::seed_seq seq{uint32_t(seed), uint32_t(seed >> 32), uint32_t(block), uint32_t(block >> 32)};
    return std::mt19937_64(seq);
}

uint64_t lane_mask(size_t shots, size_t block) {
    size_t left = shots - block * 64;
    return left >= 64 ? ~uint64_t(0) : (uint64_t(1) << left) - 1;
}

// Program steps with each NOISE instruction's sites grouped, so one
// geometric skip walks all of its (site, lane) slots.
struct Step {
    bool noise = false;
    uint32_t op = 0;
    uint32_t site_begin = 0, site_end = 0;
};

struct Sampler {
    FrameProgram prog;
    std::vector<Step> steps;

    explicit Sampler(const Circuit &noisy) : prog(compile_frame_program(noisy)) {
        for (size_t i = 0; i < prog.ops.size();) {
            const FrameOp &op = prog.ops[i];
            if (op.kind != FrameOp::Noise) {
                steps.push_back({false, uint32_t(i), 0, 0});
                ++i;
                continue;
            }
            size_t j = i + 1;
            size_t ins = prog.sites[op.index].instruction;
            while (j < prog.ops.size() && prog.ops[j].kind == FrameOp::Noise &&
                   prog.sites[prog.ops[j].index].instruction == ins) {
                ++j;
            }
            steps.push_back({true, uint32_t(i), op.index, uint32_t(prog.ops[j - 1].index + 1)});
            i = j;
        }
    }

    void hit(FrameState &f, const NoiseSite &s, uint64_t lane, std::mt19937_64 &rng) const {
        if (s.kind == NoiseKind::MERR) {
            f.meas[s.meas] ^= lane;
            return;
        }
        size_t k = noise_outcomes(s.kind);
        size_t o = k == 1 ? 0 : std::uniform_int_distribution<size_t>(0, k - 1)(rng);
        auto [l1, l2] = noise_outcome(s.kind, o);
        frame_inject(f, s.a, l1, lane);
        if (s.kind == NoiseKind::DEP2) frame_inject(f, s.b, l2, lane);
    }

    // One block of 64 shots; the frame is left holding its measurement flips.
    void run(FrameState &f, std::mt19937_64 &rng) const {
        f.clear();
        for (const Step &st : steps) {
            if (!st.noise) {
                frame_apply(prog, prog.ops[st.op], f);
                continue;
            }
            double p = prog.sites[st.site_begin].p;
            if (p <= 0) continue;
            uint64_t slots = uint64_t(st.site_end - st.site_begin) * 64;
            if (p >= 1) {
                for (uint64_t pos = 0; pos < slots; ++pos) hit(f, prog.sites[st.site_begin + pos / 64], uint64_t(1) << (pos % 64), rng);
                continue;
            }
            std::geometric_distribution<uint64_t> gap(p);
            for (uint64_t pos = gap(rng); pos < slots;) {
                hit(f, prog.sites[st.site_begin + pos / 64], uint64_t(1) << (pos % 64), rng);
                uint64_t g = gap(rng);
                if (g >= slots) break;
                pos += 1 + g;
            }
        }
    }
};

ShotBatch empty_batch(size_t shots, size_t nd, size_t no, uint64_t seed) {
    ShotBatch b;
    b.shots = shots;
    b.num_detectors = nd;
    b.num_observables = no;
    b.seed = seed;
    b.words = (shots + 63) / 64;
    b.dets.assign(nd * b.words, 0);
    b.obs.assign(no * b.words, 0);
    return b;
}

}  // namespace

ShotBatch frame_sample(const Circuit &noisy, size_t shots, uint64_t seed, size_t workers) {
    Sampler sampler(noisy);
    const FrameProgram &prog = sampler.prog;
    ShotBatch batch = empty_batch(shots, prog.detectors.size(), prog.observables.size(), seed);
    if (workers == 0) workers = default_workers();
    std::vector<FrameState> frames(std::min(workers, std::max<size_t>(1, batch.words)),
                                   FrameState(prog.num_qubits, prog.num_measurements));
    parallel_for(batch.words, workers, [&](size_t block, size_t w) {
        auto rng = block_rng(seed, block);
        FrameState &f = frames[w];
        sampler.run(f, rng);
        uint64_t mask = lane_mask(shots, block);
        for (size_t d = 0; d < prog.detectors.size(); ++d) {
            batch.dets[d * batch.words + block] = frame_parity(f, prog.detectors[d]) & mask;
        }
        for (size_t o = 0; o < prog.observables.size(); ++o) {
            batch.obs[o * batch.words + block] = frame_parity(f, prog.observables[o]) & mask;
        }
    });
    return batch;
}

ShotBatch dem_sample(const Dem &dem, size_t shots, uint64_t seed) {
    ShotBatch batch = empty_batch(shots, dem.num_detectors, dem.num_observables, seed);
    for (size_t block = 0; block < batch.words; ++block) {
        auto rng = block_rng(seed, block);
        uint64_t mask = lane_mask(shots, block);
        for (const auto &m : dem.mechanisms) {
            if (m.p <= 0) continue;
            uint64_t lanes = 0;
            if (m.p >= 1) {
                lanes = ~uint64_t(0);
            } else {
                std::geometric_distribution<uint64_t> gap(m.p);
                for (uint64_t pos = gap(rng); pos < 64; pos += 1 + gap(rng)) lanes |= uint64_t(1) << pos;
            }
            lanes &= mask;
            for (uint32_t d : m.dets) batch.dets[d * batch.words + block] ^= lanes;
            for (size_t o = 0; o < dem.num_observables; ++o) {
                if (m.obs >> o & 1) batch.obs[o * batch.words + block] ^= lanes;
            }
        }
    }
    return batch;
}

PostselectResult postselect(const ShotBatch &batch, const std::vector<uint32_t> &p) {
    PostselectResult r;
    r.kept.assign(batch.words, 0);
    for (size_t w = 0; w < batch.words; ++w) {
        uint64_t bad = 0;
        for (uint32_t d : p) bad |= batch.dets[d * batch.words + w];
        r.kept[w] = ~bad & lane_mask(batch.shots, w);
        r.kept_count += std::popcount(r.kept[w]);
    }
    r.r_disc = batch.shots ? 1 - double(r.kept_count) / double(batch.shots) : 0.0;
    return r;
}

std::vector<uint32_t> shot_syndrome(const ShotBatch &batch, size_t shot, const std::vector<uint32_t> &detectors) {
    std::vector<uint32_t> s;
    for (size_t i = 0; i < detectors.size(); ++i) {
        if (batch.detector(shot, detectors[i])) s.push_back(uint32_t(i));
    }
    return s;
}

DecodingProblem decoding_problem(const Dem &dem, const std::vector<uint32_t> &postselect) {
    std::vector<bool> in_p(dem.num_detectors, false);
    for (uint32_t d : postselect) in_p.at(d) = true;
    DecodingProblem out;
    std::vector<uint32_t> remap(dem.num_detectors, UINT32_MAX);
    for (size_t d = 0; d < dem.num_detectors; ++d) {
        if (in_p[d]) continue;
        remap[d] = uint32_t(out.detectors.size());
        out.detectors.push_back(uint32_t(d));
        out.dem.labels.push_back(dem.labels[d]);
    }
    out.dem.num_detectors = out.detectors.size();
    out.dem.num_observables = dem.num_observables;
    for (const auto &m : dem.mechanisms) {
        if (m.dets.empty()) continue;
        Mechanism r{m.p, {}, m.obs};
        bool keep = true;
        for (uint32_t d : m.dets) {
            if (in_p[d]) {
                keep = false;
                break;
            }
            r.dets.push_back(remap[d]);
        }
        if (keep) out.dem.mechanisms.push_back(std::move(r));
    }
    return out;
}

namespace {

double log_odds(double p) {
    p = std::clamp(p, 1e-300, 1 - 1e-16);
    return std::log(p) - std::log1p(-p);
}

std::vector<uint32_t> symmetric_difference(const std::vector<uint32_t> &a, const std::vector<uint32_t> &b) {
    std::vector<uint32_t> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace

LookupDecoder::LookupDecoder(const Dem &dem) {
    for (const auto &m : dem.mechanisms) {
        if (m.dets.empty() || m.p <= 0) continue;
        by_dets_[m.dets].push_back(uint32_t(mechs_.size()));
        mechs_.push_back(m);
        score_.push_back(log_odds(m.p));
    }
}

uint64_t LookupDecoder::decode(const std::vector<uint32_t> &syndrome) const {
    if (syndrome.empty()) return 0;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<uint32_t> pick;
    auto offer = [&](double score, std::vector<uint32_t> tuple) {
        if (score > best || (score == best && tuple < pick)) {
            best = score;
            pick = std::move(tuple);
        }
    };
    if (auto it = by_dets_.find(syndrome); it != by_dets_.end()) {
        for (uint32_t i : it->second) offer(score_[i], {i});
    }
    for (uint32_t i = 0; i < mechs_.size(); ++i) {
        auto rest = symmetric_difference(mechs_[i].dets, syndrome);
        if (rest.empty()) continue;
        auto it = by_dets_.find(rest);
        if (it == by_dets_.end()) continue;
        for (uint32_t j : it->second) {
            if (j > i) offer(score_[i] + score_[j], {i, j});
        }
    }
    uint64_t l = 0;
    for (uint32_t i : pick) l ^= mechs_[i].obs;
    return l;
}

namespace {

// Messages are fixed-point log-likelihood ratios, 1/1024 nat per unit.
constexpr double kLlrUnit = 1024.0;
constexpr int64_t kMaxLlr = int64_t(1) << 24;

int32_t quantize_llr(double llr) {
    return int32_t(std::clamp<double>(std::llround(llr * kLlrUnit), -double(kMaxLlr), double(kMaxLlr)));
}

}  // namespace

BpOsdDecoder::BpOsdDecoder(const Dem &dem, BpOsdConfig config)
    : config_(config), num_dets_(dem.num_detectors), scale_q_(int64_t(std::llround(config.min_sum_scale * 65536))) {
    // Mechanisms with equal detector sets become one column: probability
    // of an odd number of them, observables of the likeliest.
    std::map<std::vector<uint32_t>, std::pair<Mechanism, double>> columns;
    for (const auto &m : dem.mechanisms) {
        if (m.dets.empty() || m.p <= 0) continue;
        for (uint32_t d : m.dets) {
            if (d >= num_dets_) throw std::invalid_argument("bposd: detector out of range");
        }
        auto [it, fresh] = columns.emplace(m.dets, std::make_pair(m, m.p));
        if (fresh) continue;
        auto &[col, best] = it->second;
        col.p = xor_probability(col.p, m.p);
        if (m.p > best) {
            best = m.p;
            col.obs = m.obs;
        }
    }
    std::vector<std::vector<uint32_t>> per_det(num_dets_);
    for (const auto &[dets, entry] : columns) {
        for (uint32_t d : dets) per_det[d].push_back(uint32_t(mechs_.size()));
        mechs_.push_back(entry.first);
        prior_.push_back(quantize_llr(-log_odds(std::min(entry.first.p, 0.5))));
    }
    // Messages live in check-major order; each mechanism keeps the positions
    // of its edges.
    std::vector<std::vector<uint32_t>> per_var(mechs_.size());
    chk_start_.push_back(0);
    for (size_t d = 0; d < num_dets_; ++d) {
        for (uint32_t e : per_det[d]) {
            per_var[e].push_back(uint32_t(edge_var_.size()));
            edge_var_.push_back(e);
            edge_det_.push_back(uint32_t(d));
        }
        chk_start_.push_back(uint32_t(edge_var_.size()));
    }
    var_start_.push_back(0);
    for (const auto &edges : per_var) {
        var_edges_.insert(var_edges_.end(), edges.begin(), edges.end());
        var_start_.push_back(uint32_t(var_edges_.size()));
    }
}

uint64_t BpOsdDecoder::decode(const std::vector<uint32_t> &syndrome) const {
    Workspace ws;
    return decode(syndrome, ws);
}

uint64_t BpOsdDecoder::decode(const std::vector<uint32_t> &syndrome, Workspace &ws) const {
    ws.converged = true;
    if (syndrome.empty()) {
        ws.hard.assign(mechs_.size(), 0);
        return 0;
    }
    const size_t ne = edge_var_.size(), nm = mechs_.size();
    ws.v2c.resize(ne);
    ws.c2v.resize(ne);
    ws.post.resize(nm);
    ws.hard.assign(nm, 0);
    ws.syn.assign(num_dets_, 0);
    for (uint32_t d : syndrome) ws.syn.at(d) = 1;
    // mismatch = syndrome xor parity of the current hard decision
    ws.mismatch = ws.syn;
    size_t mismatched = 0;
    for (uint8_t m : ws.mismatch) mismatched += m;
    // Layered schedule: checks are visited in order and each one reads the
    // current posteriors, so later checks already see earlier updates.
    std::fill(ws.c2v.begin(), ws.c2v.end(), 0);
    std::copy(prior_.begin(), prior_.end(), ws.post.begin());
    int32_t *v2c = ws.v2c.data(), *c2v = ws.c2v.data(), *post = ws.post.data();
    for (size_t it = 0; it < config_.max_iters; ++it) {
        for (size_t d = 0; d < num_dets_; ++d) {
            const uint32_t b = chk_start_[d], end = chk_start_[d + 1];
            int32_t min1 = INT32_MAX, min2 = INT32_MAX, neg = 0;
            uint32_t arg = b;
            for (uint32_t k = b; k < end; ++k) {
                int32_t v = post[edge_var_[k]] - c2v[k];
                v2c[k] = v;
                int32_t a = v < 0 ? -v : v;
                neg ^= v;
                if (a < min1) {
                    min2 = min1;
                    min1 = a;
                    arg = k;
                } else if (a < min2) {
                    min2 = a;
                }
            }
            // neg < 0 iff an odd number of incoming messages are negative
            const bool odd = (neg < 0) ^ bool(ws.syn[d]);
            const int32_t m1 = scale_message(min1), m2 = scale_message(min2);
            for (uint32_t k = b; k < end; ++k) {
                int32_t v = v2c[k];
                int32_t mag = k == arg ? m2 : m1;
                int32_t out = (odd ^ (v < 0)) ? -mag : mag;
                c2v[k] = out;
                uint32_t e = edge_var_[k];
                int32_t p = int32_t(std::clamp<int64_t>(int64_t(v) + out, -kMaxLlr, kMaxLlr));
                post[e] = p;
                uint8_t h = p < 0;
                if (h != ws.hard[e]) {
                    ws.hard[e] = h;
                    for (uint32_t i = var_start_[e]; i < var_start_[e + 1]; ++i) {
                        uint8_t &m = ws.mismatch[edge_det_[var_edges_[i]]];
                        mismatched += m ? -1 : 1;
                        m ^= 1;
                    }
                }
            }
        }
        if (mismatched == 0) {
            uint64_t l = 0;
            for (size_t e = 0; e < nm; ++e) {
                if (ws.hard[e]) l ^= mechs_[e].obs;
            }
            return l;
        }
    }
    ws.converged = false;
    return osd(syndrome, ws);
}

uint64_t BpOsdDecoder::osd(const std::vector<uint32_t> &syndrome, Workspace &ws) const {
    const std::vector<int32_t> &post = ws.post;
    size_t nm = mechs_.size();
    std::vector<uint32_t> order(nm);
    for (uint32_t e = 0; e < nm; ++e) order[e] = e;
    auto before = [&](uint32_t a, uint32_t b) { return post[a] < post[b] || (post[a] == post[b] && a < b); };
    size_t sorted = 0, chunk = 128;

    // Incremental elimination in reliability order. Every basis vector has
    // a pivot bit absent from all basis vectors inserted after it; combos
    // record which accepted columns make it up. OSD-0 is done once the
    // syndrome is spanned; the combination sweep keeps going until it has
    // osd_order dependent columns to try.
    size_t words = (num_dets_ + 63) / 64;
    std::vector<uint64_t> basis, combo, dep_combo;
    std::vector<size_t> pivot;
    std::vector<uint32_t> accepted, dependent;
    std::vector<uint64_t> s(words, 0), sc(words, 0), v(words), c(words);
    for (uint32_t d : syndrome) s[d / 64] ^= uint64_t(1) << (d % 64);
    auto zero = [&](const uint64_t *a) {
        for (size_t i = 0; i < words; ++i) {
            if (a[i]) return false;
        }
        return true;
    };
    auto has = [](const uint64_t *a, size_t bit) { return a[bit / 64] >> (bit % 64) & 1; };
    auto xor_into = [&](uint64_t *a, const uint64_t *b) {
        for (size_t i = 0; i < words; ++i) a[i] ^= b[i];
    };
    bool spanned = false;
    for (size_t pos = 0; pos < nm; ++pos) {
        if (spanned && dependent.size() >= config_.osd_order) break;
        if (pos == sorted) {
            size_t upto = std::min(nm, sorted + chunk);
            std::partial_sort(order.begin() + sorted, order.begin() + upto, order.end(), before);
            sorted = upto;
            chunk *= 2;
        }
        uint32_t e = order[pos];
        std::fill(v.begin(), v.end(), 0);
        std::fill(c.begin(), c.end(), 0);
        for (uint32_t d : mechs_[e].dets) v[d / 64] ^= uint64_t(1) << (d % 64);
        size_t slot = accepted.size();
        if (slot < num_dets_) c[slot / 64] |= uint64_t(1) << (slot % 64);
        for (size_t i = 0; i < pivot.size(); ++i) {
            if (has(v.data(), pivot[i])) {
                xor_into(v.data(), &basis[i * words]);
                xor_into(c.data(), &combo[i * words]);
            }
        }
        if (zero(v.data())) {
            if (dependent.size() < config_.osd_order) {
                // c still holds this column's own slot bit; drop it.
                if (slot < num_dets_) c[slot / 64] ^= uint64_t(1) << (slot % 64);
                dependent.push_back(e);
                dep_combo.insert(dep_combo.end(), c.begin(), c.end());
            }
            continue;
        }
        size_t pb = 0;
        while (v[pb / 64] == 0) pb += 64;
        pb += std::countr_zero(v[pb / 64]);
        accepted.push_back(e);
        if (has(s.data(), pb)) {
            xor_into(s.data(), v.data());
            xor_into(sc.data(), c.data());
        }
        basis.insert(basis.end(), v.begin(), v.end());
        combo.insert(combo.end(), c.begin(), c.end());
        pivot.push_back(pb);
        if (zero(s.data())) spanned = true;
    }
    if (!spanned) {
        // Syndrome outside the column space: fall back to the BP hard decision.
        uint64_t l = 0;
        for (size_t e = 0; e < nm; ++e) {
            if (post[e] < 0) l ^= mechs_[e].obs;
        }
        return l;
    }

    // Combination sweep: the OSD-0 solution, each dependent column alone and
    // each pair of them, scored by prior weight. First best wins.
    auto cost = [&](const uint64_t *sel) {
        int64_t w = 0;
        for (size_t i = 0; i < words; ++i) {
            for (uint64_t b = sel[i]; b; b &= b - 1) w += prior_[accepted[i * 64 + std::countr_zero(b)]];
        }
        return w;
    };
    std::vector<uint64_t> best = sc, trial(words);
    int64_t best_cost = cost(sc.data());
    size_t best_a = SIZE_MAX, best_b = SIZE_MAX;
    for (size_t a = 0; a < dependent.size(); ++a) {
        for (size_t b = a; b < dependent.size(); ++b) {
            trial = sc;
            xor_into(trial.data(), &dep_combo[a * words]);
            int64_t w = prior_[dependent[a]];
            if (b != a) {
                xor_into(trial.data(), &dep_combo[b * words]);
                w += prior_[dependent[b]];
            }
            w += cost(trial.data());
            if (w < best_cost) {
                best_cost = w;
                best = trial;
                best_a = a;
                best_b = b;
            }
        }
    }
    uint64_t l = 0;
    std::fill(ws.hard.begin(), ws.hard.end(), 0);
    for (size_t k = 0; k < accepted.size(); ++k) {
        if (has(best.data(), k)) {
            l ^= mechs_[accepted[k]].obs;
            ws.hard[accepted[k]] = 1;
        }
    }
    if (best_a != SIZE_MAX) {
        l ^= mechs_[dependent[best_a]].obs;
        ws.hard[dependent[best_a]] = 1;
        if (best_b != best_a) {
            l ^= mechs_[dependent[best_b]].obs;
            ws.hard[dependent[best_b]] = 1;
        }
    }
    return l;
}

uint64_t decode_lookup(const Dem &dem, const std::vector<uint32_t> &syndrome) {
    return LookupDecoder(dem).decode(syndrome);
}

uint64_t decode_bposd(const Dem &dem, const std::vector<uint32_t> &syndrome, BpOsdConfig config) {
    return BpOsdDecoder(dem, config).decode(syndrome);
}

DecoderKind parse_decoder(const std::string &name) {
    if (name == "none") return DecoderKind::None;
    if (name == "lookup") return DecoderKind::Lookup;
    if (name == "bposd") return DecoderKind::BpOsd;
    throw std::invalid_argument("unknown decoder: " + name);
}

const char *decoder_name(DecoderKind k) {
    switch (k) {
        case DecoderKind::None: return "none";
        case DecoderKind::Lookup: return "lookup";
        case DecoderKind::BpOsd: return "bposd";
    }
    return "?";
}

Interval wilson(size_t k, size_t n, double z) {
    if (n == 0) return {0, 1};
    double p = double(k) / double(n), nn = double(n), z2 = z * z;
    double denom = 1 + z2 / nn;
    double center = (p + z2 / (2 * nn)) / denom;
    double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
    return {k == 0 ? 0.0 : std::max(0.0, center - half), k == n ? 1.0 : std::min(1.0, center + half)};
}

double McReport::p(uint64_t mask) const {
    auto it = counts.find(mask);
    return shots_kept && it != counts.end() ? double(it->second) / double(shots_kept) : 0.0;
}

Interval McReport::interval(uint64_t mask) const {
    auto it = counts.find(mask);
    return wilson(it == counts.end() ? 0 : it->second, shots_kept);
}

double McReport::p_tot() const { return shots_kept ? double(failures) / double(shots_kept) : 0.0; }
double McReport::p_corr() const { return shots_kept ? double(correlated_failures) / double(shots_kept) : 0.0; }
Interval McReport::p_tot_interval() const { return wilson(failures, shots_kept); }

namespace {

struct SyndromeHash {
    size_t operator()(const std::vector<uint32_t> &v) const {
        uint64_t h = 1469598103934665603ull;
        for (uint32_t x : v) h = (h ^ x) * 1099511628211ull;
        return size_t(h);
    }
};

struct WorkerState {
    FrameState frame;
    BpOsdDecoder::Workspace ws;
    std::unordered_map<std::vector<uint32_t>, uint64_t, SyndromeHash> cache;
    std::vector<std::vector<uint32_t>> syn;
};

struct JobTally {
    size_t kept = 0;
    std::map<uint64_t, size_t> counts;
};

constexpr size_t kBlocksPerJob = 64;
constexpr size_t kCacheLimit = size_t(1) << 20;

}  // namespace

McReport run_experiment(const Circuit &noisy, const Dem &dem, size_t shots, uint64_t seed, DecoderKind decoder,
                        size_t workers) {
    Sampler sampler(noisy);
    const FrameProgram &prog = sampler.prog;
    if (prog.detectors.size() != dem.num_detectors || prog.observables.size() != dem.num_observables) {
        throw std::invalid_argument("run_experiment: circuit and Dem disagree");
    }
    auto p_dets = postselection_detectors(dem);
    DecodingProblem problem = decoding_problem(dem, p_dets);
    std::unique_ptr<LookupDecoder> lookup;
    std::unique_ptr<BpOsdDecoder> bposd;
    if (decoder == DecoderKind::Lookup) lookup = std::make_unique<LookupDecoder>(problem.dem);
    if (decoder == DecoderKind::BpOsd) bposd = std::make_unique<BpOsdDecoder>(problem.dem);

    size_t blocks = (shots + 63) / 64;
    size_t jobs = (blocks + kBlocksPerJob - 1) / kBlocksPerJob;
    if (workers == 0) workers = default_workers();
    size_t nw = std::max<size_t>(1, std::min(workers, jobs));
    std::vector<WorkerState> state;
    for (size_t w = 0; w < nw; ++w) state.push_back({FrameState(prog.num_qubits, prog.num_measurements), {}, {}, {}});
    std::vector<JobTally> tallies(jobs);

    parallel_for(jobs, nw, [&](size_t job, size_t w) {
        WorkerState &ws = state[w];
        JobTally &tally = tallies[job];
        size_t end = std::min(blocks, (job + 1) * kBlocksPerJob);
        for (size_t block = job * kBlocksPerJob; block < end; ++block) {
            auto rng = block_rng(seed, block);
            sampler.run(ws.frame, rng);
            uint64_t kept = lane_mask(shots, block);
            for (uint32_t d : p_dets) kept &= ~frame_parity(ws.frame, prog.detectors[d]);
            if (!kept) continue;
            tally.kept += std::popcount(kept);
            std::vector<uint64_t> obs(prog.observables.size());
            for (size_t o = 0; o < obs.size(); ++o) obs[o] = frame_parity(ws.frame, prog.observables[o]) & kept;
            ws.syn.assign(64, {});
            if (decoder != DecoderKind::None) {
                for (size_t i = 0; i < problem.detectors.size(); ++i) {
                    for (uint64_t b = frame_parity(ws.frame, prog.detectors[problem.detectors[i]]) & kept; b;
                         b &= b - 1) {
                        ws.syn[std::countr_zero(b)].push_back(uint32_t(i));
                    }
                }
            }
            for (uint64_t b = kept; b; b &= b - 1) {
                int lane = std::countr_zero(b);
                uint64_t flips = 0;
                for (size_t o = 0; o < obs.size(); ++o) flips |= (obs[o] >> lane & 1) << o;
                const auto &syn = ws.syn[lane];
                if (!syn.empty()) {
                    uint64_t pred;
                    if (auto it = ws.cache.find(syn); it != ws.cache.end()) {
                        pred = it->second;
                    } else {
                        pred = lookup ? lookup->decode(syn) : bposd->decode(syn, ws.ws);
                        if (ws.cache.size() < kCacheLimit) ws.cache.emplace(syn, pred);
                    }
                    flips ^= pred;
                }
                if (flips) ++tally.counts[flips];
            }
        }
    });

    McReport r;
    r.shots_total = shots;
    r.num_logicals = dem.num_observables;
    r.decoder = decoder;
    r.seed = seed;
    for (const auto &t : tallies) {
        r.shots_kept += t.kept;
        for (auto [mask, c] : t.counts) r.counts[mask] += c;
    }
    for (auto [mask, c] : r.counts) {
        r.failures += c;
        if (std::popcount(mask) > 1) r.correlated_failures += c;
    }
    r.r_disc_mc = shots ? 1 - double(r.shots_kept) / double(shots) : 0.0;
    return r;
}

namespace {

double sig6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return std::strtod(buf, nullptr);
}

std::string sig6_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<size_t> mask_indices(uint64_t mask) {
    std::vector<size_t> out;
    for (size_t o = 0; o < 64; ++o) {
        if (mask >> o & 1) out.push_back(o);
    }
    return out;
}

}  // namespace

std::string mc_report_to_json(const McReport &r) {
    nlohmann::ordered_json j;
    j["shots_total"] = r.shots_total;
    j["shots_kept"] = r.shots_kept;
    j["r_disc_mc"] = sig6(r.r_disc_mc);
    j["num_logicals"] = r.num_logicals;
    j["decoder"] = decoder_name(r.decoder);
    j["seed"] = r.seed;
    auto ci = r.p_tot_interval();
    j["p_tot"] = sig6(r.p_tot());
    j["p_tot_ci"] = {sig6(ci.lo), sig6(ci.hi)};
    j["p_corr"] = sig6(r.p_corr());
    nlohmann::ordered_json subsets = nlohmann::ordered_json::array();
    for (auto [mask, c] : r.counts) {
        auto in = r.interval(mask);
        nlohmann::ordered_json s;
        s["subset"] = mask_indices(mask);
        s["count"] = c;
        s["p"] = sig6(r.p(mask));
        s["ci"] = {sig6(in.lo), sig6(in.hi)};
        subsets.push_back(s);
    }
    j["p_by_subset"] = subsets;
    return j.dump(1) + "\n";
}

std::string mc_report_to_csv(const McReport &r) {
    std::ostringstream os;
    os << "subset,count,kept,p,ci_lo,ci_hi\n";
    for (auto [mask, c] : r.counts) {
        auto idx = mask_indices(mask);
        auto in = r.interval(mask);
        for (size_t i = 0; i < idx.size(); ++i) os << (i ? ";" : "") << idx[i];
        os << "," << c << "," << r.shots_kept << "," << sig6_text(r.p(mask)) << "," << sig6_text(in.lo) << ","
           << sig6_text(in.hi) << "\n";
    }
    return os.str();
}

}  // namespace msi
