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


#ifndef MSI_SIMULATOR_H
#define MSI_SIMULATOR_H

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "msi/analysis.h"
#include "msi/circuit.h"

namespace msi {

/// Detector and observable flips, bit-packed per detector: bit s of word
/// w of detector d is dets[d * words + w] >> (s % 64), s = 64 w + bit.
struct ShotBatch {
    size_t shots = 0;
    size_t num_detectors = 0;
    size_t num_observables = 0;
    uint64_t seed = 0;
    size_t words = 0;
    std::vector<uint64_t> dets;
    std::vector<uint64_t> obs;

    bool detector(size_t shot, size_t d) const { return dets[d * words + shot / 64] >> (shot % 64) & 1; }
    uint64_t observables(size_t shot) const;
    bool operator==(const ShotBatch &other) const = default;
};

/// Worker threads: MSI_WORKERS when set and positive, else the hardware
/// concurrency (at least 1).
size_t default_workers();

/// Pauli-frame sampling against the noiseless reference. Shots are drawn in
/// blocks of 64; block b uses its own generator seeded from (seed, b), so
/// the batch does not depend on the worker count.
ShotBatch frame_sample(const Circuit &noisy, size_t shots, uint64_t seed, size_t workers = 0);

/// Samples mechanisms of a Dem independently and XORs their effects.
ShotBatch dem_sample(const Dem &dem, size_t shots, uint64_t seed);

struct PostselectResult {
    /// One bit per shot, set when kept.
    std::vector<uint64_t> kept;
    size_t kept_count = 0;
    double r_disc = 0;
};

PostselectResult postselect(const ShotBatch &batch, const std::vector<uint32_t> &postselect);

/// Syndrome of one shot restricted to `detectors`, as positions into it.
std::vector<uint32_t> shot_syndrome(const ShotBatch &batch, size_t shot, const std::vector<uint32_t> &detectors);

/// The Dem seen by the decoder on kept shots: mechanisms touching P are
/// dropped and the remaining detectors are renumbered in order.
struct DecodingProblem {
    Dem dem;
    /// Original index of each kept detector.
    std::vector<uint32_t> detectors;
};

DecodingProblem decoding_problem(const Dem &dem, const std::vector<uint32_t> &postselect);

/// Most likely mechanism subset of weight <= 2 reproducing the syndrome;
/// zero when there is none.
class LookupDecoder {
   public:
    explicit LookupDecoder(const Dem &dem);
    uint64_t decode(const std::vector<uint32_t> &syndrome) const;

   private:
    std::vector<Mechanism> mechs_;
    std::vector<double> score_;
    std::map<std::vector<uint32_t>, std::vector<uint32_t>> by_dets_;
};

struct BpOsdConfig {
    size_t max_iters = 30;
    double min_sum_scale = 0.625;
    /// Dependent columns tried by the combination sweep after OSD-0 (each
    /// alone and in pairs). 0 is plain OSD-0.
    size_t osd_order = 128;
};

/// Normalized min-sum on the mechanism/detector graph, OSD when BP does
/// not reproduce the syndrome. Mechanisms sharing a detector set are one
/// column carrying the observables of the most likely of them.
class BpOsdDecoder {
   public:
    explicit BpOsdDecoder(const Dem &dem, BpOsdConfig config = {});

    struct Workspace {
        std::vector<int32_t> v2c, c2v, post;
        /// Error estimate over columns() after a decode.
        std::vector<uint8_t> hard, syn, mismatch;
        bool converged = true;
    };
    uint64_t decode(const std::vector<uint32_t> &syndrome, Workspace &ws) const;
    uint64_t decode(const std::vector<uint32_t> &syndrome) const;
    const std::vector<Mechanism> &columns() const { return mechs_; }

   private:
    uint64_t osd(const std::vector<uint32_t> &syndrome, Workspace &ws) const;
    int32_t scale_message(int32_t m) const { return int32_t((int64_t(m) * scale_q_) >> 16); }

    BpOsdConfig config_;
    size_t num_dets_ = 0;
    std::vector<Mechanism> mechs_;
    int64_t scale_q_ = 0;
    std::vector<int32_t> prior_;
    // Edges are numbered check-major: detector d owns [chk_start_[d],
    // chk_start_[d+1]); mechanism e owns var_edges_[var_start_[e] ...].
    std::vector<uint32_t> chk_start_, edge_var_, edge_det_;
    std::vector<uint32_t> var_start_, var_edges_;
};

uint64_t decode_lookup(const Dem &dem, const std::vector<uint32_t> &syndrome);
uint64_t decode_bposd(const Dem &dem, const std::vector<uint32_t> &syndrome, BpOsdConfig config = {});

enum class DecoderKind { None, Lookup, BpOsd };
DecoderKind parse_decoder(const std::string &name);
const char *decoder_name(DecoderKind k);

struct Interval {
    double lo = 0, hi = 0;
};

/// Wilson score interval, z = 1.96.
Interval wilson(size_t successes, size_t trials, double z = 1.959963984540054);

struct McReport {
    size_t shots_total = 0;
    size_t shots_kept = 0;
    double r_disc_mc = 0;
    size_t num_logicals = 0;
    DecoderKind decoder = DecoderKind::None;
    uint64_t seed = 0;
    /// Kept shots whose residual flip set is exactly J.
    std::map<uint64_t, size_t> counts;
    size_t failures = 0;
    size_t correlated_failures = 0;

    double p(uint64_t mask) const;
    Interval interval(uint64_t mask) const;
    double p_tot() const;
    double p_corr() const;
    Interval p_tot_interval() const;
};

/// Sample, postselect, decode the kept shots on the non-postselected
/// detectors and tally the residual observable flips. Streams over blocks
/// of shots, so memory does not grow with `shots`.
McReport run_experiment(const Circuit &noisy, const Dem &dem, size_t shots, uint64_t seed, DecoderKind decoder,
                        size_t workers = 0);

std::string mc_report_to_json(const McReport &report);
/// One row per J with counts and intervals.
std::string mc_report_to_csv(const McReport &report);

}  // namespace msi

#endif  // MSI_SIMULATOR_H
