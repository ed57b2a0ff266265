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


#ifndef MSI_ANALYSIS_H
#define MSI_ANALYSIS_H

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "msi/circuit.h"

namespace msi {

struct Mechanism {
    double p = 0;
    /// Sorted detector indices.
    std::vector<uint32_t> dets;
    /// Bit j set when observable j flips.
    uint64_t obs = 0;

    bool operator==(const Mechanism &other) const = default;
};

struct Dem {
    size_t num_detectors = 0;
    size_t num_observables = 0;
    std::vector<DetectorLabel> labels;
    /// Sorted by (dets, obs), one entry per distinct pair.
    std::vector<Mechanism> mechanisms;

    bool operator==(const Dem &other) const = default;
    std::string to_text() const;
    static Dem from_text(std::string_view text);
};

/// Probability that an odd number of two independent events happen.
inline double xor_probability(double p1, double p2) { return p1 + p2 - 2 * p1 * p2; }

/// One mechanism per elementary outcome of every noise site, propagated
/// through the circuit 64 faults at a time; mechanisms with identical
/// (detectors, observables) are merged with xor_probability and those
/// touching nothing are dropped.
Dem build_dem(const Circuit &noisy);

/// Unmerged form: one entry per (site, outcome) with nonzero probability,
/// in site order. Used by tests and the single-fault oracle.
std::vector<Mechanism> elementary_mechanisms(const Circuit &noisy);

/// Merges and sorts a mechanism list the same way build_dem does.
std::vector<Mechanism> merge_mechanisms(std::vector<Mechanism> list);

/// Fixed and round-parity detectors.
std::vector<uint32_t> postselection_detectors(const Dem &dem);

enum class FirstOrderMode { Undetectable, DecoderAware };

struct FirstOrderReport {
    size_t num_logicals = 0;
    /// Keyed by the flipped-observable mask J (nonzero).
    std::map<uint64_t, double> p_by_subset;
    double p_tot = 0;
    double p_corr = 0;
    double per_logical() const { return num_logicals ? p_tot / double(num_logicals) : 0.0; }
};

/// Undetectable: p_J sums mechanisms with no detectors and L = J.
/// DecoderAware: also mechanisms that avoid P but do fire detectors, when the
/// most likely mechanism with the same detectors predicts different
/// observables; the residual flip set gets the probability.
FirstOrderReport first_order(const Dem &dem, const std::vector<uint32_t> &postselect, FirstOrderMode mode);

struct DiscardReport {
    double r_up = 0;
    double a = 1;
    double a_fix = 1;
    double a_par_given_fix = 1;
};

/// a_fix multiplies (1 - p) over mechanisms hitting a fixed-label detector in
/// P, a_par over the remaining mechanisms hitting P; a = a_fix a_par.
DiscardReport discard_proxy(const Dem &dem, const std::vector<uint32_t> &postselect);

/// d r_up / d a_fix.
inline double proxy_sensitivity(const DiscardReport &r) { return -r.a_par_given_fix; }

/// v_inj / (1 - r_disc) + v_grow.
double spacetime_volume(double v_inj, double r_disc, double v_grow);

/// Exhaustive oracle: every elementary fault is inserted into a noiseless
/// tableau replay and classified by the detectors and observables it flips.
/// Faults with identical outcomes are combined with xor_probability.
std::vector<Mechanism> single_fault_oracle(const Circuit &noisy);

/// first_order over an oracle mechanism list, undetectable mode.
FirstOrderReport undetectable_from_mechanisms(const std::vector<Mechanism> &mechanisms, size_t num_logicals);

std::string first_order_to_json(const FirstOrderReport &report);

}  // namespace msi

#endif  // MSI_ANALYSIS_H
