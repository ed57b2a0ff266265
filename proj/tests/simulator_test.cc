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

#include <cmath>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "msi/circuitgen.h"
#include "msi/injector.h"
#include "msi/protopt.h"
#include "msi/tableau.h"

using namespace msi;

namespace {

CssCode rep_hgp13() {
    BitMatrix rep3 = BitMatrix::from_strings({"110", "011"});
    return build_hgp({rep3, rep3});
}

Circuit injection_circuit(const CssCode &code, size_t which = 0, size_t r2 = 1) {
    auto sets = enumerate_injectable(code);
    const auto &set = sets.at(which);
    PreparationPlan plan = build_preparation_plan(code, set.config, set.pairing);
    auto m = build_milp(build_instance(code, plan), Objective::MaxProtection);
    auto init = apply_solution(code, plan, m, solve_exact(m, 5.0));
    return build_injection_circuit(code, plan, init, r2, {});
}

// The circuit with every NOISE instruction dropped except one forced fault
// placed where instruction `at` was. Returns the new index of that fault.
size_t force_fault(const Circuit &noisy, size_t at, NoiseKind kind, uint32_t target, Circuit &out) {
    out = Circuit(noisy.n_data(), noisy.n_ancilla());
    size_t pos = SIZE_MAX;
    for (size_t i = 0; i < noisy.instructions().size(); ++i) {
        const auto &ins = noisy.instructions()[i];
        if (i == at) {
            pos = out.instructions().size();
            out.append_noise(kind, 1.0, {target});
        } else if (ins.op != Op::NOISE) {
            out.push(ins);
        }
    }
    return pos;
}

}  // namespace

TEST(Simulator, ZeroNoiseIsQuiet) {
    Circuit c = apply_noise(injection_circuit(steane_code()), uniform_model(0));
    ShotBatch b = frame_sample(c, 1000, 3);
    EXPECT_EQ(b.shots, 1000u);
    EXPECT_TRUE(std::all_of(b.dets.begin(), b.dets.end(), [](uint64_t w) { return w == 0; }));
    EXPECT_TRUE(std::all_of(b.obs.begin(), b.obs.end(), [](uint64_t w) { return w == 0; }));
    Dem dem = build_dem(c);
    auto ps = postselect(b, postselection_detectors(dem));
    EXPECT_EQ(ps.kept_count, 1000u);
    EXPECT_EQ(ps.r_disc, 0.0);
    McReport r = run_experiment(c, dem, 1000, 3, DecoderKind::BpOsd);
    EXPECT_EQ(r.shots_kept, 1000u);
    EXPECT_EQ(r.p_tot(), 0.0);
    EXPECT_EQ(r.r_disc_mc, 0.0);
}

TEST(Simulator, ForcedFlipFiresFixedDetector) {
    // Data qubits 0 and 1 in |0>, a Z-parity check onto ancilla 2, an X
    // fault on qubit 0 before the check.
    Circuit c(2, 1);
    c.append(Op::RZ, {0, 1, 2});
    c.append_noise(NoiseKind::XERR, 1.0, {0});
    c.append(Op::CX, {0, 2, 1, 2});
    uint32_t m = uint32_t(c.append(Op::MZ, {2}));
    c.append_detector(DetectorLabel::Fixed, {m});
    ShotBatch b = frame_sample(c, 130, 1);
    for (size_t s = 0; s < b.shots; ++s) ASSERT_TRUE(b.detector(s, 0));
    EXPECT_EQ(postselect(b, {0}).kept_count, 0u);
    EXPECT_EQ(postselect(b, {0}).r_disc, 1.0);
}

TEST(Simulator, FrameMatchesTableauForEverySingleFault) {
    for (const CssCode &code : {steane_code(), rep_hgp13()}) {
        Circuit noisy = apply_noise(injection_circuit(code), uniform_model(1e-3));
        size_t checked = 0;
        for (size_t i = 0; i < noisy.instructions().size(); ++i) {
            const auto &ins = noisy.instructions()[i];
            if (ins.op != Op::NOISE) continue;
            std::vector<NoiseKind> kinds = ins.noise == NoiseKind::MERR ? std::vector{NoiseKind::MERR}
                                                                        : std::vector{NoiseKind::XERR, NoiseKind::ZERR};
            for (uint32_t q : ins.targets) {
                for (NoiseKind kind : kinds) {
                    Circuit forced;
                    size_t at = force_fault(noisy, i, kind, q, forced);
                    ShotBatch b = frame_sample(forced, 64, 5, 1);
                    InjectedFault f;
                    f.after = at;
                    f.pauli = PauliTerm(forced.num_qubits());
                    if (kind == NoiseKind::MERR) {
                        // The flipped measurement is the last one on q before the fault.
                        size_t last = 0, meas = 0;
                        for (size_t j = 0; j < at; ++j) {
                            const auto &x = forced.instructions()[j];
                            if (x.op == Op::MZ || x.op == Op::MX) {
                                for (uint32_t t : x.targets) {
                                    if (t == q) last = meas;
                                    ++meas;
                                }
                            } else if (x.op == Op::MPP) {
                                ++meas;
                            }
                        }
                        f.flip = {uint32_t(last)};
                    } else {
                        f.pauli.set_letter(q, kind == NoiseKind::XERR ? 'X' : 'Z');
                    }
                    TableauRun ref = tableau_run(forced, 2), run = tableau_run(forced, 2, &f);
                    for (size_t s : {size_t(0), size_t(63)}) {
                        for (size_t d = 0; d < ref.detectors.size(); ++d) {
                            ASSERT_EQ(b.detector(s, d), run.detectors[d] != ref.detectors[d])
                                << "instruction " << i << " qubit " << q << " detector " << d;
                        }
                        for (size_t o = 0; o < ref.observables.size(); ++o) {
                            ASSERT_EQ(b.observables(s) >> o & 1, uint64_t(run.observables[o] != ref.observables[o]));
                        }
                    }
                    ++checked;
                }
            }
        }
        EXPECT_GT(checked, 100u);
    }
}

TEST(Simulator, DeterministicAcrossWorkers) {
    Circuit c = apply_noise(injection_circuit(rep_hgp13()), uniform_model(5e-3));
    ShotBatch a = frame_sample(c, 10000, 77, 1), b = frame_sample(c, 10000, 77, 3);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, frame_sample(c, 10000, 78, 1));
    Dem dem = build_dem(c);
    McReport r1 = run_experiment(c, dem, 20000, 9, DecoderKind::BpOsd, 1);
    McReport r3 = run_experiment(c, dem, 20000, 9, DecoderKind::BpOsd, 3);
    EXPECT_EQ(r1.counts, r3.counts);
    EXPECT_EQ(r1.shots_kept, r3.shots_kept);
    EXPECT_EQ(mc_report_to_json(r1), mc_report_to_json(r3));
}

TEST(Simulator, StreamingMatchesBatch) {
    // run_experiment without a decoder sees the same shots as frame_sample.
    Circuit c = apply_noise(injection_circuit(steane_code()), uniform_model(5e-3));
    Dem dem = build_dem(c);
    auto p = postselection_detectors(dem);
    ShotBatch b = frame_sample(c, 9000, 4, 1);
    auto ps = postselect(b, p);
    std::map<uint64_t, size_t> counts;
    for (size_t s = 0; s < b.shots; ++s) {
        if ((ps.kept[s / 64] >> (s % 64) & 1) && b.observables(s)) ++counts[b.observables(s)];
    }
    McReport r = run_experiment(c, dem, 9000, 4, DecoderKind::None, 2);
    EXPECT_EQ(r.shots_kept, ps.kept_count);
    EXPECT_EQ(r.counts, counts);
    EXPECT_DOUBLE_EQ(r.r_disc_mc, ps.r_disc);
}

TEST(Simulator, DetectorMarginalsMatchDem) {
    Circuit c = apply_noise(injection_circuit(rep_hgp13()), uniform_model(1e-3));
    Dem dem = build_dem(c);
    std::vector<double> keep(dem.num_detectors, 1.0);
    for (const auto &m : dem.mechanisms) {
        for (uint32_t d : m.dets) keep[d] *= 1 - 2 * m.p;
    }
    const size_t shots = 1000000;
    ShotBatch b = frame_sample(c, shots, 11);
    double chi2 = 0, worst = 0;
    for (size_t d = 0; d < dem.num_detectors; ++d) {
        double q = (1 - keep[d]) / 2;
        size_t fired = 0;
        for (size_t w = 0; w < b.words; ++w) fired += std::popcount(b.dets[d * b.words + w]);
        double z = (double(fired) - q * shots) / std::sqrt(q * (1 - q) * shots);
        chi2 += z * z;
        worst = std::max(worst, std::fabs(z));
    }
    double dof = double(dem.num_detectors);
    // chi2 with dof degrees of freedom: mean dof, sd sqrt(2 dof)
    EXPECT_LT(chi2, dof + 5 * std::sqrt(2 * dof));
    EXPECT_LT(worst, 5.0);
}

TEST(Simulator, DiscardRateTracksProxy) {
    for (const CssCode &code : {steane_code(), rep_hgp13()}) {
        Circuit c = apply_noise(injection_circuit(code), uniform_model(1e-3));
        Dem dem = build_dem(c);
        auto p = postselection_detectors(dem);
        double r_up = discard_proxy(dem, p).r_up;
        const size_t shots = 200000;
        auto ps = postselect(frame_sample(c, shots, 21), p);
        double sigma = std::sqrt(r_up * (1 - r_up) / shots);
        EXPECT_NEAR(ps.r_disc, r_up, 3 * sigma + 1e-4) << "r_up " << r_up;
    }
}

TEST(Simulator, LookupBasics) {
    Circuit c = apply_noise(injection_circuit(steane_code()), uniform_model(1e-3));
    Dem dem = build_dem(c);
    auto prob = decoding_problem(dem, postselection_detectors(dem));
    LookupDecoder lk(prob.dem);
    EXPECT_EQ(lk.decode({}), 0u);
    std::map<std::vector<uint32_t>, size_t> multiplicity;
    for (const auto &m : prob.dem.mechanisms) ++multiplicity[m.dets];
    size_t unique = 0;
    for (const auto &m : prob.dem.mechanisms) {
        if (multiplicity[m.dets] != 1) continue;
        ++unique;
        EXPECT_EQ(lk.decode(m.dets), m.obs);
        EXPECT_EQ(decode_lookup(prob.dem, m.dets), m.obs);
    }
    EXPECT_GT(unique, 0u);
}

TEST(Simulator, LookupPrefersLikelierPair) {
    Dem dem;
    dem.num_detectors = 3;
    dem.num_observables = 2;
    dem.labels.assign(3, DetectorLabel::Bulk);
    // {0,1}: the single mechanism (1e-5) loses to {0} + {1} and to
    // {0,2} + {1,2}, the likeliest pair.
    dem.mechanisms = {{1e-2, {0}, 1}, {1e-2, {0, 2}, 0}, {1e-5, {0, 1}, 2}, {1e-2, {1}, 0}, {2e-2, {1, 2}, 2}};
    std::sort(dem.mechanisms.begin(), dem.mechanisms.end(),
              [](const Mechanism &a, const Mechanism &b) { return std::tie(a.dets, a.obs) < std::tie(b.dets, b.obs); });
    LookupDecoder lk(dem);
    EXPECT_EQ(lk.decode({0, 1}), 2u);
    // {2}: {1,2} + {1} beats {0,2} + {0}.
    EXPECT_EQ(lk.decode({2}), 2u);
    EXPECT_EQ(lk.decode({0}), 1u);
}

TEST(Simulator, BpOsdMatchesLookupOnSingleMechanisms) {
    // The weight-2 agreement rate is an acceptance target, measured by the
    // acceptance binary.
    for (const CssCode &code : {steane_code(), rep_hgp13()}) {
        Circuit c = apply_noise(injection_circuit(code), uniform_model(1e-3));
        Dem dem = build_dem(c);
        auto prob = decoding_problem(dem, postselection_detectors(dem));
        LookupDecoder lk(prob.dem);
        BpOsdDecoder bp(prob.dem);
        std::set<std::vector<uint32_t>> syndromes;
        for (const auto &m : prob.dem.mechanisms) syndromes.insert(m.dets);
        size_t agree = 0;
        BpOsdDecoder::Workspace ws;
        for (const auto &s : syndromes) agree += bp.decode(s, ws) == lk.decode(s);
        EXPECT_EQ(agree, syndromes.size());
    }
}

TEST(Simulator, OsdSweepNeverWorseThanOsd0) {
    Circuit c = apply_noise(injection_circuit(steane_code()), uniform_model(1e-3));
    Dem dem = build_dem(c);
    auto prob = decoding_problem(dem, postselection_detectors(dem));
    BpOsdConfig plain;
    plain.osd_order = 0;
    BpOsdDecoder d0(prob.dem, plain), d1(prob.dem);
    const auto &cols = d0.columns();
    auto weight = [&](const BpOsdDecoder::Workspace &ws) {
        double w = 0;
        for (size_t e = 0; e < cols.size(); ++e) {
            if (ws.hard[e]) w -= std::log(cols[e].p / (1 - cols[e].p));
        }
        return w;
    };
    const auto &ms = prob.dem.mechanisms;
    for (size_t i = 0; i < ms.size(); i += 3) {
        for (size_t j = i + 1; j < ms.size(); j += 7) {
            std::vector<uint32_t> s;
            std::set_symmetric_difference(ms[i].dets.begin(), ms[i].dets.end(), ms[j].dets.begin(), ms[j].dets.end(),
                                          std::back_inserter(s));
            if (s.empty()) continue;
            BpOsdDecoder::Workspace w0, w1;
            d0.decode(s, w0);
            d1.decode(s, w1);
            if (w0.converged) continue;
            EXPECT_LE(weight(w1), weight(w0) + 1e-2);
        }
    }
}

TEST(Simulator, OsdSolutionReproducesSyndrome) {
    Circuit c = apply_noise(injection_circuit(rep_hgp13()), uniform_model(1e-3));
    Dem dem = build_dem(c);
    auto prob = decoding_problem(dem, postselection_detectors(dem));
    BpOsdConfig cfg;
    cfg.max_iters = 0;
    BpOsdDecoder osd_only(prob.dem, cfg);
    std::mt19937_64 rng(3);
    const auto &cols = osd_only.columns();
    BpOsdDecoder::Workspace ws;
    for (int t = 0; t < 200; ++t) {
        std::vector<uint8_t> syn(prob.dem.num_detectors, 0);
        uint64_t obs = 0;
        for (int k = 0; k < 3; ++k) {
            const auto &m = cols[rng() % cols.size()];
            for (uint32_t d : m.dets) syn[d] ^= 1;
            obs ^= m.obs;
        }
        std::vector<uint32_t> s;
        for (uint32_t d = 0; d < syn.size(); ++d) {
            if (syn[d]) s.push_back(d);
        }
        if (s.empty()) continue;
        uint64_t pred = osd_only.decode(s, ws);
        EXPECT_FALSE(ws.converged);
        std::vector<uint8_t> got(syn.size(), 0);
        uint64_t l = 0;
        for (size_t e = 0; e < cols.size(); ++e) {
            if (!ws.hard[e]) continue;
            for (uint32_t d : cols[e].dets) got[d] ^= 1;
            l ^= cols[e].obs;
        }
        EXPECT_EQ(got, syn);
        EXPECT_EQ(l, pred);
    }
}

TEST(Simulator, BpOsdIsDeterministic) {
    Circuit c = apply_noise(injection_circuit(rep_hgp13()), uniform_model(1e-3));
    Dem dem = build_dem(c);
    auto prob = decoding_problem(dem, postselection_detectors(dem));
    BpOsdDecoder a(prob.dem), b(prob.dem);
    BpOsdDecoder::Workspace ws;
    for (const auto &m : prob.dem.mechanisms) {
        EXPECT_EQ(a.decode(m.dets, ws), b.decode(m.dets));
        EXPECT_EQ(decode_bposd(prob.dem, m.dets), a.decode(m.dets));
    }
    EXPECT_EQ(a.decode({}), 0u);
}

TEST(Simulator, WilsonCoversDemDrivenRates) {
    // Undetectable mechanisms only, so p_J is exact by enumeration.
    Dem dem;
    dem.num_detectors = 0;
    dem.num_observables = 2;
    dem.mechanisms = {{0.02, {}, 1}, {0.03, {}, 2}, {0.01, {}, 3}};
    std::map<uint64_t, double> exact;
    for (int mask = 0; mask < 8; ++mask) {
        double pr = 1;
        uint64_t l = 0;
        for (int i = 0; i < 3; ++i) {
            bool on = mask >> i & 1;
            pr *= on ? dem.mechanisms[i].p : 1 - dem.mechanisms[i].p;
            if (on) l ^= dem.mechanisms[i].obs;
        }
        exact[l] += pr;
    }
    size_t covered = 0, total = 0;
    for (uint64_t trial = 0; trial < 200; ++trial) {
        ShotBatch b = dem_sample(dem, 3000, 1000 + trial);
        std::map<uint64_t, size_t> counts;
        for (size_t s = 0; s < b.shots; ++s) ++counts[b.observables(s)];
        for (uint64_t j : {1, 2, 3}) {
            Interval in = wilson(counts[j], b.shots);
            covered += in.lo <= exact[j] && exact[j] <= in.hi;
            ++total;
        }
    }
    EXPECT_GE(double(covered) / double(total), 0.90);
}

TEST(Simulator, WilsonEdgeCases) {
    Interval z = wilson(0, 100);
    EXPECT_EQ(z.lo, 0.0);
    EXPECT_GT(z.hi, 0.0);
    Interval f = wilson(100, 100);
    EXPECT_LT(f.lo, 1.0);
    EXPECT_DOUBLE_EQ(f.hi, 1.0);
    Interval none = wilson(0, 0);
    EXPECT_EQ(none.lo, 0.0);
    EXPECT_EQ(none.hi, 1.0);
}

TEST(Simulator, AnalyticAgreesWithMonteCarlo) {
    for (const CssCode &code : {steane_code(), rep_hgp13()}) {
        // Low p so that second-order events (two bulk faults) stay small.
        Circuit c = apply_noise(injection_circuit(code), uniform_model(1e-4));
        Dem dem = build_dem(c);
        // Distance-3 codes: single bulk faults can be miscorrected, so the
        // decoder-aware first-order rate is the reference here.
        auto fo = first_order(dem, postselection_detectors(dem), FirstOrderMode::DecoderAware);
        for (DecoderKind k : {DecoderKind::Lookup, DecoderKind::BpOsd}) {
            McReport r = run_experiment(c, dem, 4000000, 5, k);
            double sigma = std::sqrt(fo.p_tot * (1 - fo.p_tot) / double(r.shots_kept));
            EXPECT_NEAR(r.p_tot(), fo.p_tot, std::max(0.15 * fo.p_tot, 3 * sigma)) << decoder_name(k);
        }
    }
}

TEST(Simulator, ReportFormats) {
    McReport r;
    r.shots_total = 1000;
    r.shots_kept = 800;
    r.r_disc_mc = 0.2;
    r.num_logicals = 2;
    r.counts = {{1, 8}, {3, 2}};
    r.failures = 10;
    r.correlated_failures = 2;
    EXPECT_DOUBLE_EQ(r.p_tot(), 0.0125);
    EXPECT_DOUBLE_EQ(r.p_corr(), 0.0025);
    std::string csv = mc_report_to_csv(r);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "subset,count,kept,p,ci_lo,ci_hi");
    EXPECT_NE(csv.find("\n0;1,2,800,0.0025,"), std::string::npos);
    std::string json = mc_report_to_json(r);
    EXPECT_NE(json.find("\"p_tot\": 0.0125"), std::string::npos);
    EXPECT_EQ(parse_decoder("bposd"), DecoderKind::BpOsd);
    EXPECT_THROW(parse_decoder("mwpm"), std::invalid_argument);
}
