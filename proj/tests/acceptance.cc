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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. The BB sweep is run once and shared by C7, C8, C10 and C12.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "msi/analysis.h"
#include "msi/circuitgen.h"
#include "msi/cleaning.h"
#include "msi/pipeline.h"
#include "msi/simulator.h"
#include "oracles.h"
#include "protopt_oracle.h"

using namespace msi;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Ctx {
    fs::path workdir;
    size_t c7_shots = 10000000;
    size_t sweep_shots = 100000;
    uint64_t seed = 2026;
    CssCode gross;  // pipeline basis
    ExperimentConfig sweep;
    ReportBundle sweep_bundle;
    bool sweep_done = false;
    std::vector<Dem> small_dems;
};

ExperimentConfig sweep_config(const Ctx &ctx, const std::string &dir) {
    ExperimentConfig c;
    c.code = "bb";
    c.basis = BasisSource::Protected;
    c.min_size = 1;
    c.max_size = 6;
    c.noise = {"uniform", "asymmetric"};
    c.p = {1e-3};
    c.shots = ctx.sweep_shots;
    c.seed = ctx.seed;
    c.decoder = DecoderKind::BpOsd;
    c.output_dir = (ctx.workdir / dir).string();
    return c;
}

void ensure_sweep(Ctx &ctx) {
    if (ctx.sweep_done) return;
    auto t0 = Clock::now();
    ctx.sweep = sweep_config(ctx, "sweep_a");
    ctx.sweep_bundle = run_pipeline(ctx.sweep);
    ctx.sweep_done = true;
    std::cout << "     (BB sweep |I| = 1..6: " << fmt("%.1f", since(t0)) << " s)\n" << std::flush;
}

const ReportRow &sweep_row(const Ctx &ctx, size_t k, const std::string &noise) {
    for (const auto &r : ctx.sweep_bundle.rows)
        if (r.size == k && r.noise == noise) return r;
    throw std::runtime_error("sweep has no row for size " + std::to_string(k) + " " + noise);
}

// The injection circuit of the first enumerated set, solved to optimality.
Circuit small_injection_circuit(const CssCode &code, const InjectableSet &set) {
    PreparationPlan plan = build_preparation_plan(code, set.config, set.pairing);
    auto m = build_milp(build_instance(code, plan), Objective::MaxProtection);
    auto init = apply_solution(code, plan, m, solve_exact(m, 60.0));
    return build_injection_circuit(code, plan, init, 1, {});
}

Outcome c1_codes(Ctx &) {
    auto t0 = Clock::now();
    CssCode g = build_bb(gross_code_spec());
    BitMatrix prod = g.hx * g.hz.transpose();
    bool orth = true;
    for (size_t r = 0; r < prod.rows(); ++r) orth = orth && prod.row_weight(r) == 0;
    CssCode h = rep_hgp13();
    auto d = estimate_distance_bruteforce(h);
    double dt = since(t0);
    bool ok = g.n == 144 && g.k() == 12 && orth && validate(g).empty() && h.n == 13 && h.k() == 1 && d && *d == 3 &&
              dt < 5;
    return {ok, "gross n=" + std::to_string(g.n) + " k=" + std::to_string(g.k()) +
                    (orth ? " HxHz^T=0" : " HxHz^T!=0") + "; hgp n=" + std::to_string(h.n) +
                    " k=" + std::to_string(h.k()) + " d=" + (d ? std::to_string(*d) : "?") + "; " +
                    fmt("%.2f s", dt)};
}

Outcome c2_theorem(Ctx &ctx) {
    auto t0 = Clock::now();
    size_t checked = 0, failed = 0, bb_checked = 0;
    std::string first;
    auto check = [&](const CssCode &code, const InjectableSet &set) {
        std::string why = theorem_failure(code, set, checked);
        if (!why.empty()) {
            ++failed;
            if (first.empty()) first = why;
        }
        ++checked;
    };
    EnumerateOptions all;
    all.tuples_per_set = 0;
    for (const CssCode &code : {steane_code(), rep_hgp13()})
        for (const auto &s : enumerate_injectable(code, all)) check(code, s);
    auto sets = enumerate_injectable(ctx.gross, {});
    for (size_t t = 0; t < sets.size(); t += 1 + sets.size() / 40) {
        check(ctx.gross, sets[t]);
        ++bb_checked;
    }
    double dt = since(t0);
    return {failed == 0 && bb_checked >= 20 && dt < 120,
            std::to_string(checked - bb_checked) + " small-code and " + std::to_string(bb_checked) +
                " BB configurations, " + std::to_string(failed) + " failures" + (first.empty() ? "" : " (" + first + ")") +
                "; " + fmt("%.1f s", dt)};
}

Outcome c3_cleaning(Ctx &ctx) {
    auto t0 = Clock::now();
    std::string detail;
    bool ok = true;
    CssCode steane = steane_code();
    for (auto [name, code] : {std::pair<const char *, const CssCode *>{"steane", &steane}, {"gross", &ctx.gross}}) {
        const CssCode &c = *code;
        CleaningResult r = clean(c);
        size_t nk = c.n - c.k();
        bool steps = r.steps.size() == nk && r.peeled.size() == nk;
        for (const auto &p : r.peeled) steps = steps && p.weight() == 1;
        bool carriers = r.carrier_qubits.size() == c.k();
        bool preserved = verify_preservation(c, r).empty();
        bool conj = true;
        Circuit enc = synth_encoding_clifford(r, c.n);
        for (size_t i = 0; i < r.carrier_qubits.size(); ++i) {
            conj = conj && conjugate_by(enc, PauliTerm::single(c.n, r.carrier_qubits[i], 'X')) == r.carrier_x[i];
            conj = conj && conjugate_by(enc, PauliTerm::single(c.n, r.carrier_qubits[i], 'Z')) == r.carrier_z[i];
        }
        ok = ok && steps && carriers && preserved && conj;
        detail += name + std::string(": ") + std::to_string(r.steps.size()) + " steps" +
                  (steps ? "" : " (bad)") + ", " + std::to_string(r.carrier_qubits.size()) + " carriers" +
                  (preserved ? "" : ", preservation violated") + (conj ? "" : ", Clifford mismatch") + "; ";
    }
    double dt = since(t0);
    return {ok && dt < 60, detail + fmt("%.1f s", dt)};
}

Outcome c4_pairing(Ctx &) {
    std::mt19937_64 rng(4040);
    size_t agree = 0, feasible = 0, bad_pairing = 0;
    for (int trial = 0; trial < 500; ++trial) {
        OverlapData od = random_overlap_instance(rng);
        bool brute = brute_pairing_exists(od, od.c_union.ones());
        auto fp = find_pairing(od);
        agree += fp.has_value() == brute;
        feasible += brute;
        if (fp && !is_compatible(od, *fp)) ++bad_pairing;
    }
    return {agree == 500 && bad_pairing == 0, std::to_string(agree) + "/500 agree (" + std::to_string(feasible) +
                                                  " feasible), " + std::to_string(bad_pairing) + " invalid pairings"};
}

Outcome c5_ilp(Ctx &) {
    auto t0 = Clock::now();
    std::mt19937_64 rng(5050);
    std::uniform_int_distribution<size_t> nu_d(0, 20), rows_d(1, 40), t_d(1, 10);
    size_t agree = 0, total = 0, max_u = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto inst = random_instance(nu_d(rng), rows_d(rng), t_d(rng), rng);
        max_u = std::max(max_u, inst.free.size());
        for (Objective obj : {Objective::MaxProtection, Objective::MaxFixed}) {
            auto model = build_milp(inst, obj);
            auto sol = solve_exact(model, 60.0);
            ++total;
            agree += sol.optimal && is_feasible(model.program, sol.values) &&
                     sol.objective == brute_force_optimum(inst, obj);
        }
    }
    double dt = since(t0);
    return {agree == total && dt < 300, std::to_string(agree) + "/" + std::to_string(total) +
                                            " solves equal enumeration (|U| <= " + std::to_string(max_u) + "); " +
                                            fmt("%.1f s", dt)};
}

Outcome c6_dem_oracle(Ctx &ctx) {
    auto t0 = Clock::now();
    size_t circuits = 0, mismatched = 0;
    double worst = 0;
    EnumerateOptions all;
    all.tuples_per_set = 0;
    for (const CssCode &code : {steane_code(), rep_hgp13()}) {
        for (const auto &set : enumerate_injectable(code, all)) {
            Circuit noisy = apply_noise(small_injection_circuit(code, set), uniform_model(1e-3));
            Dem dem = build_dem(noisy);
            auto fo = first_order(dem, postselection_detectors(dem), FirstOrderMode::Undetectable);
            auto ref = undetectable_from_mechanisms(single_fault_oracle(noisy), noisy.num_observables());
            bool same = fo.p_by_subset.size() == ref.p_by_subset.size();
            for (auto [mask, p] : ref.p_by_subset) {
                auto it = fo.p_by_subset.find(mask);
                if (it == fo.p_by_subset.end()) {
                    same = false;
                    continue;
                }
                double rel = std::abs(it->second - p) / std::max(p, 1e-300);
                worst = std::max(worst, rel);
                same = same && rel <= 1e-12;
            }
            mismatched += !same;
            ++circuits;
            ctx.small_dems.push_back(std::move(dem));
        }
    }
    double dt = since(t0);
    return {mismatched == 0 && dt < 600, std::to_string(circuits) + " Steane/[[13,1,3]] circuits, " +
                                             std::to_string(mismatched) + " mismatches, worst relative gap " +
                                             fmt("%.1e", worst) + "; " + fmt("%.1f s", dt)};
}

Outcome c7_mc(Ctx &ctx) {
    ensure_sweep(ctx);
    auto t0 = Clock::now();
    bool ok = ctx.c7_shots >= 10000000;
    std::string detail = ok ? "" : "shots below 1e7; ";
    for (size_t k = 1; k <= 4; ++k) {
        const ReportRow &row = sweep_row(ctx, k, "uniform");
        fs::path dir = fs::path(ctx.sweep.output_dir) / ("size_" + std::to_string(k));
        Circuit noisy = apply_noise(Circuit::from_text(slurp(dir / "circuit.txt")), uniform_model(1e-3));
        Dem dem = Dem::from_text(slurp(dir / "dem_uniform_0.001.txt"));
        McReport mc = run_experiment(noisy, dem, ctx.c7_shots, ctx.seed + k, DecoderKind::BpOsd);
        double sigma = std::sqrt(row.p_tot * (1 - row.p_tot) / double(std::max<size_t>(mc.shots_kept, 1)));
        double tol = std::max(0.15 * row.p_tot, 3 * sigma);
        bool rate_ok = std::abs(mc.p_tot() - row.p_tot) <= tol;
        bool disc_ok = std::abs(mc.r_disc_mc - row.r_up) <= 0.01;
        ok = ok && rate_ok && disc_ok;
        detail += "|I|=" + std::to_string(k) + " p_tot mc " + fmt("%.3e", mc.p_tot()) + " vs " +
                  fmt("%.3e", row.p_tot) + (rate_ok ? "" : " (off)") + ", r_disc " + fmt("%.4f", mc.r_disc_mc) +
                  " vs " + fmt("%.4f", row.r_up) + (disc_ok ? "" : " (off)") + "; ";
    }
    double dt = since(t0);
    return {ok && dt < 1800, detail + std::to_string(ctx.c7_shots) + " shots each, " + fmt("%.0f s", dt)};
}

Outcome c8_proxy(Ctx &ctx) {
    ensure_sweep(ctx);
    std::vector<Dem> dems = ctx.small_dems;
    if (dems.empty()) {
        for (const CssCode &code : {steane_code(), rep_hgp13()})
            dems.push_back(build_dem(
                apply_noise(small_injection_circuit(code, enumerate_injectable(code).at(0)), uniform_model(1e-3))));
    }
    for (const auto &e : fs::recursive_directory_iterator(ctx.sweep.output_dir))
        if (e.path().filename().string().rfind("dem_", 0) == 0) dems.push_back(Dem::from_text(slurp(e.path())));
    size_t identity_ok = 0, fd_checked = 0, fd_ok = 0;
    double worst = 0;
    for (const Dem &dem : dems) {
        auto post = postselection_detectors(dem);
        auto r = discard_proxy(dem, post);
        identity_ok += r.r_up == 1 - r.a_fix * r.a_par_given_fix;
        // Central difference in a_fix: move one mechanism that hits a fixed
        // postselected detector, leaving a_par untouched.
        std::set<uint32_t> fixed;
        for (uint32_t d : post)
            if (dem.labels[d] == DetectorLabel::Fixed) fixed.insert(d);
        for (size_t i = 0; i < dem.mechanisms.size(); ++i) {
            bool hits = false;
            for (uint32_t d : dem.mechanisms[i].dets) hits = hits || fixed.count(d);
            if (!hits) continue;
            Dem lo = dem, hi = dem;
            double h = dem.mechanisms[i].p / 2;
            lo.mechanisms[i].p -= h;
            hi.mechanisms[i].p += h;
            auto rl = discard_proxy(lo, post), rh = discard_proxy(hi, post);
            double fd = (rh.r_up - rl.r_up) / (rh.a_fix - rl.a_fix);
            double gap = std::abs(fd - proxy_sensitivity(r));
            worst = std::max(worst, gap);
            fd_ok += gap <= 1e-9;
            ++fd_checked;
            break;
        }
    }
    return {identity_ok == dems.size() && fd_checked > 0 && fd_ok == fd_checked,
            "identity exact on " + std::to_string(identity_ok) + "/" + std::to_string(dems.size()) +
                " DEMs; finite differences on " + std::to_string(fd_checked) + ", worst gap " + fmt("%.1e", worst)};
}

Outcome c9_decoder(Ctx &) {
    bool ok = true;
    std::string detail;
    for (const CssCode &code : {steane_code(), rep_hgp13()}) {
        Circuit noisy =
            apply_noise(small_injection_circuit(code, enumerate_injectable(code).at(0)), uniform_model(1e-3));
        Dem dem = build_dem(noisy);
        auto prob = decoding_problem(dem, postselection_detectors(dem));
        const auto &ms = prob.dem.mechanisms;
        std::set<std::vector<uint32_t>> w1, w2;
        for (size_t i = 0; i < ms.size(); ++i) {
            w1.insert(ms[i].dets);
            for (size_t j = i + 1; j < ms.size(); ++j) {
                std::vector<uint32_t> s;
                std::set_symmetric_difference(ms[i].dets.begin(), ms[i].dets.end(), ms[j].dets.begin(),
                                              ms[j].dets.end(), std::back_inserter(s));
                if (!s.empty()) w2.insert(s);
            }
        }
        w2.insert(w1.begin(), w1.end());
        LookupDecoder lk(prob.dem);
        BpOsdDecoder bp(prob.dem);
        BpOsdDecoder::Workspace ws;
        auto agree = [&](const std::set<std::vector<uint32_t>> &syn) {
            size_t a = 0;
            for (const auto &s : syn) a += bp.decode(s, ws) == lk.decode(s);
            return a;
        };
        size_t a1 = agree(w1), a2 = agree(w2);
        double f2 = double(a2) / double(w2.size());
        ok = ok && a1 == w1.size() && f2 >= 0.99;
        detail += std::string(code.n == 7 ? "Steane" : "[[13,1,3]]") + " weight<=1 " + std::to_string(a1) + "/" +
                  std::to_string(w1.size()) + ", weight<=2 " + std::to_string(a2) + "/" + std::to_string(w2.size()) +
                  " (" + fmt("%.2f%%", 100 * f2) + "); ";
    }
    return {ok, detail + "targets 100% and 99%"};
}

Outcome c10_trends(Ctx &ctx) {
    ensure_sweep(ctx);
    const double p = 1e-3;
    std::vector<double> uni(7), asym(7), corr(7);
    for (size_t k = 1; k <= 6; ++k) {
        const ReportRow &u = sweep_row(ctx, k, "uniform");
        const ReportRow &a = sweep_row(ctx, k, "asymmetric");
        uni[k] = u.p_tot / double(k) / p;
        asym[k] = a.p_tot / double(k) / p;
        corr[k] = u.p_tot > 0 ? u.p_corr / u.p_tot : 0;
    }
    double lo = *std::min_element(uni.begin() + 1, uni.begin() + 5);
    double hi = *std::max_element(uni.begin() + 1, uni.begin() + 5);
    bool flat = hi <= 1.5 * lo;
    bool jump = uni[5] >= 2 * uni[4] && uni[6] > uni[5];
    bool uncorrelated = corr[1] <= 0.01 && corr[2] <= 0.01 && corr[3] <= 0.01;
    bool lower = true;
    for (size_t k = 1; k <= 6; ++k) lower = lower && asym[k] < uni[k];
    std::string rates;
    for (size_t k = 1; k <= 6; ++k) rates += (k > 1 ? " " : "") + fmt("%.2fp", uni[k]);
    std::string arates;
    for (size_t k = 1; k <= 6; ++k) arates += (k > 1 ? " " : "") + fmt("%.2fp", asym[k]);
    return {flat && jump && uncorrelated && lower,
            "uniform per-logical " + rates + "; asymmetric " + arates + "; flat 1-4 " + (flat ? "yes" : "no") +
                ", jump at 5,6 (x2 over |I|=4, then rising) " + (jump ? "yes" : "no") + ", p_corr/p_tot<=0.01 for |I|<=3 " +
                (uncorrelated ? "yes" : "no") + ", asymmetric lower " + (lower ? "yes" : "no")};
}

Outcome c11_throughput(Ctx &ctx) {
    ensure_sweep(ctx);
    Circuit base = Circuit::from_text(slurp(fs::path(ctx.sweep.output_dir) / "size_4" / "circuit.txt"));
    Circuit noisy = apply_noise(base, uniform_model(1e-3));
    auto digest = [](const ShotBatch &b) {
        uint64_t h = 1469598103934665603ULL;
        for (uint64_t w : b.dets) h = (h ^ w) * 1099511628211ULL;
        for (uint64_t w : b.obs) h = (h ^ w) * 1099511628211ULL;
        return h;
    };
    const size_t shots = 1000000;
    auto t0 = Clock::now();
    uint64_t h_default = digest(frame_sample(noisy, shots, ctx.seed));
    double dt = since(t0);
    size_t workers = default_workers();
    uint64_t h_one = digest(frame_sample(noisy, shots, ctx.seed, 1));
    uint64_t h_four = digest(frame_sample(noisy, shots, ctx.seed, 4));
    bool same = h_default == h_one && h_one == h_four;
    return {dt <= 60 && same, "1e6 shots in " + fmt("%.1f s", dt) + " on " + std::to_string(workers) +
                                  " workers (" + std::to_string(noisy.num_detectors()) + " detectors); " +
                                  (same ? "identical" : "different") + " for 1, 4 and " + std::to_string(workers) +
                                  " workers"};
}

Outcome c12_repro(Ctx &ctx) {
    ensure_sweep(ctx);
    ExperimentConfig again = sweep_config(ctx, "sweep_b");
    again.workers = default_workers() == 1 ? 3 : 1;
    ReportBundle b = run_pipeline(again);
    auto files = [](const fs::path &root) {
        std::map<std::string, std::string> out;
        for (auto &e : fs::recursive_directory_iterator(root))
            if (e.is_regular_file() && e.path().filename() != "config.json")
                out[fs::relative(e.path(), root).string()] = slurp(e.path());
        return out;
    };
    auto fa = files(ctx.sweep.output_dir), fb = files(again.output_dir);
    size_t differing = 0;
    for (auto &[name, text] : fa) differing += !fb.count(name) || fb.at(name) != text;
    differing += fb.size() > fa.size() ? fb.size() - fa.size() : 0;
    bool same_bundle = b == ctx.sweep_bundle && bundle_to_json(b) == bundle_to_json(ctx.sweep_bundle) &&
                       bundle_to_csv(b) == bundle_to_csv(ctx.sweep_bundle);
    return {same_bundle && differing == 0, std::string("report ") + (same_bundle ? "byte-identical" : "differs") + ", " +
                                               std::to_string(fa.size()) + " artifacts compared, " +
                                               std::to_string(differing) + " differ (workers " +
                                               std::to_string(again.workers) + " vs default)"};
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Acceptance criteria"};
    Ctx ctx;
    std::string workdir = (fs::temp_directory_path() / "msi_acceptance").string();
    std::vector<int> only;
    app.add_option("--workdir", workdir, "Where the BB sweeps write their artifacts");
    app.add_option("--only", only, "Run just these criteria")->delimiter(',');
    app.add_option("--c7-shots", ctx.c7_shots, "Shots per configuration for C7");
    app.add_option("--seed", ctx.seed);
    CLI11_PARSE(app, argc, argv);
    ctx.workdir = workdir;
    fs::remove_all(ctx.workdir);
    fs::create_directories(ctx.workdir);

    const std::vector<std::pair<const char *, std::function<Outcome(Ctx &)>>> criteria = {
        {"code construction", c1_codes},
        {"injection theorem", c2_theorem},
        {"cleaning", c3_cleaning},
        {"pairing oracle", c4_pairing},
        {"ILP exactness", c5_ilp},
        {"DEM oracle", c6_dem_oracle},
        {"analytic vs Monte Carlo", c7_mc},
        {"discard decomposition", c8_proxy},
        {"decoder oracle", c9_decoder},
        {"rate trends", c10_trends},
        {"sampling throughput", c11_throughput},
        {"reproducibility", c12_repro},
    };

    auto t0 = Clock::now();
    ctx.gross = protected_injection_basis(build_bb(gross_code_spec()), gross_code_spec());
    std::cout << "     (gross-code basis: " << fmt("%.1f", since(t0)) << " s)\n" << std::flush;

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        int id = int(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Outcome o;
        try {
            o = criteria[i].second(ctx);
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("C%-2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures ? 1 : 0;
}
