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


// Command-line front end. Every subcommand writes to --out, or stdout when
// --out is omitted. MSI_WORKERS sets the sampling thread count.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "msi/analysis.h"
#include "msi/circuitgen.h"
#include "msi/cleaning.h"
#include "msi/pipeline.h"
#include "msi/simulator.h"

using namespace msi;

namespace {

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void emit(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path);
}

BitMatrix matrix_file(const std::string &path) {
    std::istringstream in(slurp(path));
    size_t rows = 0, cols = 0;
    in >> rows >> cols;
    std::vector<std::string> lines(rows);
    for (auto &l : lines) in >> l;
    if (!in) throw std::runtime_error("bad matrix file " + path);
    return BitMatrix::from_strings(lines);
}

NoiseModel model_by_name(const std::string &name, double p) {
    if (name == "uniform") return uniform_model(p);
    if (name == "asymmetric") return asymmetric_model(p);
    throw std::runtime_error("unknown noise model: " + name);
}

std::string lines(const std::vector<std::string> &v) {
    std::string s;
    for (auto &x : v) s += x + "\n";
    return s;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"msi: multi-state injection workbench"};
    app.require_subcommand(1);
    app.fallthrough();
    uint64_t seed = 0;
    std::string out;
    app.add_option("--seed", seed, "Seed for every randomized step");
    app.add_option("-o,--out", out, "Output file (default stdout)");

    int status = 0;

    // code
    auto *code = app.add_subcommand("code", "Build and check codes");
    code->require_subcommand(1);
    std::string basis = "protected";
    auto *build_bb_cmd = code->add_subcommand("build-bb", "Gross [[144,12,12]] code with a chosen logical basis");
    build_bb_cmd->add_option("--basis", basis, "protected|short|computed")
        ->check(CLI::IsMember({"protected", "short", "computed"}));
    build_bb_cmd->callback([&] {
        ExperimentConfig c;
        c.basis = parse_basis_source(basis);
        emit(out, code_to_json(build_config_code(c)));
    });
    std::string h1_path, h2_path;
    size_t rep = 3;
    auto *build_hgp_cmd = code->add_subcommand("build-hgp", "Hypergraph product of two classical checks");
    build_hgp_cmd->add_option("--h1", h1_path, "Matrix file (rows cols, then 0/1 rows)");
    build_hgp_cmd->add_option("--h2", h2_path, "Matrix file; defaults to --h1");
    build_hgp_cmd->add_option("--rep", rep, "Repetition-code length used when no file is given");
    build_hgp_cmd->callback([&] {
        ExperimentConfig c;
        c.code = "hgp";
        if (!h1_path.empty()) {
            c.hgp_h1 = matrix_file(h1_path);
            c.hgp_h2 = h2_path.empty() ? c.hgp_h1 : matrix_file(h2_path);
        } else {
            c.hgp_h1 = c.hgp_h2 = BitMatrix(rep - 1, rep);
            for (size_t i = 0; i + 1 < rep; ++i) {
                c.hgp_h1.set(i, i, true);
                c.hgp_h1.set(i, i + 1, true);
            }
            c.hgp_h2 = c.hgp_h1;
        }
        emit(out, code_to_json(build_config_code(c)));
    });
    code->add_subcommand("steane", "Steane [[7,1,3]] code")->callback([&] { emit(out, code_to_json(steane_code())); });
    std::string code_path;
    auto *validate_cmd = code->add_subcommand("validate", "List violated code invariants");
    validate_cmd->add_option("--code", code_path)->required();
    validate_cmd->callback([&] {
        auto problems = validate(code_from_json(slurp(code_path)));
        emit(out, problems.empty() ? "ok\n" : lines(problems));
        status = problems.empty() ? 0 : 1;
    });
    size_t max_n = 20;
    auto *distance_cmd = code->add_subcommand("distance", "Exhaustive distance for small codes");
    distance_cmd->add_option("--code", code_path)->required();
    distance_cmd->add_option("--max-n", max_n);
    distance_cmd->callback([&] {
        auto d = estimate_distance_bruteforce(code_from_json(slurp(code_path)), max_n);
        emit(out, d ? std::to_string(*d) + "\n" : "none\n");
    });

    // clean
    auto *clean_cmd = app.add_subcommand("clean", "Stabilizer cleaning");
    clean_cmd->require_subcommand(1);
    std::string strategy = "max_weight";
    auto *clean_run = clean_cmd->add_subcommand("run", "Clean and verify");
    clean_run->add_option("--code", code_path)->required();
    clean_run->add_option("--strategy", strategy)->check(CLI::IsMember({"first", "min_weight", "max_weight"}));
    clean_run->callback([&] {
        CssCode c = code_from_json(slurp(code_path));
        CleaningResult r = clean(c, parse_clean_strategy(strategy));
        auto problems = verify_preservation(c, r, seed);
        for (auto &p : problems) std::cerr << p << "\n";
        emit(out, cleaning_to_json(r));
        status = problems.empty() ? 0 : 1;
    });
    auto *clean_synth = clean_cmd->add_subcommand("synth", "Encoding Clifford as a circuit file");
    clean_synth->add_option("--code", code_path)->required();
    clean_synth->add_option("--strategy", strategy)->check(CLI::IsMember({"first", "min_weight", "max_weight"}));
    clean_synth->callback([&] {
        CssCode c = code_from_json(slurp(code_path));
        emit(out, synth_encoding_clifford(clean(c, parse_clean_strategy(strategy)), c.n).to_text());
    });

    // inject
    auto *inject_cmd = app.add_subcommand("inject", "Injectable configurations");
    inject_cmd->require_subcommand(1);
    size_t max_size = 6, config_id = 0;
    auto *enumerate_cmd = inject_cmd->add_subcommand("enumerate", "All injectable sets up to --max-size");
    enumerate_cmd->add_option("--code", code_path)->required();
    enumerate_cmd->add_option("--max-size", max_size);
    enumerate_cmd->callback([&] {
        EnumerateOptions o;
        o.max_set_size = max_size;
        emit(out, injectable_sets_to_json(enumerate_injectable(code_from_json(slurp(code_path)), o)));
    });
    auto *plan_cmd = inject_cmd->add_subcommand("plan", "Preparation plan of the --config-th enumerated set");
    plan_cmd->add_option("--code", code_path)->required();
    plan_cmd->add_option("--config", config_id)->required();
    plan_cmd->add_option("--max-size", max_size);
    plan_cmd->callback([&] {
        CssCode c = code_from_json(slurp(code_path));
        EnumerateOptions o;
        o.max_set_size = max_size;
        auto sets = enumerate_injectable(c, o);
        if (config_id >= sets.size())
            throw std::runtime_error("config " + std::to_string(config_id) + " out of range (" +
                                     std::to_string(sets.size()) + " sets)");
        emit(out, plan_to_json(build_preparation_plan(c, sets[config_id].config, sets[config_id].pairing)));
    });

    // optimize
    std::string plan_path, objective = "protection", lp_path;
    double budget = 60;
    size_t node_limit = 0;
    auto *optimize_cmd = app.add_subcommand("optimize", "Choose free-qubit bases");
    optimize_cmd->add_option("--code", code_path)->required();
    optimize_cmd->add_option("--plan", plan_path)->required();
    optimize_cmd->add_option("--objective", objective)->check(CLI::IsMember({"protection", "fixed"}));
    optimize_cmd->add_option("--export-lp", lp_path);
    optimize_cmd->add_option("--time-budget", budget, "Seconds per component");
    optimize_cmd->add_option("--node-limit", node_limit, "Nodes per component (0 = none)");
    optimize_cmd->callback([&] {
        CssCode c = code_from_json(slurp(code_path));
        PreparationPlan plan = plan_from_json(slurp(plan_path));
        IlpModel model = build_milp(build_instance(c, plan), parse_objective(objective));
        if (!lp_path.empty()) emit(lp_path, export_lp(model.program));
        emit(out, initial_config_to_json(apply_solution(c, plan, model, solve_exact(model, budget, node_limit))));
    });

    // circuit
    auto *circuit_cmd = app.add_subcommand("circuit", "Injection circuits");
    circuit_cmd->require_subcommand(1);
    std::string init_path, circuit_path, noise = "uniform";
    size_t r2 = 1;
    double p = 1e-3;
    auto *circuit_build = circuit_cmd->add_subcommand("build", "Noiseless injection circuit");
    circuit_build->add_option("--code", code_path)->required();
    circuit_build->add_option("--plan", plan_path)->required();
    circuit_build->add_option("--init", init_path)->required();
    circuit_build->add_option("--r2", r2);
    circuit_build->callback([&] {
        CssCode c = code_from_json(slurp(code_path));
        emit(out, build_injection_circuit(c, plan_from_json(slurp(plan_path)),
                                          initial_config_from_json(slurp(init_path)), r2, {})
                      .to_text());
    });
    auto *circuit_noise = circuit_cmd->add_subcommand("noise", "Attach a noise model");
    circuit_noise->add_option("--circuit", circuit_path)->required();
    circuit_noise->add_option("--model", noise)->check(CLI::IsMember({"uniform", "asymmetric"}));
    circuit_noise->add_option("--p", p);
    circuit_noise->callback([&] {
        emit(out, apply_noise(Circuit::from_text(slurp(circuit_path)), model_by_name(noise, p)).to_text());
    });
    auto *circuit_volume_cmd = circuit_cmd->add_subcommand("volume", "Qubits, two-qubit depth and volume");
    circuit_volume_cmd->add_option("--circuit", circuit_path)->required();
    circuit_volume_cmd->callback([&] {
        auto v = circuit_volume(Circuit::from_text(slurp(circuit_path)));
        emit(out, "qubits " + std::to_string(v.qubits) + "\ncritical_path_2q " + std::to_string(v.critical_path_2q) +
                      "\nvolume " + std::to_string(v.volume) + "\n");
    });

    // analyze
    auto *analyze_cmd = app.add_subcommand("analyze", "Detector error models and first-order rates");
    analyze_cmd->require_subcommand(1);
    std::string mode = "undetectable";
    auto *dem_cmd = analyze_cmd->add_subcommand("dem", "Detector error model of a noisy circuit");
    dem_cmd->add_option("--circuit", circuit_path)->required();
    dem_cmd->callback([&] { emit(out, build_dem(Circuit::from_text(slurp(circuit_path))).to_text()); });
    auto *first_cmd = analyze_cmd->add_subcommand("first-order", "First-order logical error rates");
    first_cmd->add_option("--circuit", circuit_path)->required();
    first_cmd->add_option("--mode", mode)->check(CLI::IsMember({"undetectable", "decoder-aware"}));
    first_cmd->callback([&] {
        Dem dem = build_dem(Circuit::from_text(slurp(circuit_path)));
        auto m = mode == "undetectable" ? FirstOrderMode::Undetectable : FirstOrderMode::DecoderAware;
        emit(out, first_order_to_json(first_order(dem, postselection_detectors(dem), m)));
    });
    auto *discard_cmd = analyze_cmd->add_subcommand("discard", "Discard-rate proxy and its factors");
    discard_cmd->add_option("--circuit", circuit_path)->required();
    discard_cmd->callback([&] {
        Dem dem = build_dem(Circuit::from_text(slurp(circuit_path)));
        auto r = discard_proxy(dem, postselection_detectors(dem));
        char buf[256];
        std::snprintf(buf, sizeof buf, "r_up %.6g\na %.6g\na_fix %.6g\na_par_given_fix %.6g\nsensitivity %.6g\n",
                      r.r_up, r.a, r.a_fix, r.a_par_given_fix, proxy_sensitivity(r));
        emit(out, buf);
    });
    double v_grow = 0;
    auto *volume_cmd = analyze_cmd->add_subcommand("volume", "Expected spacetime volume with postselection");
    volume_cmd->add_option("--circuit", circuit_path)->required();
    volume_cmd->add_option("--v-grow", v_grow);
    volume_cmd->callback([&] {
        Circuit c = Circuit::from_text(slurp(circuit_path));
        Dem dem = build_dem(c);
        double r = discard_proxy(dem, postselection_detectors(dem)).r_up;
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.6g\n", spacetime_volume(double(circuit_volume(c).volume), r, v_grow));
        emit(out, buf);
    });

    // sample
    size_t shots = 100000;
    std::string decoder = "bposd", csv_path;
    auto *sample_cmd = app.add_subcommand("sample", "Monte Carlo with postselection and decoding");
    sample_cmd->add_option("--circuit", circuit_path)->required();
    sample_cmd->add_option("--shots", shots);
    sample_cmd->add_option("--decoder", decoder)->check(CLI::IsMember({"none", "lookup", "bposd"}));
    sample_cmd->add_option("--csv", csv_path, "Also write per-subset counts as CSV");
    sample_cmd->callback([&] {
        Circuit c = Circuit::from_text(slurp(circuit_path));
        McReport r = run_experiment(c, build_dem(c), shots, seed, parse_decoder(decoder));
        emit(out, mc_report_to_json(r));
        if (!csv_path.empty()) emit(csv_path, mc_report_to_csv(r));
    });

    // pipeline
    std::string config_path, output_dir;
    auto *pipeline_cmd = app.add_subcommand("pipeline", "Run every stage from a JSON config");
    pipeline_cmd->add_option("--config", config_path)->required();
    pipeline_cmd->add_option("--output-dir", output_dir, "Overrides output_dir of the config");
    pipeline_cmd->callback([&] {
        ExperimentConfig c = config_from_json(slurp(config_path));
        if (app.count("--seed")) c.seed = seed;
        if (!output_dir.empty()) c.output_dir = output_dir;
        emit(out, bundle_to_csv(run_pipeline(c)));
    });

    // report
    std::string bundle_path, format = "csv";
    auto *report_cmd = app.add_subcommand("report", "Re-emit a saved report bundle");
    report_cmd->add_option("--bundle", bundle_path)->required();
    report_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
    report_cmd->callback([&] {
        ReportBundle b = bundle_from_json(slurp(bundle_path));
        emit(out, format == "csv" ? bundle_to_csv(b) : bundle_to_json(b));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return status;
}
