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


#include "msi/pipeline.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "msi/analysis.h"
#include "msi/circuitgen.h"
#include "msi/injector.h"

namespace msi {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string sig6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

NoiseModel noise_model(const std::string &name, double p) {
    if (name == "uniform") return uniform_model(p);
    if (name == "asymmetric") return asymmetric_model(p);
    throw std::invalid_argument("unknown noise model: " + name);
}

BitMatrix read_matrix_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    size_t rows = 0, cols = 0;
    in >> rows >> cols;
    std::vector<std::string> lines(rows);
    for (auto &l : lines) in >> l;
    if (!in || (rows && lines[0].size() != cols)) throw std::invalid_argument("bad matrix file " + path);
    return BitMatrix::from_strings(lines);
}

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

BitMatrix repetition_check(size_t n) {
    BitMatrix h(n - 1, n);
    for (size_t i = 0; i + 1 < n; ++i) {
        h.set(i, i, true);
        h.set(i, i + 1, true);
    }
    return h;
}

std::vector<std::string> matrix_strings(const BitMatrix &m) {
    std::vector<std::string> out;
    for (size_t r = 0; r < m.rows(); ++r) {
        std::string s(m.cols(), '0');
        for (size_t c = 0; c < m.cols(); ++c)
            if (m.get(r, c)) s[c] = '1';
        out.push_back(s);
    }
    return out;
}

std::string index_list(const std::vector<size_t> &v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
    return s;
}

}  // namespace

BasisSource parse_basis_source(const std::string &name) {
    if (name == "protected") return BasisSource::Protected;
    if (name == "short") return BasisSource::Short;
    if (name == "computed") return BasisSource::Computed;
    throw std::invalid_argument("unknown basis: " + name);
}

const char *basis_source_name(BasisSource b) {
    switch (b) {
        case BasisSource::Protected: return "protected";
        case BasisSource::Short: return "short";
        case BasisSource::Computed: return "computed";
    }
    return "?";
}

ExperimentConfig config_from_json(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw std::invalid_argument(std::string("config is not JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");

    static const std::set<std::string> known = {"code",  "bb",      "hgp",        "code_file",    "basis",
                                                "sizes", "noise",   "p",          "r2",           "shots",
                                                "seed",  "objective", "decoder", "output_dir", "solver_nodes",
                                                "workers"};
    std::vector<std::string> errors;
    for (auto &[key, value] : j.items())
        if (!known.count(key)) errors.push_back("unknown key '" + key + "'");

    ExperimentConfig c;
    auto field = [&](const char *key, auto &out, auto check) {
        if (!j.contains(key)) return;
        try {
            using T = std::decay_t<decltype(out)>;
            T v = j.at(key).get<T>();
            if (std::string why = check(v); !why.empty())
                errors.push_back(std::string(key) + ": " + why);
            else
                out = v;
        } catch (const json::exception &) {
            errors.push_back(std::string(key) + ": wrong type");
        }
    };
    auto any = [](const auto &) { return std::string(); };
    auto positive = [](size_t v) { return v ? std::string() : std::string("must be positive"); };

    field("code", c.code, [](const std::string &s) {
        return s == "bb" || s == "hgp" || s == "steane" || s == "file" ? std::string() : "expected bb, hgp, steane or file";
    });
    if (!j.contains("basis") && c.code != "bb") c.basis = BasisSource::Computed;
    std::string basis_name;
    field("basis", basis_name, [](const std::string &s) {
        return s == "protected" || s == "short" || s == "computed" ? std::string() : "expected protected, short or computed";
    });
    if (!basis_name.empty()) c.basis = parse_basis_source(basis_name);
    if (c.basis != BasisSource::Computed && c.code != "bb") errors.push_back("basis: only bb codes support " + basis_name);

    if (j.contains("bb")) {
        try {
            const json &b = j.at("bb");
            c.bb.ell = b.at("ell").get<size_t>();
            c.bb.m = b.at("m").get<size_t>();
            c.bb.a_monomials = b.at("a").get<std::vector<std::pair<int, int>>>();
            c.bb.b_monomials = b.at("b").get<std::vector<std::pair<int, int>>>();
            if (!c.bb.ell || !c.bb.m) errors.push_back("bb: ell and m must be positive");
        } catch (const json::exception &) {
            errors.push_back("bb: expected {ell, m, a, b}");
        }
    }
    c.hgp_h1 = c.hgp_h2 = repetition_check(3);
    if (j.contains("hgp")) {
        auto matrix = [&](const json &v) {
            if (v.is_string()) return read_matrix_file(v.get<std::string>());
            return BitMatrix::from_strings(v.get<std::vector<std::string>>());
        };
        try {
            c.hgp_h1 = matrix(j.at("hgp").at("h1"));
            c.hgp_h2 = matrix(j.at("hgp").at("h2"));
        } catch (const json::exception &) {
            errors.push_back("hgp: expected {h1, h2} as row strings or matrix file paths");
        } catch (const std::invalid_argument &e) {
            errors.push_back(std::string("hgp: ") + e.what());
        }
    }
    field("code_file", c.code_file, [](const std::string &s) {
        return fs::is_regular_file(s) ? std::string() : "no such file " + s;
    });
    if (c.code == "file" && c.code_file.empty()) errors.push_back("code_file: required when code is file");

    std::vector<size_t> sizes;
    field("sizes", sizes, [](const std::vector<size_t> &v) {
        return v.size() == 2 && v[0] >= 1 && v[0] <= v[1] && v[1] <= 64 ? std::string() : "expected [min, max] with 1 <= min <= max";
    });
    if (sizes.size() == 2) c.min_size = sizes[0], c.max_size = sizes[1];
    field("noise", c.noise, [](const std::vector<std::string> &v) {
        if (v.empty()) return std::string("must not be empty");
        for (auto &s : v)
            if (s != "uniform" && s != "asymmetric") return "unknown noise model " + s;
        return std::string();
    });
    field("p", c.p, [](const std::vector<double> &v) {
        if (v.empty()) return std::string("must not be empty");
        for (double x : v)
            if (!(x > 0 && x < 0.5)) return std::string("values must lie in (0, 0.5)");
        return std::string();
    });
    field("r2", c.r2, any);
    field("shots", c.shots, any);
    if (!j.contains("seed"))
        errors.push_back("seed: required");
    else
        field("seed", c.seed, any);
    std::string objective, decoder;
    field("objective", objective, [](const std::string &s) {
        return s == "protection" || s == "fixed" ? std::string() : "expected protection or fixed";
    });
    if (!objective.empty()) c.objective = parse_objective(objective);
    field("decoder", decoder, [](const std::string &s) {
        return s == "none" || s == "lookup" || s == "bposd" ? std::string() : "expected none, lookup or bposd";
    });
    if (!decoder.empty()) c.decoder = parse_decoder(decoder);
    field("output_dir", c.output_dir, any);
    field("solver_nodes", c.solver_nodes, positive);
    field("workers", c.workers, any);

    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (auto &e : errors) msg += "\n  " + e;
        throw std::invalid_argument(msg);
    }
    return c;
}

std::string config_to_json(const ExperimentConfig &c) {
    json j;
    j["code"] = c.code;
    if (c.code == "bb")
        j["bb"] = {{"ell", c.bb.ell}, {"m", c.bb.m}, {"a", c.bb.a_monomials}, {"b", c.bb.b_monomials}};
    if (c.code == "hgp") j["hgp"] = {{"h1", matrix_strings(c.hgp_h1)}, {"h2", matrix_strings(c.hgp_h2)}};
    if (c.code == "file") j["code_file"] = c.code_file;
    j["basis"] = basis_source_name(c.basis);
    j["sizes"] = {c.min_size, c.max_size};
    j["noise"] = c.noise;
    j["p"] = c.p;
    j["r2"] = c.r2;
    j["shots"] = c.shots;
    j["seed"] = c.seed;
    j["objective"] = objective_name(c.objective);
    j["decoder"] = decoder_name(c.decoder);
    j["output_dir"] = c.output_dir;
    j["solver_nodes"] = c.solver_nodes;
    j["workers"] = c.workers;
    return j.dump(2) + "\n";
}

const std::vector<std::string> &report_columns() {
    static const std::vector<std::string> cols = {
        "size",          "injected",       "sites",      "bell_pairs",  "noise",     "p",
        "p_tot_per_logical", "p_tot",      "p_corr_per_logical", "p_corr", "p_corr_over_p_tot",
        "p_tot_decoder_aware", "num_fixed", "r_up",      "num_postselected", "protected", "targets",
        "optimal",       "shots",          "shots_kept", "p_tot_mc",    "p_tot_mc_lo", "p_tot_mc_hi",
        "p_corr_mc",     "r_disc_mc"};
    return cols;
}

std::string bundle_to_json(const ReportBundle &bundle) {
    json rows = json::array();
    for (const auto &r : bundle.rows) {
        json j;
        j["size"] = r.size;
        j["injected"] = r.injected;
        j["sites"] = r.sites;
        j["bell_pairs"] = r.bell_pairs;
        j["noise"] = r.noise;
        j["p"] = r.p;
        j["p_tot"] = r.p_tot;
        j["p_corr"] = r.p_corr;
        j["p_tot_decoder_aware"] = r.p_tot_decoder_aware;
        j["num_fixed"] = r.num_fixed;
        j["num_protected"] = r.num_protected;
        j["num_targets"] = r.num_targets;
        j["optimal"] = r.solver_optimal;
        j["r_up"] = r.r_up;
        j["num_postselected"] = r.num_postselected;
        j["shots"] = r.shots;
        j["shots_kept"] = r.shots_kept;
        j["p_tot_mc"] = r.p_tot_mc;
        j["p_tot_mc_lo"] = r.p_tot_mc_lo;
        j["p_tot_mc_hi"] = r.p_tot_mc_hi;
        j["p_corr_mc"] = r.p_corr_mc;
        j["r_disc_mc"] = r.r_disc_mc;
        rows.push_back(j);
    }
    return json{{"rows", rows}}.dump(2) + "\n";
}

ReportBundle bundle_from_json(const std::string &text) {
    json j = json::parse(text);
    ReportBundle b;
    for (const json &x : j.at("rows")) {
        ReportRow r;
        r.size = x.at("size");
        r.injected = x.at("injected").get<std::vector<size_t>>();
        r.sites = x.at("sites").get<std::vector<size_t>>();
        r.bell_pairs = x.at("bell_pairs");
        r.noise = x.at("noise");
        r.p = x.at("p");
        r.p_tot = x.at("p_tot");
        r.p_corr = x.at("p_corr");
        r.p_tot_decoder_aware = x.at("p_tot_decoder_aware");
        r.num_fixed = x.at("num_fixed");
        r.num_protected = x.at("num_protected");
        r.num_targets = x.at("num_targets");
        r.solver_optimal = x.at("optimal");
        r.r_up = x.at("r_up");
        r.num_postselected = x.at("num_postselected");
        r.shots = x.at("shots");
        r.shots_kept = x.at("shots_kept");
        r.p_tot_mc = x.at("p_tot_mc");
        r.p_tot_mc_lo = x.at("p_tot_mc_lo");
        r.p_tot_mc_hi = x.at("p_tot_mc_hi");
        r.p_corr_mc = x.at("p_corr_mc");
        r.r_disc_mc = x.at("r_disc_mc");
        b.rows.push_back(std::move(r));
    }
    return b;
}

std::string bundle_to_csv(const ReportBundle &bundle) {
    std::ostringstream os;
    const auto &cols = report_columns();
    for (size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto &r : bundle.rows) {
        double k = double(r.size);
        os << r.size << "," << index_list(r.injected) << "," << index_list(r.sites) << "," << r.bell_pairs << ","
           << r.noise << "," << sig6(r.p) << "," << sig6(r.p_tot / k) << "," << sig6(r.p_tot) << ","
           << sig6(r.p_corr / k) << "," << sig6(r.p_corr) << "," << sig6(r.p_tot > 0 ? r.p_corr / r.p_tot : 0.0)
           << "," << sig6(r.p_tot_decoder_aware) << "," << r.num_fixed << "," << sig6(r.r_up) << ","
           << r.num_postselected << "," << r.num_protected << "," << r.num_targets << ","
           << (r.solver_optimal ? 1 : 0) << "," << r.shots << "," << r.shots_kept << "," << sig6(r.p_tot_mc)
           << "," << sig6(r.p_tot_mc_lo) << "," << sig6(r.p_tot_mc_hi) << "," << sig6(r.p_corr_mc) << ","
           << sig6(r.r_disc_mc) << "\n";
    }
    return os.str();
}

CssCode build_config_code(const ExperimentConfig &config) {
    if (config.code == "steane") return steane_code();
    if (config.code == "hgp") return build_hgp({config.hgp_h1, config.hgp_h2});
    if (config.code == "file") return code_from_json(read_file(config.code_file));
    if (config.code != "bb") throw std::invalid_argument("unknown code kind: " + config.code);
    CssCode code = build_bb(config.bb);
    switch (config.basis) {
        case BasisSource::Protected: return protected_injection_basis(code, config.bb);
        case BasisSource::Short: return bb_injection_basis(code, config.bb, 1);
        case BasisSource::Computed: return code;
    }
    return code;
}

namespace {

struct Candidate {
    InjectableSet set;
    PreparationPlan plan;
    IlpModel model;
    Solution solution;
    InitialConfiguration init;
    Circuit circuit;
    double p_tot = 0;
};

template <class F>
auto stage(const char *name, F &&f) {
    try {
        return f();
    } catch (const StageError &) {
        throw;
    } catch (const std::exception &e) {
        throw StageError(name, e.what());
    }
}

}  // namespace

ReportBundle run_pipeline(const ExperimentConfig &config) {
    fs::path out;
    if (!config.output_dir.empty()) {
        out = config.output_dir;
        stage("setup", [&] {
            fs::create_directories(out);
            write_file(out / "config.json", config_to_json(config));
            return 0;
        });
    }

    CssCode code = stage("code", [&] {
        CssCode c = build_config_code(config);
        auto problems = validate(c);
        if (!problems.empty()) throw std::runtime_error("invalid code: " + problems.front());
        if (!out.empty()) write_file(out / "code.json", code_to_json(c));
        return c;
    });

    auto sets = stage("enumerate", [&] {
        EnumerateOptions opts;
        opts.max_set_size = config.max_size;
        std::vector<InjectableSet> kept;
        for (auto &s : enumerate_injectable(code, opts))
            if (s.config.injected.size() >= config.min_size && s.config.injected.size() <= config.max_size)
                kept.push_back(std::move(s));
        if (!out.empty()) write_file(out / "injectable.json", injectable_sets_to_json(kept));
        return kept;
    });

    // Select one configuration per size under the first (noise, p).
    const NoiseModel select_model = noise_model(config.noise.front(), config.p.front());
    std::map<size_t, Candidate> best;
    std::ostringstream candidates_csv;
    candidates_csv << "size,injected,sites,bell_pairs,protected,targets,optimal,num_fixed,p_tot\n";
    for (const auto &set : sets) {
        Candidate cand;
        cand.set = set;
        stage("optimize", [&] {
            cand.plan = build_preparation_plan(code, set.config, set.pairing);
            cand.model = build_milp(build_instance(code, cand.plan), config.objective);
            cand.solution = solve_exact(cand.model, 1e9, config.solver_nodes);
            cand.init = apply_solution(code, cand.plan, cand.model, cand.solution);
            return 0;
        });
        stage("circuit", [&] {
            cand.circuit = build_injection_circuit(code, cand.plan, cand.init, config.r2, {});
            return 0;
        });
        stage("analyze", [&] {
            Dem dem = build_dem(apply_noise(cand.circuit, select_model));
            cand.p_tot = first_order(dem, postselection_detectors(dem), FirstOrderMode::Undetectable).p_tot;
            return 0;
        });
        size_t k = set.config.injected.size();
        candidates_csv << k << "," << index_list(set.config.injected) << "," << index_list(set.config.sites) << ","
                       << cand.plan.bell.pairs.size() << "," << cand.init.protected_targets.size() << ","
                       << cand.plan.targets.size() << "," << (cand.solution.optimal ? 1 : 0) << ","
                       << cand.init.num_fixed() << "," << sig6(cand.p_tot) << "\n";
        auto it = best.find(k);
        if (it == best.end() || cand.p_tot < it->second.p_tot) best[k] = std::move(cand);
    }
    if (!out.empty()) write_file(out / "candidates.csv", candidates_csv.str());

    ReportBundle bundle;
    size_t row_index = 0;
    for (auto &[k, cand] : best) {
        fs::path dir;
        if (!out.empty()) {
            dir = out / ("size_" + std::to_string(k));
            stage("report", [&] {
                fs::create_directories(dir);
                write_file(dir / "plan.json", plan_to_json(cand.plan));
                write_file(dir / "model.lp", export_lp(cand.model.program));
                write_file(dir / "initial.json", initial_config_to_json(cand.init));
                write_file(dir / "circuit.txt", cand.circuit.to_text());
                return 0;
            });
        }
        for (const auto &noise : config.noise) {
            for (double p : config.p) {
                ReportRow row;
                row.size = k;
                row.injected = cand.set.config.injected;
                row.sites = cand.set.config.sites;
                row.bell_pairs = cand.plan.bell.pairs.size();
                row.noise = noise;
                row.p = p;
                row.num_fixed = cand.init.num_fixed();
                row.num_protected = cand.init.protected_targets.size();
                row.num_targets = cand.plan.targets.size();
                row.solver_optimal = cand.solution.optimal;

                Circuit noisy = apply_noise(cand.circuit, noise_model(noise, p));
                Dem dem = stage("analyze", [&] {
                    Dem d = build_dem(noisy);
                    auto post = postselection_detectors(d);
                    auto und = first_order(d, post, FirstOrderMode::Undetectable);
                    auto dec = first_order(d, post, FirstOrderMode::DecoderAware);
                    auto disc = discard_proxy(d, post);
                    row.p_tot = und.p_tot;
                    row.p_corr = und.p_corr;
                    row.p_tot_decoder_aware = dec.p_tot;
                    row.r_up = disc.r_up;
                    row.num_postselected = post.size();
                    return d;
                });
                std::string tag = noise + "_" + sig6(p);
                if (config.shots) {
                    uint64_t seed = splitmix(config.seed ^ splitmix(row_index));
                    McReport mc = stage("sample", [&] {
                        return run_experiment(noisy, dem, config.shots, seed, config.decoder, config.workers);
                    });
                    row.shots = mc.shots_total;
                    row.shots_kept = mc.shots_kept;
                    row.p_tot_mc = mc.p_tot();
                    auto ci = mc.p_tot_interval();
                    row.p_tot_mc_lo = ci.lo;
                    row.p_tot_mc_hi = ci.hi;
                    row.p_corr_mc = mc.p_corr();
                    row.r_disc_mc = mc.r_disc_mc;
                    if (!out.empty())
                        stage("report", [&] {
                            write_file(dir / ("mc_" + tag + ".json"), mc_report_to_json(mc));
                            return 0;
                        });
                }
                if (!out.empty())
                    stage("report", [&] {
                        write_file(dir / ("dem_" + tag + ".txt"), dem.to_text());
                        return 0;
                    });
                bundle.rows.push_back(std::move(row));
                ++row_index;
            }
        }
    }

    if (!out.empty())
        stage("report", [&] {
            write_file(out / "report.json", bundle_to_json(bundle));
            write_file(out / "report.csv", bundle_to_csv(bundle));
            return 0;
        });
    return bundle;
}

}  // namespace msi
