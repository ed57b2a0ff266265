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


#ifndef MSI_PIPELINE_H
#define MSI_PIPELINE_H

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "msi/codes.h"
#include "msi/protopt.h"
#include "msi/simulator.h"

namespace msi {

/// Where the logical basis of a BB code comes from.
enum class BasisSource { Protected, Short, Computed };

BasisSource parse_basis_source(const std::string &name);
const char *basis_source_name(BasisSource b);

struct ExperimentConfig {
    /// "bb", "hgp", "steane" or "file".
    std::string code = "bb";
    /// BB parameters; defaults to the gross code.
    BbSpec bb = gross_code_spec();
    /// HGP classical checks; default is two [3,1,3] repetition checks.
    BitMatrix hgp_h1, hgp_h2;
    std::string code_file;
    BasisSource basis = BasisSource::Protected;
    size_t min_size = 1, max_size = 6;
    /// Noise model names ("uniform", "asymmetric") crossed with p values.
    /// Configurations are selected under the first model at the first p.
    std::vector<std::string> noise = {"uniform"};
    std::vector<double> p = {1e-3};
    size_t r2 = 1;
    /// Monte Carlo shots per (configuration, model, p); 0 skips sampling.
    size_t shots = 0;
    uint64_t seed = 0;
    Objective objective = Objective::MaxProtection;
    DecoderKind decoder = DecoderKind::BpOsd;
    /// Artifacts and reports go here; empty keeps everything in memory.
    std::string output_dir;
    /// Branch-and-bound nodes per component before the incumbent is taken.
    size_t solver_nodes = 2000000;
    size_t workers = 0;
};

/// Parses and checks a config. Throws std::invalid_argument listing every
/// problem: unknown keys, wrong types, a missing seed, a missing code file.
ExperimentConfig config_from_json(const std::string &text);
std::string config_to_json(const ExperimentConfig &config);

struct ReportRow {
    size_t size = 0;
    std::vector<size_t> injected, sites;
    size_t bell_pairs = 0;
    std::string noise;
    double p = 0;
    double p_tot = 0, p_corr = 0;
    /// Decoder-aware first-order total, reported next to the selection value.
    double p_tot_decoder_aware = 0;
    size_t num_fixed = 0;
    size_t num_protected = 0, num_targets = 0;
    bool solver_optimal = false;
    double r_up = 0;
    /// Postselected detectors.
    size_t num_postselected = 0;
    size_t shots = 0, shots_kept = 0;
    double p_tot_mc = 0, p_tot_mc_lo = 0, p_tot_mc_hi = 0;
    double p_corr_mc = 0;
    double r_disc_mc = 0;

    bool operator==(const ReportRow &other) const = default;
};

struct ReportBundle {
    std::vector<ReportRow> rows;

    bool operator==(const ReportBundle &other) const = default;
};

/// Column order of the CSV report.
const std::vector<std::string> &report_columns();

std::string bundle_to_json(const ReportBundle &bundle);
ReportBundle bundle_from_json(const std::string &text);
/// One line per row; floats at 6 significant digits.
std::string bundle_to_csv(const ReportBundle &bundle);

/// The code a config describes, with its logical basis.
CssCode build_config_code(const ExperimentConfig &config);

struct StageError : std::runtime_error {
    std::string stage;
    StageError(const std::string &stage, const std::string &what)
        : std::runtime_error(stage + ": " + what), stage(stage) {}
};

/// Every stage in order: code, enumerate, optimize, circuit, analyze,
/// sample, report. For each injected-set size the configuration with the
/// lowest undetectable first-order p_tot (first in enumeration order on
/// ties) is kept. With an output directory, intermediate artifacts and
/// report.json / report.csv are written there. Failures are rethrown as
/// StageError.
ReportBundle run_pipeline(const ExperimentConfig &config);

}  // namespace msi

#endif  // MSI_PIPELINE_H
