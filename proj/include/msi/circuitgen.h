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


#ifndef MSI_CIRCUITGEN_H
#define MSI_CIRCUITGEN_H

#include <string>
#include <utility>
#include <vector>

#include "msi/circuit.h"
#include "msi/codes.h"
#include "msi/injector.h"
#include "msi/protopt.h"

namespace msi {

enum class ScheduleKind { EdgeColoring, ProductColoration, Explicit };

ScheduleKind parse_schedule_kind(const std::string &name);
const char *schedule_kind_name(ScheduleKind kind);

/// One CX layer is a list of (stabilizer, data qubit) edges; stabilizers are
/// numbered X rows first, then Z rows.
using SeLayers = std::vector<std::vector<std::pair<size_t, size_t>>>;

struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::EdgeColoring;
    /// Classical checks of a hypergraph product code (ProductColoration).
    BitMatrix h1, h2;
    /// Layers for Explicit.
    SeLayers layers;
};

/// Proper edge coloring of the Tanner graph with max-degree colors. Edges are
/// visited data qubit ascending, then row ascending, each taking the
/// smallest color free at its row; a clash at the qubit is repaired by
/// flipping an alternating path. Returns the color per edge in visiting
/// order and the number of colors.
std::pair<std::vector<size_t>, size_t> edge_coloring(const BitMatrix &h);

/// CX layers of one round: all X-check layers, then all Z-check layers.
SeLayers se_layers(const CssCode &code, const ScheduleSpec &schedule);

/// Throws std::invalid_argument unless every stabilizer edge appears exactly
/// once, no qubit is used twice in a layer, and no X-check layer follows a
/// Z-check layer.
void validate_layers(const CssCode &code, const SeLayers &layers);

/// One syndrome-extraction round on n data + (m_x + m_z) ancillas. Ancillas
/// are reset right before their first CX and measured right after their last;
/// active qubits without an operation in a time step get an explicit I.
Circuit build_se_round(const CssCode &code, const ScheduleSpec &schedule);

/// Y = i X Z for logical i, Hermitian.
PauliTerm logical_y(const CssCode &code, size_t i);

/// Preparation fused into the first round, then 1 + r2 further noisy rounds,
/// then (noise-exempt) one more round and an MPP of Y for every injected
/// logical. Round 1 gives a fixed detector per row of F, round 2 a
/// round-parity detector per row, later rounds bulk detectors.
Circuit build_injection_circuit(const CssCode &code, const PreparationPlan &plan, const InitialConfiguration &init,
                                size_t r2, const ScheduleSpec &schedule);

}  // namespace msi

#endif  // MSI_CIRCUITGEN_H
