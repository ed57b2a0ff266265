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


#ifndef MSI_FRAME_H
#define MSI_FRAME_H

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "msi/circuit.h"

namespace msi {

/// One elementary operation of a circuit flattened for Pauli-frame
/// propagation; multi-target instructions become one op per target (pair).
struct FrameOp {
    enum Kind : uint8_t { ResetX, ResetY, ResetZ, H, S, CX, MeasX, MeasZ, MeasPauli, Noise };
    Kind kind = H;
    uint32_t a = 0, b = 0;
    /// Measurement index (measurements, MERR noise) or MPP / noise-site index.
    uint32_t index = 0;
};

/// A noise location: one target (or target pair) of a NOISE instruction.
struct NoiseSite {
    NoiseKind kind = NoiseKind::XERR;
    double p = 0;
    uint32_t a = 0, b = 0;
    /// Measurement flipped by MERR.
    uint32_t meas = 0;
    /// Index of the NOISE instruction in the source circuit.
    size_t instruction = 0;
    /// Position of the matching Noise op in FrameProgram::ops.
    size_t op = 0;
};

/// Number of elementary outcomes of a channel: 1 for XERR/ZERR/MERR, 3 for
/// DEP1, 15 for DEP2.
size_t noise_outcomes(NoiseKind kind);
/// Outcome k as a pair of single-qubit letters (second is 'I' for one-qubit
/// channels); DEP2 outcomes run over {I,X,Y,Z}^2 minus II in that order.
std::pair<char, char> noise_outcome(NoiseKind kind, size_t k);

struct FrameProgram {
    size_t num_qubits = 0;
    size_t num_measurements = 0;
    std::vector<FrameOp> ops;
    std::vector<NoiseSite> sites;
    /// X and Z support masks of MPP measurements, as qubit lists per letter.
    struct Mpp {
        std::vector<uint32_t> x_only, z_only, y;
    };
    std::vector<Mpp> mpps;
    std::vector<std::vector<uint32_t>> detectors;
    std::vector<std::vector<uint32_t>> observables;
    std::vector<DetectorLabel> labels;
};

/// Throws std::invalid_argument for MERR noise on a qubit never measured.
FrameProgram compile_frame_program(const Circuit &circuit);

/// 64 lanes of Pauli frames plus measurement flips.
struct FrameState {
    std::vector<uint64_t> x, z, meas;

    FrameState(size_t qubits, size_t measurements) : x(qubits, 0), z(qubits, 0), meas(measurements, 0) {}
    void clear() {
        std::fill(x.begin(), x.end(), 0);
        std::fill(z.begin(), z.end(), 0);
        std::fill(meas.begin(), meas.end(), 0);
    }
};

/// Applies a non-noise op. Resets clear the frame, measurements record the
/// flip and drop the component the measurement leaves trivial.
inline void frame_apply(const FrameProgram &prog, const FrameOp &op, FrameState &f) {
    switch (op.kind) {
        case FrameOp::ResetX:
        case FrameOp::ResetY:
        case FrameOp::ResetZ:
            f.x[op.a] = 0;
            f.z[op.a] = 0;
            break;
        case FrameOp::H:
            std::swap(f.x[op.a], f.z[op.a]);
            break;
        case FrameOp::S:
            f.z[op.a] ^= f.x[op.a];
            break;
        case FrameOp::CX:
            f.x[op.b] ^= f.x[op.a];
            f.z[op.a] ^= f.z[op.b];
            break;
        case FrameOp::MeasX:
            f.meas[op.index] = f.z[op.a];
            f.x[op.a] = 0;
            break;
        case FrameOp::MeasZ:
            f.meas[op.index] = f.x[op.a];
            f.z[op.a] = 0;
            break;
        case FrameOp::MeasPauli: {
            const auto &m = prog.mpps[op.b];
            uint64_t flip = 0;
            for (uint32_t q : m.x_only) flip ^= f.z[q];
            for (uint32_t q : m.z_only) flip ^= f.x[q];
            for (uint32_t q : m.y) flip ^= f.x[q] ^ f.z[q];
            f.meas[op.index] = flip;
            break;
        }
        case FrameOp::Noise:
            break;
    }
}

/// XORs a letter into the frame on the given lanes.
inline void frame_inject(FrameState &f, uint32_t q, char letter, uint64_t lanes) {
    if (letter == 'X' || letter == 'Y') f.x[q] ^= lanes;
    if (letter == 'Z' || letter == 'Y') f.z[q] ^= lanes;
}

inline uint64_t frame_parity(const FrameState &f, const std::vector<uint32_t> &meas) {
    uint64_t v = 0;
    for (uint32_t m : meas) v ^= f.meas[m];
    return v;
}

}  // namespace msi

#endif  // MSI_FRAME_H
