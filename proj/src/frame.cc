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


#include "msi/frame.h"

#include <stdexcept>

namespace msi {

size_t noise_outcomes(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::DEP1:
            return 3;
        case NoiseKind::DEP2:
            return 15;
        default:
            return 1;
    }
}

std::pair<char, char> noise_outcome(NoiseKind kind, size_t k) {
    static const char letters[4] = {'I', 'X', 'Y', 'Z'};
    switch (kind) {
        case NoiseKind::XERR:
            return {'X', 'I'};
        case NoiseKind::ZERR:
            return {'Z', 'I'};
        case NoiseKind::MERR:
            return {'I', 'I'};
        case NoiseKind::DEP1:
            return {letters[1 + k], 'I'};
        case NoiseKind::DEP2:
            return {letters[(k + 1) / 4], letters[(k + 1) % 4]};
    }
    return {'I', 'I'};
}

FrameProgram compile_frame_program(const Circuit &circuit) {
    FrameProgram prog;
    prog.num_qubits = circuit.num_qubits();
    std::vector<int64_t> last_meas(prog.num_qubits, -1);
    uint32_t meas = 0;
    const auto &ins = circuit.instructions();
    for (size_t i = 0; i < ins.size(); ++i) {
        const auto &in = ins[i];
        auto single = [&](FrameOp::Kind kind) {
            for (uint32_t q : in.targets) prog.ops.push_back({kind, q, 0, 0});
        };
        switch (in.op) {
            case Op::RX:
                single(FrameOp::ResetX);
                break;
            case Op::RY:
                single(FrameOp::ResetY);
                break;
            case Op::RZ:
                single(FrameOp::ResetZ);
                break;
            case Op::H:
                single(FrameOp::H);
                break;
            case Op::S:
                single(FrameOp::S);
                break;
            case Op::CX:
                for (size_t t = 0; t + 1 < in.targets.size(); t += 2) {
                    prog.ops.push_back({FrameOp::CX, in.targets[t], in.targets[t + 1], 0});
                }
                break;
            case Op::MX:
            case Op::MZ:
                for (uint32_t q : in.targets) {
                    prog.ops.push_back({in.op == Op::MX ? FrameOp::MeasX : FrameOp::MeasZ, q, 0, meas});
                    last_meas[q] = meas++;
                }
                break;
            case Op::MPP: {
                FrameProgram::Mpp m;
                for (size_t q = 0; q < in.pauli.num_qubits(); ++q) {
                    char c = in.pauli.letter(q);
                    if (c == 'X') m.x_only.push_back(uint32_t(q));
                    if (c == 'Z') m.z_only.push_back(uint32_t(q));
                    if (c == 'Y') m.y.push_back(uint32_t(q));
                }
                prog.ops.push_back({FrameOp::MeasPauli, 0, uint32_t(prog.mpps.size()), meas++});
                prog.mpps.push_back(std::move(m));
                break;
            }
            case Op::NOISE: {
                size_t step = in.noise == NoiseKind::DEP2 ? 2 : 1;
                for (size_t t = 0; t + step - 1 < in.targets.size(); t += step) {
                    NoiseSite s;
                    s.kind = in.noise;
                    s.p = in.p;
                    s.a = in.targets[t];
                    s.b = step == 2 ? in.targets[t + 1] : 0;
                    if (in.noise == NoiseKind::MERR) {
                        if (last_meas[s.a] < 0) throw std::invalid_argument("frame: MERR before any measurement");
                        s.meas = uint32_t(last_meas[s.a]);
                    }
                    s.instruction = i;
                    s.op = prog.ops.size();
                    prog.ops.push_back({FrameOp::Noise, s.a, s.b, uint32_t(prog.sites.size())});
                    prog.sites.push_back(s);
                }
                break;
            }
            case Op::DETECTOR:
                prog.detectors.push_back(in.meas);
                prog.labels.push_back(in.label);
                break;
            case Op::OBSERVABLE:
                if (prog.observables.size() <= in.index) prog.observables.resize(in.index + 1);
                for (uint32_t m : in.meas) prog.observables[in.index].push_back(m);
                break;
            case Op::I:
            case Op::TICK:
            case Op::IDEAL:
                break;
        }
    }
    prog.num_measurements = meas;
    return prog;
}

}  // namespace msi
