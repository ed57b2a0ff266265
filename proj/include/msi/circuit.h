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

#ifndef MSI_CIRCUIT_H
#define MSI_CIRCUIT_H

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "msi/gf2.h"

namespace msi {

enum class Op : uint8_t {
    RX,
    RY,
    RZ,
    H,
    S,
    CX,
    MX,
    MZ,
    /// Noise-exempt Pauli-product measurement, used for logical readout.
    MPP,
    /// Explicit idle slot; receives idle noise.
    I,
    TICK,
    NOISE,
    DETECTOR,
    OBSERVABLE,
    /// Everything after this marker is exempt from noise insertion.
    IDEAL,
};

enum class NoiseKind : uint8_t { XERR, ZERR, MERR, DEP1, DEP2 };

enum class DetectorLabel : uint8_t { Fixed, RoundParity, Bulk };

const char *op_name(Op op);
const char *noise_name(NoiseKind k);
const char *label_name(DetectorLabel l);

struct Instruction {
    Op op = Op::TICK;
    /// Qubits; CX targets are flattened (control, target) pairs.
    std::vector<uint32_t> targets;
    NoiseKind noise = NoiseKind::XERR;
    double p = 0;
    /// Absolute measurement indices for DETECTOR / OBSERVABLE.
    std::vector<uint32_t> meas;
    DetectorLabel label = DetectorLabel::Bulk;
    uint32_t index = 0;
    /// Signed Pauli for MPP, over all circuit qubits.
    PauliTerm pauli;

    bool operator==(const Instruction &other) const = default;
};

struct NoiseModel {
    double p_in = 0;
    double p_m = 0;
    double p_idle = 0;
    double p_1q = 0;
    double p_2q = 0;
};

NoiseModel uniform_model(double p);
/// Two-qubit gates at p, every other channel at p / 10.
NoiseModel asymmetric_model(double p);

class Circuit {
   public:
    Circuit() = default;
    Circuit(size_t n_data, size_t n_ancilla) : n_data_(n_data), n_ancilla_(n_ancilla) {}

    size_t n_data() const { return n_data_; }
    size_t n_ancilla() const { return n_ancilla_; }
    size_t num_qubits() const { return n_data_ + n_ancilla_; }
    const std::vector<Instruction> &instructions() const { return ins_; }
    size_t num_measurements() const { return num_meas_; }
    size_t num_detectors() const { return num_det_; }
    size_t num_observables() const { return num_obs_; }

    /// Appends a gate/reset/measure/idle. Returns the first measurement index
    /// produced (for measurements) or SIZE_MAX.
    size_t append(Op op, std::vector<uint32_t> targets);
    size_t append_mpp(const PauliTerm &p);
    void append_noise(NoiseKind kind, double p, std::vector<uint32_t> targets);
    void append_tick() { append(Op::TICK, {}); }
    void append_ideal_marker() { append(Op::IDEAL, {}); }
    /// Returns the detector index.
    size_t append_detector(DetectorLabel label, std::vector<uint32_t> meas);
    void append_observable(uint32_t index, std::vector<uint32_t> meas);
    void push(Instruction ins);

    /// Detector labels in detector order.
    std::vector<DetectorLabel> detector_labels() const;
    /// Copy with every NOISE instruction removed.
    Circuit without_noise() const;
    bool has_noise() const;

    std::string to_text() const;
    static Circuit from_text(std::string_view text);

    bool operator==(const Circuit &other) const = default;

   private:
    size_t n_data_ = 0;
    size_t n_ancilla_ = 0;
    std::vector<Instruction> ins_;
    size_t num_meas_ = 0;
    size_t num_det_ = 0;
    size_t num_obs_ = 0;
};

/// Inserts one noise instruction after each ideal operation per the channel
/// table: RX -> ZERR, RY/RZ -> XERR, MX/MZ -> MERR, H/S -> DEP1, CX -> DEP2,
/// I -> DEP1 at the idle rate. Instructions after an IDEAL marker, MPP and
/// annotations are never noised. Throws if the circuit already has noise.
Circuit apply_noise(const Circuit &circuit, const NoiseModel &model);

struct CircuitVolume {
    size_t qubits = 0;
    size_t critical_path_2q = 0;
    size_t volume = 0;
};

/// qubits x (max over qubits of two-qubit gates touching that qubit), counting
/// only the noisy part of the circuit (before any IDEAL marker).
CircuitVolume circuit_volume(const Circuit &circuit);

}  // namespace msi

#endif  // MSI_CIRCUIT_H
