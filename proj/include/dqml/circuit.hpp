#pragma once

#include "dqml/statevector.hpp"

#include <array>
#include <string>
#include <vector>

namespace dqml {

enum class GateKind { H, CZ, RX, RZ, RZZ, ControlledRX, ControlledRZ, HaarBlock };

// How a gate's angle is produced at evaluation time.
struct AngleBinding {
    enum class Kind { None, Fixed, Param, FeatureRZ, FeatureRZZ };
    Kind kind = Kind::None;
    double fixed = 0.0;
    int param = -1;
    int feat_i = -1;
    int feat_j = -1;

    static AngleBinding none() { return {}; }
    static AngleBinding fixed_angle(double a) { return {Kind::Fixed, a, -1, -1, -1}; }
    static AngleBinding parameter(int idx) { return {Kind::Param, 0.0, idx, -1, -1}; }
    static AngleBinding feature(int i) { return {Kind::FeatureRZ, 0.0, -1, i, -1}; }
    static AngleBinding feature_zz(int i, int j) { return {Kind::FeatureRZZ, 0.0, -1, i, j}; }
};

// One gate. q0/q1 meaning by kind:
//   H, RX, RZ:                  q0 = target
//   CZ, RZZ:                    q0, q1 = targets
//   ControlledRX, ControlledRZ: q0 = control, q1 = target
//   HaarBlock:                  q0..q1 = contiguous qubit range, block_index
//                               selects the per-processor input unitary
struct GateSpec {
    GateKind kind;
    int q0 = -1;
    int q1 = -1;
    int control_value = -1;
    int block_index = -1;
    AngleBinding angle;
};

enum class Embedding { ChshOptimal, ChshAlternative, FeatureMap, HaarRandom };
enum class MixingScope { Global, Local };

struct CircuitConfig {
    int qubits_per_proc = 4;
    int n_bell = 0;
    int conv_depth = 1;
    int second_stage_depth = 0;
    int mixing_depth = 0;
    MixingScope mixing_scope = MixingScope::Global;
    Embedding embedding = Embedding::FeatureMap;

    int num_qubits() const { return 2 * qubits_per_proc; }
    int feature_count() const { return 2 * qubits_per_proc; }
    void validate() const;
};

struct Segment {
    std::string name;
    int begin = 0;
    int end = 0;
};

struct CircuitTemplate {
    CircuitConfig config;
    std::vector<GateSpec> gates;
    int param_count = 0;
    int num_qubits = 0;
    std::vector<Segment> segments;
    std::array<int, 2> output_qubits{-1, -1};  // processor A, processor B
    std::vector<int> pooled_qubits;

    // Human-readable listing with parameter segments, for golden-file tests.
    std::string dump() const;
};

// Evaluation-time inputs: a flat feature vector (processor A features first)
// or one Haar unitary per processor, depending on the embedding kind.
struct EvalInput {
    const double* features = nullptr;
    int feature_count = 0;
    const GateMatrix* haar_a = nullptr;
    const GateMatrix* haar_b = nullptr;
};

// Joint outcome distribution over (a, b), index 2a + b.
using OutcomeDistribution = std::array<double, 4>;

// Per-processor feature embedding: H on each local qubit, RZ(x_i) per qubit,
// RZZ(0.5 (pi - x_i)(pi - x_j)) on nearest-neighbor local pairs. The
// haar_random embedding emits one dense block per processor instead.
std::vector<GateSpec> build_embedding(const CircuitConfig& config);

// One brick-wall convolution depth across both processors. Odd depth_index
// (1-based) places blocks on local pairs (0,1),(2,3); even on (1,2),(3,0).
// Each block is H(x)H, CZ, RX(theta)(x)RX(theta'); 2 parameters per block.
std::vector<GateSpec> build_conv_layer(int qubits_per_proc, int depth_index,
                                       int param_offset_a, int param_offset_b);

// Deferred-measurement pooling for the given stage (1 = qpp-qubit stage,
// 2 = two-qubit stage). Per (measured m, kept r) pair and control value v,
// emits controlled-RZ then controlled-RX on r; 4 parameters per pair.
std::vector<GateSpec> build_pool(int qubits_per_proc, int stage,
                                 int param_offset_a, int param_offset_b);

// Trainable entanglement-mixing layers placed before the embedding.
// Global scope: brick-wall blocks over all qubits as one closed chain.
// Local scope: per-processor convolution layers.
std::vector<GateSpec> build_mixing(int total_qubits, int mixing_depth,
                                   MixingScope scope, int param_offset);

CircuitTemplate assemble(const CircuitConfig& config);

double resolve_angle(const AngleBinding& binding, const double* params, const EvalInput& input);

// Applies the template's gates in order to an existing state.
void run_template(const CircuitTemplate& t, const std::vector<double>& params,
                  const EvalInput& input, Statevector& state);

// Full forward pass: Bell-n initial state, all gates, joint marginal over the
// two output qubits.
OutcomeDistribution evaluate(const CircuitTemplate& t, const std::vector<double>& params,
                             const EvalInput& input);

}  // namespace dqml
