#pragma once

#include <complex>
#include <vector>

namespace dqml {

using cd = std::complex<double>;

// Dense statevector over num_qubits qubits (<= 10 supported).
// Basis index bit k is qubit k; qubit 0 is least significant.
// Processor A occupies the low qubits, processor B the high qubits.
class Statevector {
public:
    explicit Statevector(int num_qubits);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }

    std::vector<cd>& amps() { return amps_; }
    const std::vector<cd>& amps() const { return amps_; }

    cd* data() { return amps_.data(); }
    const cd* data() const { return amps_.data(); }

    double norm_sq() const;

private:
    int num_qubits_;
    std::vector<cd> amps_;
};

// Dense gate matrix, row-major, dim x dim with dim a power of two.
struct GateMatrix {
    int dim = 0;
    std::vector<cd> m;

    cd& at(int r, int c) { return m[static_cast<std::size_t>(r) * dim + c]; }
    const cd& at(int r, int c) const { return m[static_cast<std::size_t>(r) * dim + c]; }

    // Max-norm unitarity defect ||G'G - I||_max.
    double unitarity_defect() const;
};

// Named gates. Rotation convention: R_P(theta) = exp(-i theta P / 2).
GateMatrix gate_h();
GateMatrix gate_x();
GateMatrix gate_z();
GateMatrix gate_cz();
GateMatrix gate_rx(double theta);
GateMatrix gate_rz(double theta);
GateMatrix gate_rzz(double theta);

// n_pairs Bell pairs |Phi+> on qubits (j, qubits_per_proc + j), j < n_pairs;
// remaining qubits |0>. Total 2 * qubits_per_proc qubits.
Statevector init_bell(int n_pairs, int qubits_per_proc);

// General dense gate on arbitrary distinct targets; targets[0] addresses the
// least significant bit of the gate's index space. Used by builders and test
// oracles; hot paths go through the specialized kernels below.
void apply_gate(Statevector& state, const GateMatrix& gate, const std::vector<int>& targets);

// Single-qubit gate on target applied only where the control qubit equals
// control_value.
void apply_controlled(Statevector& state, int control, int control_value,
                      const GateMatrix& gate, int target);

// Probability of each outcome over the listed qubits, marginalizing the rest.
// qubits[i] supplies bit i of the outcome index.
std::vector<double> marginal_probs(const Statevector& state, const std::vector<int>& qubits);

// Specialized kernels (in-place, no allocation).
void apply_h(Statevector& state, int q);
void apply_rx(Statevector& state, int q, double theta);
void apply_rz(Statevector& state, int q, double theta);
void apply_cz(Statevector& state, int q1, int q2);
void apply_rzz(Statevector& state, int q1, int q2, double theta);
void apply_crx(Statevector& state, int control, int control_value, int target, double theta);
void apply_crz(Statevector& state, int control, int control_value, int target, double theta);

// Dense block on the contiguous qubit range [q0, q0 + k); block.dim == 2^k.
void apply_dense_block(Statevector& state, int q0, int k, const GateMatrix& block);

}  // namespace dqml
