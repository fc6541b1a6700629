#include "dqml/statevector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dqml {

namespace {

void check_qubit(const Statevector& state, int q, const char* what) {
    if (q < 0 || q >= state.num_qubits())
        throw std::invalid_argument(std::string(what) + " index " + std::to_string(q) +
                                    " out of range for " + std::to_string(state.num_qubits()) +
                                    " qubits");
}

}  // namespace

Statevector::Statevector(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > 10)
        throw std::invalid_argument("num_qubits must be in 1..10");
    amps_.assign(std::size_t{1} << num_qubits, cd{0.0, 0.0});
    amps_[0] = cd{1.0, 0.0};
}

double Statevector::norm_sq() const {
    double s = 0.0;
    for (const cd& a : amps_) s += a.real() * a.real() + a.imag() * a.imag();
    return s;
}

double GateMatrix::unitarity_defect() const {
    double worst = 0.0;
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            cd acc{0.0, 0.0};
            for (int k = 0; k < dim; ++k) acc += std::conj(at(k, r)) * at(k, c);
            if (r == c) acc -= 1.0;
            worst = std::max(worst, std::abs(acc));
        }
    }
    return worst;
}

GateMatrix gate_h() {
    const double s = M_SQRT1_2;
    return {2, {cd{s, 0}, cd{s, 0}, cd{s, 0}, cd{-s, 0}}};
}

GateMatrix gate_x() {
    return {2, {cd{0, 0}, cd{1, 0}, cd{1, 0}, cd{0, 0}}};
}

GateMatrix gate_z() {
    return {2, {cd{1, 0}, cd{0, 0}, cd{0, 0}, cd{-1, 0}}};
}

GateMatrix gate_cz() {
    GateMatrix g{4, std::vector<cd>(16, cd{0, 0})};
    g.at(0, 0) = g.at(1, 1) = g.at(2, 2) = cd{1, 0};
    g.at(3, 3) = cd{-1, 0};
    return g;
}

GateMatrix gate_rx(double theta) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return {2, {cd{c, 0}, cd{0, -s}, cd{0, -s}, cd{c, 0}}};
}

GateMatrix gate_rz(double theta) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return {2, {cd{c, -s}, cd{0, 0}, cd{0, 0}, cd{c, s}}};
}

GateMatrix gate_rzz(double theta) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    GateMatrix g{4, std::vector<cd>(16, cd{0, 0})};
    g.at(0, 0) = g.at(3, 3) = cd{c, -s};
    g.at(1, 1) = g.at(2, 2) = cd{c, s};
    return g;
}

Statevector init_bell(int n_pairs, int qubits_per_proc) {
    if (qubits_per_proc != 2 && qubits_per_proc != 4)
        throw std::invalid_argument("qubits_per_proc must be 2 or 4");
    if (n_pairs < 0 || n_pairs > qubits_per_proc)
        throw std::invalid_argument("n_pairs must be in 0..qubits_per_proc");
    Statevector state(2 * qubits_per_proc);
    auto& a = state.amps();
    a[0] = cd{0, 0};
    // Pair j contributes (|00> + |11>)/sqrt(2) on qubits (j, qpp + j).
    double amp = std::pow(M_SQRT1_2, n_pairs);
    std::size_t combos = std::size_t{1} << n_pairs;
    for (std::size_t bits = 0; bits < combos; ++bits) {
        std::size_t idx = 0;
        for (int j = 0; j < n_pairs; ++j) {
            if ((bits >> j) & 1) idx |= (std::size_t{1} << j) | (std::size_t{1} << (qubits_per_proc + j));
        }
        a[idx] = cd{amp, 0};
    }
    return state;
}

void apply_gate(Statevector& state, const GateMatrix& gate, const std::vector<int>& targets) {
    int k = static_cast<int>(targets.size());
    if (k < 1 || k > 4) throw std::invalid_argument("apply_gate supports 1..4 targets");
    if (gate.dim != (1 << k)) throw std::invalid_argument("gate dimension does not match target count");
    std::size_t t_mask = 0;
    for (int q : targets) {
        check_qubit(state, q, "target");
        std::size_t bit = std::size_t{1} << q;
        if (t_mask & bit) throw std::invalid_argument("duplicate target qubit");
        t_mask |= bit;
    }
    const int g = gate.dim;
    cd v[16], w[16];
    std::size_t offs[16];
    for (int i = 0; i < g; ++i) {
        std::size_t o = 0;
        for (int b = 0; b < k; ++b)
            if ((i >> b) & 1) o |= std::size_t{1} << targets[b];
        offs[i] = o;
    }
    cd* a = state.data();
    const std::size_t n = state.dim();
    for (std::size_t base = 0; base < n; ++base) {
        if (base & t_mask) continue;
        for (int i = 0; i < g; ++i) v[i] = a[base | offs[i]];
        for (int r = 0; r < g; ++r) {
            cd acc{0, 0};
            for (int c = 0; c < g; ++c) acc += gate.at(r, c) * v[c];
            w[r] = acc;
        }
        for (int i = 0; i < g; ++i) a[base | offs[i]] = w[i];
    }
}

void apply_controlled(Statevector& state, int control, int control_value,
                      const GateMatrix& gate, int target) {
    check_qubit(state, control, "control");
    check_qubit(state, target, "target");
    if (control == target) throw std::invalid_argument("control equals target");
    if (control_value != 0 && control_value != 1)
        throw std::invalid_argument("control_value must be 0 or 1");
    if (gate.dim != 2) throw std::invalid_argument("controlled gate must be single-qubit");
    cd* a = state.data();
    const std::size_t n = state.dim();
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t tbit = std::size_t{1} << target;
    const std::size_t want = control_value ? cbit : 0;
    const cd m00 = gate.at(0, 0), m01 = gate.at(0, 1), m10 = gate.at(1, 0), m11 = gate.at(1, 1);
    for (std::size_t j = 0; j < n; ++j) {
        if ((j & tbit) || ((j & cbit) != want)) continue;
        cd x = a[j], y = a[j | tbit];
        a[j] = m00 * x + m01 * y;
        a[j | tbit] = m10 * x + m11 * y;
    }
}

std::vector<double> marginal_probs(const Statevector& state, const std::vector<int>& qubits) {
    int k = static_cast<int>(qubits.size());
    if (k < 1 || k > state.num_qubits()) throw std::invalid_argument("bad marginal qubit count");
    std::size_t seen = 0;
    for (int q : qubits) {
        check_qubit(state, q, "marginal qubit");
        std::size_t bit = std::size_t{1} << q;
        if (seen & bit) throw std::invalid_argument("duplicate marginal qubit");
        seen |= bit;
    }
    std::vector<double> probs(std::size_t{1} << k, 0.0);
    const cd* a = state.data();
    const std::size_t n = state.dim();
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t out = 0;
        for (int i = 0; i < k; ++i) out |= ((j >> qubits[i]) & 1) << i;
        probs[out] += a[j].real() * a[j].real() + a[j].imag() * a[j].imag();
    }
    return probs;
}

void apply_h(Statevector& state, int q) {
    check_qubit(state, q, "target");
    cd* a = state.data();
    const std::size_t n = state.dim();
    const std::size_t step = std::size_t{1} << q;
    const double s = M_SQRT1_2;
    for (std::size_t base = 0; base < n; base += 2 * step) {
        for (std::size_t j = base; j < base + step; ++j) {
            cd x = a[j], y = a[j + step];
            a[j] = cd{s * (x.real() + y.real()), s * (x.imag() + y.imag())};
            a[j + step] = cd{s * (x.real() - y.real()), s * (x.imag() - y.imag())};
        }
    }
}

void apply_rx(Statevector& state, int q, double theta) {
    check_qubit(state, q, "target");
    cd* a = state.data();
    const std::size_t n = state.dim();
    const std::size_t step = std::size_t{1} << q;
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    for (std::size_t base = 0; base < n; base += 2 * step) {
        for (std::size_t j = base; j < base + step; ++j) {
            cd x = a[j], y = a[j + step];
            a[j] = cd{c * x.real() + s * y.imag(), c * x.imag() - s * y.real()};
            a[j + step] = cd{s * x.imag() + c * y.real(), -s * x.real() + c * y.imag()};
        }
    }
}

void apply_rz(Statevector& state, int q, double theta) {
    check_qubit(state, q, "target");
    cd* a = state.data();
    const std::size_t n = state.dim();
    const std::size_t step = std::size_t{1} << q;
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    for (std::size_t base = 0; base < n; base += 2 * step) {
        for (std::size_t j = base; j < base + step; ++j) {
            cd x = a[j];  // phase exp(-i theta/2)
            a[j] = cd{c * x.real() + s * x.imag(), c * x.imag() - s * x.real()};
            cd y = a[j + step];  // phase exp(+i theta/2)
            a[j + step] = cd{c * y.real() - s * y.imag(), c * y.imag() + s * y.real()};
        }
    }
}

void apply_cz(Statevector& state, int q1, int q2) {
    check_qubit(state, q1, "target");
    check_qubit(state, q2, "target");
    if (q1 == q2) throw std::invalid_argument("CZ qubits must differ");
    cd* a = state.data();
    const std::size_t n = state.dim();
    const std::size_t mask = (std::size_t{1} << q1) | (std::size_t{1} << q2);
    for (std::size_t j = 0; j < n; ++j) {
        if ((j & mask) == mask) a[j] = -a[j];
    }
}

void apply_rzz(Statevector& state, int q1, int q2, double theta) {
    check_qubit(state, q1, "target");
    check_qubit(state, q2, "target");
    if (q1 == q2) throw std::invalid_argument("RZZ qubits must differ");
    cd* a = state.data();
    const std::size_t n = state.dim();
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    for (std::size_t j = 0; j < n; ++j) {
        // Z(x)Z eigenvalue +1 when the bits agree.
        double sj = (((j >> q1) ^ (j >> q2)) & 1) ? s : -s;
        cd x = a[j];
        a[j] = cd{c * x.real() - sj * x.imag(), c * x.imag() + sj * x.real()};
    }
}

void apply_crx(Statevector& state, int control, int control_value, int target, double theta) {
    check_qubit(state, control, "control");
    check_qubit(state, target, "target");
    if (control == target) throw std::invalid_argument("control equals target");
    cd* a = state.data();
    const std::size_t n = state.dim();
    const std::size_t step = std::size_t{1} << target;
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t want = control_value ? cbit : 0;
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    for (std::size_t base = 0; base < n; base += 2 * step) {
        for (std::size_t j = base; j < base + step; ++j) {
            if ((j & cbit) != want) continue;
            cd x = a[j], y = a[j + step];
            a[j] = cd{c * x.real() + s * y.imag(), c * x.imag() - s * y.real()};
            a[j + step] = cd{s * x.imag() + c * y.real(), -s * x.real() + c * y.imag()};
        }
    }
}

void apply_crz(Statevector& state, int control, int control_value, int target, double theta) {
    check_qubit(state, control, "control");
    check_qubit(state, target, "target");
    if (control == target) throw std::invalid_argument("control equals target");
    cd* a = state.data();
    const std::size_t n = state.dim();
    const std::size_t tbit = std::size_t{1} << target;
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t want = control_value ? cbit : 0;
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    for (std::size_t j = 0; j < n; ++j) {
        if ((j & cbit) != want) continue;
        double sj = (j & tbit) ? -s : s;  // exp(-i theta/2) on |0>, exp(+i theta/2) on |1>
        cd x = a[j];
        a[j] = cd{c * x.real() + sj * x.imag(), c * x.imag() - sj * x.real()};
    }
}

void apply_dense_block(Statevector& state, int q0, int k, const GateMatrix& block) {
    if (k < 1 || k > 4) throw std::invalid_argument("dense block supports 1..4 qubits");
    check_qubit(state, q0, "block base");
    check_qubit(state, q0 + k - 1, "block top");
    if (block.dim != (1 << k)) throw std::invalid_argument("block dimension mismatch");
    const int m = block.dim;
    cd* a = state.data();
    const std::size_t n = state.dim();
    const std::size_t lowCount = std::size_t{1} << q0;
    const std::size_t highCount = n >> (q0 + k);
    cd v[16], w[16];
    for (std::size_t hi = 0; hi < highCount; ++hi) {
        const std::size_t hbase = hi << (q0 + k);
        for (std::size_t lo = 0; lo < lowCount; ++lo) {
            const std::size_t base = hbase | lo;
            for (int i = 0; i < m; ++i) v[i] = a[base + (std::size_t(i) << q0)];
            const cd* row = block.m.data();
            for (int r = 0; r < m; ++r) {
                double re = 0, im = 0;
                for (int c = 0; c < m; ++c) {
                    double xr = row[c].real(), xi = row[c].imag();
                    double vr = v[c].real(), vi = v[c].imag();
                    re += xr * vr - xi * vi;
                    im += xr * vi + xi * vr;
                }
                w[r] = cd{re, im};
                row += m;
            }
            for (int i = 0; i < m; ++i) a[base + (std::size_t(i) << q0)] = w[i];
        }
    }
}

}  // namespace dqml
