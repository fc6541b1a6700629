#include "dqml/grad.hpp"

#include <stdexcept>

namespace dqml {

namespace {

// Im<lambda| X_t |psi> restricted to control == want (mask 0 = unrestricted).
double im_dot_x(const Statevector& lam, const Statevector& psi, int target,
                std::size_t cmask, std::size_t want) {
    const cd* l = lam.data();
    const cd* s = psi.data();
    const std::size_t n = psi.dim();
    const std::size_t step = std::size_t{1} << target;
    double acc = 0.0;
    for (std::size_t base = 0; base < n; base += 2 * step) {
        for (std::size_t j = base; j < base + step; ++j) {
            if ((j & cmask) != want) continue;
            const cd l0 = l[j], l1 = l[j + step];
            const cd s0 = s[j], s1 = s[j + step];
            // Im(conj(l0) s1) + Im(conj(l1) s0)
            acc += l0.real() * s1.imag() - l0.imag() * s1.real();
            acc += l1.real() * s0.imag() - l1.imag() * s0.real();
        }
    }
    return acc;
}

// Im<lambda| Z_t |psi> restricted to control == want.
double im_dot_z(const Statevector& lam, const Statevector& psi, int target,
                std::size_t cmask, std::size_t want) {
    const cd* l = lam.data();
    const cd* s = psi.data();
    const std::size_t n = psi.dim();
    const std::size_t tbit = std::size_t{1} << target;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if ((j & cmask) != want) continue;
        double im = l[j].real() * s[j].imag() - l[j].imag() * s[j].real();
        acc += (j & tbit) ? -im : im;
    }
    return acc;
}

// Im<lambda| Z_a Z_b |psi>.
double im_dot_zz(const Statevector& lam, const Statevector& psi, int qa, int qb) {
    const cd* l = lam.data();
    const cd* s = psi.data();
    const std::size_t n = psi.dim();
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double im = l[j].real() * s[j].imag() - l[j].imag() * s[j].real();
        acc += (((j >> qa) ^ (j >> qb)) & 1) ? -im : im;
    }
    return acc;
}

GateMatrix adjoint_of(const GateMatrix& g) {
    GateMatrix out{g.dim, std::vector<cd>(g.m.size())};
    for (int r = 0; r < g.dim; ++r)
        for (int c = 0; c < g.dim; ++c) out.at(r, c) = std::conj(g.at(c, r));
    return out;
}

void apply_spec(const GateSpec& g, const double* p, const EvalInput& input, Statevector& state,
                double sign, const GateMatrix* haar_a, const GateMatrix* haar_b) {
    switch (g.kind) {
        case GateKind::H:
            apply_h(state, g.q0);
            break;
        case GateKind::CZ:
            apply_cz(state, g.q0, g.q1);
            break;
        case GateKind::RX:
            apply_rx(state, g.q0, sign * resolve_angle(g.angle, p, input));
            break;
        case GateKind::RZ:
            apply_rz(state, g.q0, sign * resolve_angle(g.angle, p, input));
            break;
        case GateKind::RZZ:
            apply_rzz(state, g.q0, g.q1, sign * resolve_angle(g.angle, p, input));
            break;
        case GateKind::ControlledRX:
            apply_crx(state, g.q0, g.control_value, g.q1, sign * resolve_angle(g.angle, p, input));
            break;
        case GateKind::ControlledRZ:
            apply_crz(state, g.q0, g.control_value, g.q1, sign * resolve_angle(g.angle, p, input));
            break;
        case GateKind::HaarBlock: {
            const GateMatrix* block = g.block_index == 0 ? haar_a : haar_b;
            if (block == nullptr)
                throw std::invalid_argument("haar embedding requires per-processor unitaries");
            apply_dense_block(state, g.q0, g.q1 - g.q0 + 1, *block);
            break;
        }
    }
}

// Backward sweep shared by both adjoint entry points. `costates` are the
// observable-weighted copies of the final state; emit(k, param, value) is
// called with Im<lambda_k| A |psi> per parametrized gate.
template <typename Emit>
void backward_sweep(const CircuitTemplate& t, const std::vector<double>& params,
                    const EvalInput& input, Statevector& psi,
                    std::vector<Statevector>& costates, Emit&& emit) {
    const double* p = params.data();
    GateMatrix haar_a_adj, haar_b_adj;
    const GateMatrix* haar_a = nullptr;
    const GateMatrix* haar_b = nullptr;
    for (const GateSpec& g : t.gates) {
        if (g.kind == GateKind::HaarBlock) {
            if (g.block_index == 0 && input.haar_a) {
                haar_a_adj = adjoint_of(*input.haar_a);
                haar_a = &haar_a_adj;
            }
            if (g.block_index == 1 && input.haar_b) {
                haar_b_adj = adjoint_of(*input.haar_b);
                haar_b = &haar_b_adj;
            }
        }
    }
    const std::size_t cstep = costates.size();
    for (std::size_t i = t.gates.size(); i-- > 0;) {
        const GateSpec& g = t.gates[i];
        if (g.angle.kind == AngleBinding::Kind::Param) {
            const int k = g.angle.param;
            for (std::size_t c = 0; c < cstep; ++c) {
                double v = 0.0;
                switch (g.kind) {
                    case GateKind::RX:
                        v = im_dot_x(costates[c], psi, g.q0, 0, 0);
                        break;
                    case GateKind::RZ:
                        v = im_dot_z(costates[c], psi, g.q0, 0, 0);
                        break;
                    case GateKind::RZZ:
                        v = im_dot_zz(costates[c], psi, g.q0, g.q1);
                        break;
                    case GateKind::ControlledRX: {
                        std::size_t cmask = std::size_t{1} << g.q0;
                        v = im_dot_x(costates[c], psi, g.q1, cmask,
                                     g.control_value ? cmask : 0);
                        break;
                    }
                    case GateKind::ControlledRZ: {
                        std::size_t cmask = std::size_t{1} << g.q0;
                        v = im_dot_z(costates[c], psi, g.q1, cmask,
                                     g.control_value ? cmask : 0);
                        break;
                    }
                    default:
                        throw std::invalid_argument("parametrized gate of non-rotation kind");
                }
                emit(c, k, v);
            }
        }
        // undo gate i on the state and every costate
        apply_spec(g, p, input, psi, -1.0, haar_a, haar_b);
        for (auto& lam : costates) apply_spec(g, p, input, lam, -1.0, haar_a, haar_b);
    }
}

Statevector forward(const CircuitTemplate& t, const std::vector<double>& params,
                    const EvalInput& input) {
    if (t.config.embedding != Embedding::HaarRandom) {
        if (input.features == nullptr || input.feature_count != t.config.feature_count())
            throw std::invalid_argument("feature vector length does not match template");
    }
    Statevector state = init_bell(t.config.n_bell, t.config.qubits_per_proc);
    run_template(t, params, input, state);
    return state;
}

}  // namespace

ProbGradient adjoint_gradient(const CircuitTemplate& t, const std::vector<double>& params,
                              const EvalInput& input) {
    Statevector psi = forward(t, params, input);
    const int outA = t.output_qubits[0], outB = t.output_qubits[1];

    ProbGradient result;
    for (auto& row : result.rows) row.assign(t.param_count, 0.0);
    std::vector<Statevector> costates(4, Statevector(t.num_qubits));
    for (auto& lam : costates) lam.amps()[0] = cd{0, 0};
    const cd* s = psi.data();
    for (std::size_t j = 0; j < psi.dim(); ++j) {
        int y = static_cast<int>((((j >> outA) & 1) << 1) | ((j >> outB) & 1));
        costates[y].amps()[j] = s[j];
        result.probs[y] += s[j].real() * s[j].real() + s[j].imag() * s[j].imag();
    }
    backward_sweep(t, params, input, psi, costates,
                   [&](std::size_t c, int k, double v) { result.rows[c][k] += v; });
    return result;
}

ExpectationGradient adjoint_expectation_gradient(const CircuitTemplate& t,
                                                 const std::vector<double>& params,
                                                 const EvalInput& input,
                                                 const std::array<double, 4>& omega) {
    Statevector psi = forward(t, params, input);
    const int outA = t.output_qubits[0], outB = t.output_qubits[1];

    ExpectationGradient result;
    result.grad.assign(t.param_count, 0.0);
    std::vector<Statevector> costates(1, Statevector(t.num_qubits));
    Statevector& lam = costates[0];
    lam.amps()[0] = cd{0, 0};
    const cd* s = psi.data();
    for (std::size_t j = 0; j < psi.dim(); ++j) {
        int y = static_cast<int>((((j >> outA) & 1) << 1) | ((j >> outB) & 1));
        result.probs[y] += s[j].real() * s[j].real() + s[j].imag() * s[j].imag();
        lam.amps()[j] = omega[y] * s[j];
    }
    for (int y = 0; y < 4; ++y) result.expectation += omega[y] * result.probs[y];
    backward_sweep(t, params, input, psi, costates,
                   [&](std::size_t, int k, double v) { result.grad[k] += v; });
    return result;
}

ProbGradient finite_diff_gradient(const CircuitTemplate& t, const std::vector<double>& params,
                                  const EvalInput& input, double step) {
    if (step <= 0) throw std::invalid_argument("finite difference step must be positive");
    ProbGradient result;
    for (auto& row : result.rows) row.assign(t.param_count, 0.0);
    OutcomeDistribution center = evaluate(t, params, input);
    for (int y = 0; y < 4; ++y) result.probs[y] = center[y];
    std::vector<double> shifted = params;
    for (int k = 0; k < t.param_count; ++k) {
        shifted[k] = params[k] + step;
        OutcomeDistribution up = evaluate(t, shifted, input);
        shifted[k] = params[k] - step;
        OutcomeDistribution dn = evaluate(t, shifted, input);
        shifted[k] = params[k];
        for (int y = 0; y < 4; ++y) result.rows[y][k] = (up[y] - dn[y]) / (2 * step);
    }
    return result;
}

}  // namespace dqml
