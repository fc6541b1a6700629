#pragma once

#include "dqml/circuit.hpp"

#include <array>
#include <vector>

namespace dqml {

// Exact gradient of the four joint-outcome probabilities with respect to all
// trainable parameters: rows[y][k] = dP(y)/dtheta_k, y indexed as 2a + b.
struct ProbGradient {
    std::array<double, 4> probs{};
    std::array<std::vector<double>, 4> rows;
};

// Gradient of a fixed-weight expectation E = sum_y omega_y P(y); cheaper than
// ProbGradient (one costate instead of four), used by the training loop.
struct ExpectationGradient {
    double expectation = 0.0;
    std::array<double, 4> probs{};
    std::vector<double> grad;
};

// Reverse-mode (adjoint) statevector differentiation. One forward pass, then
// a backward sweep holding the state and one costate per observable; the
// generator of a controlled rotation is the projector-weighted Pauli.
ProbGradient adjoint_gradient(const CircuitTemplate& t, const std::vector<double>& params,
                              const EvalInput& input);

ExpectationGradient adjoint_expectation_gradient(const CircuitTemplate& t,
                                                 const std::vector<double>& params,
                                                 const EvalInput& input,
                                                 const std::array<double, 4>& omega);

// Central finite differences of evaluate(), the test oracle for the adjoint.
ProbGradient finite_diff_gradient(const CircuitTemplate& t, const std::vector<double>& params,
                                  const EvalInput& input, double step = 1e-4);

}  // namespace dqml
