#pragma once

#include "dqml/circuit.hpp"

#include <array>
#include <vector>

namespace dqml {

enum class OmegaMode { Free, ParityTrainable, ParityFixedUnit };

// Outcome weights omega_ab over (a,b) ordered (0,0),(0,1),(1,0),(1,1).
// Parity modes fix omega = w * (+1,-1,-1,+1) with w > 0; with the value
// mapping m(bit) = 1 - 2*bit this is omega_ab = w * m(a) * m(b).
struct WeightVector {
    OmegaMode mode = OmegaMode::ParityFixedUnit;
    std::array<double, 4> values{1.0, -1.0, -1.0, 1.0};

    static WeightVector parity_unit();
    static WeightVector parity(double w);
    static WeightVector free_weights(const std::array<double, 4>& v);

    // Parity scale w; only meaningful in parity modes.
    double scale() const { return values[0]; }
    void validate() const;
};

double expectation(const OutcomeDistribution& dist, const WeightVector& omega);

// Sign of the expectation; the measure-zero tie E = 0 maps to +1.
int predict(double e);

// Batch losses; grad[i] = dLoss/dE_i.
struct LossValue {
    double value = 0.0;
    std::vector<double> grad;
};

LossValue loss_product(const std::vector<int>& labels, const std::vector<double>& expectations);
LossValue loss_mse(const std::vector<int>& labels, const std::vector<double>& expectations);

double accuracy(const std::vector<int>& labels, const std::vector<double>& expectations);

// Per-input CHSH success probability (1 + L * E / omega_scale) / 2, clamped
// to [0,1] after a 1e-9 round-off tolerance check.
double chsh_success(double e, int label, double omega_scale);

struct ChshCorrelator {
    double s = 0.0;
    double p_win = 0.0;
};

// S = <A0B0> + <A0B1> + <A1B0> - <A1B1>; P_win = 1/2 + S/8.
// Input order: <A0B0>, <A0B1>, <A1B0>, <A1B1>.
ChshCorrelator chsh_correlator(const std::array<double, 4>& ab_expectations);

// <A_s (x) B_t> on |Phi+> with A0 = Z, A1 = X, B0 = (X+Z)/sqrt(2),
// B1 = (Z-X)/sqrt(2), by direct matrix algebra. Same order as above.
std::array<double, 4> analytic_chsh_reference();

}  // namespace dqml
