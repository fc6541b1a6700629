#include "dqml/model.hpp"

#include <cmath>
#include <stdexcept>

namespace dqml {

WeightVector WeightVector::parity_unit() { return parity(1.0); }

WeightVector WeightVector::parity(double w) {
    WeightVector v;
    v.mode = w == 1.0 ? OmegaMode::ParityFixedUnit : OmegaMode::ParityTrainable;
    v.values = {w, -w, -w, w};
    v.validate();
    return v;
}

WeightVector WeightVector::free_weights(const std::array<double, 4>& vals) {
    WeightVector v;
    v.mode = OmegaMode::Free;
    v.values = vals;
    return v;
}

void WeightVector::validate() const {
    if (mode == OmegaMode::Free) return;
    double w = values[0];
    if (!(w > 0)) throw std::invalid_argument("parity weight scale must be positive");
    if (values[1] != -w || values[2] != -w || values[3] != w)
        throw std::invalid_argument("parity weights must be w * (+1,-1,-1,+1)");
    if (mode == OmegaMode::ParityFixedUnit && w != 1.0)
        throw std::invalid_argument("parity_fixed_unit requires w = 1");
}

double expectation(const OutcomeDistribution& dist, const WeightVector& omega) {
    double e = 0.0;
    for (int y = 0; y < 4; ++y) e += omega.values[y] * dist[y];
    return e;
}

int predict(double e) { return e >= 0.0 ? 1 : -1; }

namespace {

void check_batch(const std::vector<int>& labels, const std::vector<double>& expectations) {
    if (labels.empty()) throw std::invalid_argument("empty batch");
    if (labels.size() != expectations.size())
        throw std::invalid_argument("label/expectation size mismatch");
}

}  // namespace

LossValue loss_product(const std::vector<int>& labels, const std::vector<double>& expectations) {
    check_batch(labels, expectations);
    const double n = static_cast<double>(labels.size());
    LossValue out;
    out.grad.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.value -= labels[i] * expectations[i];
        out.grad[i] = -labels[i] / n;
    }
    out.value /= n;
    return out;
}

LossValue loss_mse(const std::vector<int>& labels, const std::vector<double>& expectations) {
    check_batch(labels, expectations);
    const double n = static_cast<double>(labels.size());
    LossValue out;
    out.grad.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        double diff = expectations[i] - labels[i];
        out.value += diff * diff;
        out.grad[i] = 2.0 * diff / n;
    }
    out.value /= n;
    return out;
}

double accuracy(const std::vector<int>& labels, const std::vector<double>& expectations) {
    check_batch(labels, expectations);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (predict(expectations[i]) == labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double chsh_success(double e, int label, double omega_scale) {
    if (!(omega_scale > 0)) throw std::invalid_argument("omega_scale must be positive");
    double r = e / omega_scale;
    if (std::abs(r) > 1.0 + 1e-9)
        throw std::invalid_argument("expectation exceeds weight scale beyond round-off");
    double p = 0.5 * (1.0 + label * r);
    return std::min(1.0, std::max(0.0, p));
}

ChshCorrelator chsh_correlator(const std::array<double, 4>& ab) {
    for (double v : ab)
        if (std::abs(v) > 1.0 + 1e-9)
            throw std::invalid_argument("correlator expectation out of [-1, 1]");
    ChshCorrelator c;
    c.s = ab[0] + ab[1] + ab[2] - ab[3];
    c.p_win = 0.5 + c.s / 8.0;
    return c;
}

std::array<double, 4> analytic_chsh_reference() {
    using M = std::array<std::array<cd, 2>, 2>;
    const double r = M_SQRT1_2;
    const M Z{{{cd{1, 0}, cd{0, 0}}, {cd{0, 0}, cd{-1, 0}}}};
    const M X{{{cd{0, 0}, cd{1, 0}}, {cd{1, 0}, cd{0, 0}}}};
    auto mix = [&](const M& P, const M& Q, double sp, double sq) {
        M out;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out[i][j] = sp * P[i][j] + sq * Q[i][j];
        return out;
    };
    const M A[2] = {Z, X};
    const M B[2] = {mix(X, Z, r, r), mix(Z, X, r, -r)};

    // |Phi+> amplitudes over (alice bit, bob bit), alice = low bit
    const cd phi[2][2] = {{cd{r, 0}, cd{0, 0}}, {cd{0, 0}, cd{r, 0}}};
    std::array<double, 4> out{};
    int idx = 0;
    for (int s = 0; s < 2; ++s) {
        for (int t = 0; t < 2; ++t) {
            cd acc{0, 0};
            for (int a1 = 0; a1 < 2; ++a1)
                for (int b1 = 0; b1 < 2; ++b1)
                    for (int a0 = 0; a0 < 2; ++a0)
                        for (int b0 = 0; b0 < 2; ++b0)
                            acc += std::conj(phi[a1][b1]) * A[s][a1][a0] * B[t][b1][b0] *
                                   phi[a0][b0];
            out[idx++] = acc.real();
        }
    }
    return out;
}

}  // namespace dqml
