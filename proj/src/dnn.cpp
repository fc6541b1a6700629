#include "dqml/dnn.hpp"

#include "dqml/parallel.hpp"
#include "dqml/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace dqml {

namespace {

// Per-branch layout offsets: W1 8x4, b1 8, W2 8x8, b2 8, W3 1x8, b3 1.
constexpr int kW1 = 0, kB1 = 32, kW2 = 40, kB2 = 104, kW3 = 112, kB3 = 120;
constexpr int kCombiner = 2 * kDnnBranchParams;

struct BranchCache {
    double h1[8], h2[8], out;
};

void branch_forward(const double* w, const double* x, BranchCache& c) {
    for (int i = 0; i < 8; ++i) {
        double s = w[kB1 + i];
        for (int j = 0; j < 4; ++j) s += w[kW1 + i * 4 + j] * x[j];
        c.h1[i] = std::tanh(s);
    }
    for (int i = 0; i < 8; ++i) {
        double s = w[kB2 + i];
        for (int j = 0; j < 8; ++j) s += w[kW2 + i * 8 + j] * c.h1[j];
        c.h2[i] = std::tanh(s);
    }
    double s = w[kB3];
    for (int j = 0; j < 8; ++j) s += w[kW3 + j] * c.h2[j];
    c.out = std::tanh(s);
}

// d out / d branch params, scaled by coeff, accumulated into g.
void branch_backward(const double* w, const double* x, const BranchCache& c, double coeff,
                     double* g) {
    double d3 = coeff * (1.0 - c.out * c.out);
    g[kB3] += d3;
    double d2[8];
    for (int j = 0; j < 8; ++j) {
        g[kW3 + j] += d3 * c.h2[j];
        d2[j] = d3 * w[kW3 + j] * (1.0 - c.h2[j] * c.h2[j]);
    }
    double d1[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    for (int i = 0; i < 8; ++i) {
        g[kB2 + i] += d2[i];
        for (int j = 0; j < 8; ++j) {
            g[kW2 + i * 8 + j] += d2[i] * c.h1[j];
            d1[j] += d2[i] * w[kW2 + i * 8 + j];
        }
    }
    for (int j = 0; j < 8; ++j) d1[j] *= 1.0 - c.h1[j] * c.h1[j];
    for (int i = 0; i < 8; ++i) {
        g[kB1 + i] += d1[i];
        for (int j = 0; j < 4; ++j) g[kW1 + i * 4 + j] += d1[i] * x[j];
    }
}

}  // namespace

DnnModel init_dnn(std::uint64_t seed) {
    Rng rng(seed);
    DnnModel m;
    m.w.assign(dnn_param_count(), 0.0);
    auto fill = [&](int offset, int count, double r) {
        for (int i = 0; i < count; ++i) m.w[offset + i] = rng.uniform(-r, r);
    };
    for (int branch = 0; branch < 2; ++branch) {
        int base = branch * kDnnBranchParams;
        fill(base + kW1, 32, std::sqrt(6.0 / (4 + 8)));
        fill(base + kW2, 64, std::sqrt(6.0 / (8 + 8)));
        fill(base + kW3, 8, std::sqrt(6.0 / (8 + 1)));
        // biases start at zero
    }
    fill(kCombiner, 4, 0.5);
    return m;
}

DnnForward dnn_forward(const DnnModel& model, const double* x) {
    if (static_cast<int>(model.w.size()) != dnn_param_count())
        throw std::invalid_argument("bad dnn model size");
    BranchCache ca, cb;
    branch_forward(model.w.data(), x, ca);
    branch_forward(model.w.data() + kDnnBranchParams, x + 4, cb);
    const double* c = model.w.data() + kCombiner;
    DnnForward out;
    out.a = ca.out;
    out.b = cb.out;
    out.f = c[0] * ca.out + c[1] * cb.out + c[2] * ca.out * cb.out + c[3];
    return out;
}

void dnn_backprop_sample(const DnnModel& model, const double* x, double coeff,
                         std::vector<double>& grad) {
    if (grad.size() != model.w.size()) throw std::invalid_argument("gradient length mismatch");
    BranchCache ca, cb;
    branch_forward(model.w.data(), x, ca);
    branch_forward(model.w.data() + kDnnBranchParams, x + 4, cb);
    const double* c = model.w.data() + kCombiner;
    grad[kCombiner + 0] += coeff * ca.out;
    grad[kCombiner + 1] += coeff * cb.out;
    grad[kCombiner + 2] += coeff * ca.out * cb.out;
    grad[kCombiner + 3] += coeff;
    branch_backward(model.w.data(), x, ca, coeff * (c[0] + c[2] * cb.out), grad.data());
    branch_backward(model.w.data() + kDnnBranchParams, x + 4, cb, coeff * (c[1] + c[2] * ca.out),
                    grad.data() + kDnnBranchParams);
}

std::vector<double> dnn_backprop(const DnnModel& model, const std::vector<const double*>& xs,
                                 const std::vector<int>& labels) {
    if (xs.empty() || xs.size() != labels.size()) throw std::invalid_argument("bad batch");
    std::vector<double> grad(model.w.size(), 0.0);
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        DnnForward fw = dnn_forward(model, xs[i]);
        dnn_backprop_sample(model, xs[i], 2.0 * (fw.f - labels[i]) / n, grad);
    }
    return grad;
}

DnnTrainResult train_dnn(const Dataset& ds, const DnnTrainConfig& config) {
    if (ds.train_idx.empty() || ds.val_idx.empty())
        throw std::invalid_argument("dataset has no split");
    DnnTrainResult result;
    result.model = init_dnn(derive_seed(config.seed, 1));
    AdamState opt;
    const std::size_t n_train = ds.train_idx.size();
    const int p = dnn_param_count();

    auto metrics = [&](int iteration) {
        auto eval_split = [&](const std::vector<std::size_t>& idx, std::vector<int>& labels,
                              std::vector<double>& es) {
            labels.resize(idx.size());
            es.resize(idx.size());
            parallel_for(idx.size(), config.workers, [&](std::size_t i) {
                labels[i] = ds.samples[idx[i]].label;
                es[i] = dnn_forward(result.model, ds.samples[idx[i]].x.data()).f;
            });
        };
        std::vector<int> lt, lv;
        std::vector<double> et, ev;
        eval_split(ds.train_idx, lt, et);
        eval_split(ds.val_idx, lv, ev);
        LossValue loss = loss_mse(lt, et);
        if (!std::isfinite(loss.value)) throw std::runtime_error("non-finite dnn loss");
        result.history.push_back({iteration, loss.value, accuracy(lt, et), accuracy(lv, ev)});
    };

    for (int iter = 0; iter < config.iterations; ++iter) {
        auto positions = batch_indices(n_train, config.batch_fraction, config.seed, iter);
        const double b = static_cast<double>(positions.size());

        std::vector<std::vector<double>> slots(kAccumulationChunks,
                                               std::vector<double>(p, 0.0));
        parallel_accumulate(positions.size(), config.workers, [&](std::size_t i, std::size_t slot) {
            const Sample& s = ds.samples[ds.train_idx[positions[i]]];
            DnnForward fw = dnn_forward(result.model, s.x.data());
            dnn_backprop_sample(result.model, s.x.data(), 2.0 * (fw.f - s.label) / b,
                                slots[slot]);
        });
        std::vector<double> grad(p, 0.0);
        for (const auto& s : slots)
            for (int k = 0; k < p; ++k) grad[k] += s[k];

        adam_step(result.model.w, grad, opt, config.learning_rate);
        if ((iter + 1) % config.eval_interval == 0 || iter + 1 == config.iterations)
            metrics(iter + 1);
    }
    return result;
}

}  // namespace dqml
