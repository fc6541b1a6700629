#pragma once

#include "dqml/datasets.hpp"
#include "dqml/train.hpp"

#include <cstdint>
#include <vector>

namespace dqml {

// Classical distributed baseline: two independent 4-8-8-1 tanh branches (one
// per processor half of the input) and a 4-parameter combiner over
// (a, b, a*b). No cross-branch weights exist before the combiner.
constexpr int kDnnBranchParams = (4 * 8 + 8) + (8 * 8 + 8) + (8 * 1 + 1);  // 121
constexpr int kDnnCombinerParams = 4;

constexpr int dnn_param_count() { return 2 * kDnnBranchParams + kDnnCombinerParams; }

struct DnnModel {
    std::vector<double> w;  // branch A | branch B | (w_a, w_b, w_ab, bias)
};

DnnModel init_dnn(std::uint64_t seed);

struct DnnForward {
    double f = 0.0;  // combiner output
    double a = 0.0;  // branch A output (tanh)
    double b = 0.0;  // branch B output (tanh)
};

DnnForward dnn_forward(const DnnModel& model, const double* x);

// Adds coeff * d f / d w to grad (length dnn_param_count()); coeff carries
// the loss derivative dLoss/df of one sample.
void dnn_backprop_sample(const DnnModel& model, const double* x, double coeff,
                         std::vector<double>& grad);

// Exact gradient of the batch MSE (1/N) sum (f - L)^2.
std::vector<double> dnn_backprop(const DnnModel& model, const std::vector<const double*>& xs,
                                 const std::vector<int>& labels);

struct DnnTrainConfig {
    double learning_rate = 0.01;
    int iterations = 2000;
    double batch_fraction = 0.25;
    std::uint64_t seed = 0;
    int eval_interval = 10;
    int workers = 1;
};

struct DnnTrainResult {
    DnnModel model;
    std::vector<MetricRow> history;
};

DnnTrainResult train_dnn(const Dataset& ds, const DnnTrainConfig& config);

}  // namespace dqml
