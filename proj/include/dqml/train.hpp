#pragma once

#include "dqml/circuit.hpp"
#include "dqml/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dqml {

enum class OptimizerKind { Adam, Sgd };
enum class LossKind { Product, Mse };

struct TrainConfig {
    OptimizerKind optimizer = OptimizerKind::Adam;
    double learning_rate = 0.05;
    int iterations = 2000;
    double batch_fraction = 0.25;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::Mse;
    OmegaMode omega_mode = OmegaMode::ParityFixedUnit;
    int eval_interval = 10;
    int workers = 1;

    void validate() const;
};

struct AdamState {
    std::vector<double> m, v;
    long t = 0;
};

// Standard Adam update, beta1 = 0.9, beta2 = 0.999, eps = 1e-8, with bias
// correction. SGD is the plain step.
void adam_step(std::vector<double>& params, const std::vector<double>& grad, AdamState& state,
               double lr);
void sgd_step(std::vector<double>& params, const std::vector<double>& grad, double lr);

// Uniform [0, 2pi) initial circuit parameters.
std::vector<double> init_params(int param_count, std::uint64_t seed);

struct MetricRow {
    int iteration = 0;
    double loss = 0.0;
    double train_acc = 0.0;
    double val_acc = 0.0;
};

struct TrainState {
    std::vector<double> params;
    std::vector<double> omega;  // empty / {w} / {w00,w01,w10,w11} by mode
    AdamState opt_params, opt_omega;
    int iteration = 0;
    std::vector<MetricRow> history;
};

// One training problem: a shared template plus per-sample inputs and labels.
// For the CHSH task train_idx == val_idx == all 16 inputs.
struct TrainTask {
    const CircuitTemplate* tmpl = nullptr;
    std::vector<EvalInput> inputs;
    std::vector<int> labels;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;
};

// Deterministic batch for one iteration: a seeded per-epoch permutation of
// the training indices, chunked without replacement. Stateless in the
// iteration number, which makes checkpoint resume exact.
std::vector<std::size_t> batch_indices(std::size_t n_train, double batch_fraction,
                                       std::uint64_t seed, long iteration);

WeightVector omega_from_state(OmegaMode mode, const std::vector<double>& omega);

// Per-sample expectations for an index subset of the task.
std::vector<double> evaluate_expectations(const TrainTask& task, const std::vector<double>& params,
                                          const WeightVector& omega,
                                          const std::vector<std::size_t>& idx, int workers);

TrainState train(const TrainTask& task, const TrainConfig& config);

// Continues a checkpointed state up to config.iterations.
TrainState resume(const TrainTask& task, const TrainConfig& config, TrainState state);

std::string metrics_csv(const std::vector<MetricRow>& history);
std::string checkpoint_json(const TrainState& state);
TrainState checkpoint_from_json(const std::string& text);

}  // namespace dqml
