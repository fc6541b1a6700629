#include "dqml/train.hpp"

#include "dqml/grad.hpp"
#include "dqml/parallel.hpp"
#include "dqml/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace dqml {

namespace {

constexpr double kOmegaFloor = 1e-6;

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<double> initial_omega(OmegaMode mode) {
    switch (mode) {
        case OmegaMode::Free: return {1.0, -1.0, -1.0, 1.0};
        case OmegaMode::ParityTrainable: return {1.0};
        default: return {};
    }
}

void check_task(const TrainTask& task) {
    if (task.tmpl == nullptr) throw std::invalid_argument("train task has no template");
    if (task.inputs.size() != task.labels.size())
        throw std::invalid_argument("train task input/label size mismatch");
    if (task.train_idx.empty() || task.val_idx.empty())
        throw std::invalid_argument("train task needs non-empty train and validation splits");
}

}  // namespace

void TrainConfig::validate() const {
    if (!(batch_fraction > 0.0 && batch_fraction <= 1.0))
        throw std::invalid_argument("batch_fraction must be in (0, 1]");
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
    if (eval_interval < 1) throw std::invalid_argument("eval_interval must be >= 1");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

void adam_step(std::vector<double>& params, const std::vector<double>& grad, AdamState& state,
               double lr) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    if (grad.size() != params.size()) throw std::invalid_argument("gradient length mismatch");
    if (state.m.size() != params.size()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
        state.t = 0;
    }
    ++state.t;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
        params[i] -= lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + eps);
    }
}

void sgd_step(std::vector<double>& params, const std::vector<double>& grad, double lr) {
    if (grad.size() != params.size()) throw std::invalid_argument("gradient length mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

std::vector<double> init_params(int param_count, std::uint64_t seed) {
    if (param_count < 0) throw std::invalid_argument("param_count must be >= 0");
    Rng rng(seed);
    std::vector<double> out(static_cast<std::size_t>(param_count));
    for (double& v : out) v = rng.uniform(0.0, 2.0 * M_PI);
    return out;
}

std::vector<std::size_t> batch_indices(std::size_t n_train, double batch_fraction,
                                       std::uint64_t seed, long iteration) {
    if (n_train == 0) throw std::invalid_argument("empty training set");
    auto b = static_cast<std::size_t>(std::llround(batch_fraction * static_cast<double>(n_train)));
    b = std::max<std::size_t>(1, std::min(b, n_train));
    const std::size_t per_epoch = n_train / b;
    const std::size_t epoch = static_cast<std::size_t>(iteration) / per_epoch;
    const std::size_t slot = static_cast<std::size_t>(iteration) % per_epoch;
    auto perm = Rng(derive_seed(seed, 0xB47C0000ULL + epoch)).permutation(n_train);
    return {perm.begin() + static_cast<long>(slot * b), perm.begin() + static_cast<long>(slot * b + b)};
}

WeightVector omega_from_state(OmegaMode mode, const std::vector<double>& omega) {
    WeightVector w;
    w.mode = mode;
    switch (mode) {
        case OmegaMode::Free:
            if (omega.size() != 4) throw std::invalid_argument("free omega needs 4 values");
            w.values = {omega[0], omega[1], omega[2], omega[3]};
            break;
        case OmegaMode::ParityTrainable: {
            if (omega.size() != 1) throw std::invalid_argument("parity omega needs 1 value");
            double s = omega[0];
            w.values = {s, -s, -s, s};
            break;
        }
        default:
            w.values = {1.0, -1.0, -1.0, 1.0};
            break;
    }
    return w;
}

std::vector<double> evaluate_expectations(const TrainTask& task, const std::vector<double>& params,
                                          const WeightVector& omega,
                                          const std::vector<std::size_t>& idx, int workers) {
    std::vector<double> e(idx.size());
    parallel_for(idx.size(), workers, [&](std::size_t i) {
        OutcomeDistribution dist = evaluate(*task.tmpl, params, task.inputs[idx[i]]);
        e[i] = expectation(dist, omega);
    });
    return e;
}

namespace {

std::vector<int> labels_at(const TrainTask& task, const std::vector<std::size_t>& idx) {
    std::vector<int> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = task.labels[idx[i]];
    return out;
}

void log_metrics(const TrainTask& task, const TrainConfig& config, TrainState& st) {
    WeightVector w = omega_from_state(config.omega_mode, st.omega);
    auto e_train = evaluate_expectations(task, st.params, w, task.train_idx, config.workers);
    auto e_val = evaluate_expectations(task, st.params, w, task.val_idx, config.workers);
    auto l_train = labels_at(task, task.train_idx);
    auto l_val = labels_at(task, task.val_idx);
    LossValue lv = config.loss == LossKind::Product ? loss_product(l_train, e_train)
                                                    : loss_mse(l_train, e_train);
    if (!std::isfinite(lv.value)) throw std::runtime_error("non-finite training loss");
    st.history.push_back(
        {st.iteration, lv.value, accuracy(l_train, e_train), accuracy(l_val, e_val)});
}

TrainState run_loop(const TrainTask& task, const TrainConfig& config, TrainState st) {
    const CircuitTemplate& tmpl = *task.tmpl;
    const int p = tmpl.param_count;
    const std::size_t n_train = task.train_idx.size();
    const std::size_t n_omega = st.omega.size();

    while (st.iteration < config.iterations) {
        auto positions = batch_indices(n_train, config.batch_fraction, config.seed, st.iteration);
        const std::size_t b = positions.size();
        WeightVector w = omega_from_state(config.omega_mode, st.omega);

        std::vector<std::vector<double>> slot_gt(kAccumulationChunks,
                                                 std::vector<double>(p, 0.0));
        std::vector<std::vector<double>> slot_gw(kAccumulationChunks,
                                                 std::vector<double>(n_omega, 0.0));
        parallel_accumulate(b, config.workers, [&](std::size_t i, std::size_t slot) {
            const std::size_t sample = task.train_idx[positions[i]];
            ExpectationGradient eg =
                adjoint_expectation_gradient(tmpl, st.params, task.inputs[sample], w.values);
            const double label = task.labels[sample];
            const double coeff = config.loss == LossKind::Product
                                     ? -label / static_cast<double>(b)
                                     : 2.0 * (eg.expectation - label) / static_cast<double>(b);
            std::vector<double>& gt = slot_gt[slot];
            for (int k = 0; k < p; ++k) gt[k] += coeff * eg.grad[k];
            if (config.omega_mode == OmegaMode::Free) {
                for (int y = 0; y < 4; ++y) slot_gw[slot][y] += coeff * eg.probs[y];
            } else if (config.omega_mode == OmegaMode::ParityTrainable) {
                slot_gw[slot][0] +=
                    coeff * (eg.probs[0] - eg.probs[1] - eg.probs[2] + eg.probs[3]);
            }
        });

        std::vector<double> grad_theta(p, 0.0), grad_omega(n_omega, 0.0);
        for (std::size_t s = 0; s < kAccumulationChunks; ++s) {
            for (int k = 0; k < p; ++k) grad_theta[k] += slot_gt[s][k];
            for (std::size_t k = 0; k < n_omega; ++k) grad_omega[k] += slot_gw[s][k];
        }

        if (config.optimizer == OptimizerKind::Adam) {
            adam_step(st.params, grad_theta, st.opt_params, config.learning_rate);
            if (n_omega) adam_step(st.omega, grad_omega, st.opt_omega, config.learning_rate);
        } else {
            sgd_step(st.params, grad_theta, config.learning_rate);
            if (n_omega) sgd_step(st.omega, grad_omega, config.learning_rate);
        }
        if (config.omega_mode == OmegaMode::ParityTrainable)
            st.omega[0] = std::max(st.omega[0], kOmegaFloor);

        ++st.iteration;
        if (st.iteration % config.eval_interval == 0 || st.iteration == config.iterations)
            log_metrics(task, config, st);
    }
    return st;
}

}  // namespace

TrainState train(const TrainTask& task, const TrainConfig& config) {
    config.validate();
    check_task(task);
    TrainState st;
    st.params = init_params(task.tmpl->param_count, derive_seed(config.seed, 1));
    st.omega = initial_omega(config.omega_mode);
    return run_loop(task, config, std::move(st));
}

TrainState resume(const TrainTask& task, const TrainConfig& config, TrainState state) {
    config.validate();
    check_task(task);
    if (static_cast<int>(state.params.size()) != task.tmpl->param_count)
        throw std::invalid_argument("checkpoint parameter count does not match template");
    return run_loop(task, config, std::move(state));
}

std::string metrics_csv(const std::vector<MetricRow>& history) {
    std::ostringstream os;
    os << "iteration,loss,train_acc,val_acc\n";
    for (const MetricRow& r : history)
        os << r.iteration << "," << fmt_double(r.loss) << "," << fmt_double(r.train_acc) << ","
           << fmt_double(r.val_acc) << "\n";
    return os.str();
}

std::string checkpoint_json(const TrainState& state) {
    nlohmann::json j;
    j["iteration"] = state.iteration;
    j["params"] = state.params;
    j["omega"] = state.omega;
    j["opt_params"] = {{"m", state.opt_params.m}, {"v", state.opt_params.v}, {"t", state.opt_params.t}};
    j["opt_omega"] = {{"m", state.opt_omega.m}, {"v", state.opt_omega.v}, {"t", state.opt_omega.t}};
    return j.dump(2);
}

TrainState checkpoint_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TrainState st;
    st.iteration = j.at("iteration").get<int>();
    st.params = j.at("params").get<std::vector<double>>();
    st.omega = j.at("omega").get<std::vector<double>>();
    st.opt_params.m = j.at("opt_params").at("m").get<std::vector<double>>();
    st.opt_params.v = j.at("opt_params").at("v").get<std::vector<double>>();
    st.opt_params.t = j.at("opt_params").at("t").get<long>();
    st.opt_omega.m = j.at("opt_omega").at("m").get<std::vector<double>>();
    st.opt_omega.v = j.at("opt_omega").at("v").get<std::vector<double>>();
    st.opt_omega.t = j.at("opt_omega").at("t").get<long>();
    return st;
}

}  // namespace dqml
