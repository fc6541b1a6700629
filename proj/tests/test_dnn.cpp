#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dqml/dnn.hpp"
#include "dqml/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace dqml;

namespace {

// Branch layout: W1 8x4 | b1 8 | W2 8x8 | b2 8 | W3 1x8 | b3 1 = 121 values.
double reference_branch(const double* w, const double* x) {
    double h1[8], h2[8];
    for (int i = 0; i < 8; ++i) {
        double s = w[32 + i];
        for (int j = 0; j < 4; ++j) s += w[i * 4 + j] * x[j];
        h1[i] = std::tanh(s);
    }
    for (int i = 0; i < 8; ++i) {
        double s = w[104 + i];
        for (int j = 0; j < 8; ++j) s += w[40 + i * 8 + j] * h1[j];
        h2[i] = std::tanh(s);
    }
    double s = w[120];
    for (int j = 0; j < 8; ++j) s += w[112 + j] * h2[j];
    return std::tanh(s);
}

double reference_forward(const DnnModel& m, const double* x) {
    double a = reference_branch(m.w.data(), x);
    double b = reference_branch(m.w.data() + kDnnBranchParams, x + 4);
    const double* c = m.w.data() + 2 * kDnnBranchParams;
    return c[0] * a + c[1] * b + c[2] * a * b + c[3];
}

double batch_mse(const DnnModel& m, const std::vector<const double*>& xs,
                 const std::vector<int>& labels) {
    double v = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double d = dnn_forward(m, xs[i]).f - labels[i];
        v += d * d;
    }
    return v / static_cast<double>(xs.size());
}

Dataset toy_dataset(std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    Dataset ds;
    ds.seed = seed;
    for (std::size_t i = 0; i < n; ++i) {
        Sample s;
        for (double& v : s.x) v = rng.uniform(-0.8, 0.8);
        s.label = i % 2 == 0 ? 1 : -1;
        ds.samples.push_back(s);
    }
    for (std::size_t i = 0; i < n; ++i)
        (i < 3 * n / 4 ? ds.train_idx : ds.val_idx).push_back(i);
    return ds;
}

}  // namespace

TEST_CASE("parameter budget") {
    CHECK(kDnnBranchParams == 121);
    CHECK(dnn_param_count() == 246);
    CHECK(init_dnn(1).w.size() == 246);
}

TEST_CASE("initialization") {
    DnnModel m = init_dnn(42);
    SUBCASE("biases start at zero, weights inside their fan bounds") {
        for (int branch = 0; branch < 2; ++branch) {
            const double* w = m.w.data() + branch * kDnnBranchParams;
            for (int i = 0; i < 8; ++i) CHECK(w[32 + i] == 0.0);
            for (int i = 0; i < 8; ++i) CHECK(w[104 + i] == 0.0);
            CHECK(w[120] == 0.0);
            for (int i = 0; i < 32; ++i) CHECK(std::abs(w[i]) <= std::sqrt(6.0 / 12));
            for (int i = 0; i < 64; ++i) CHECK(std::abs(w[40 + i]) <= std::sqrt(6.0 / 16));
            for (int i = 0; i < 8; ++i) CHECK(std::abs(w[112 + i]) <= std::sqrt(6.0 / 9));
        }
        for (int i = 0; i < 4; ++i) CHECK(std::abs(m.w[242 + i]) <= 0.5);
    }
    SUBCASE("seeded deterministically") {
        CHECK(m.w == init_dnn(42).w);
        CHECK(m.w != init_dnn(43).w);
    }
}

TEST_CASE("forward pass matches an independent recompute") {
    Rng rng(7);
    DnnModel m = init_dnn(7);
    for (int trial = 0; trial < 5; ++trial) {
        double x[8];
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        DnnForward fw = dnn_forward(m, x);
        CHECK(fw.a == doctest::Approx(reference_branch(m.w.data(), x)).epsilon(1e-14));
        CHECK(fw.b ==
              doctest::Approx(reference_branch(m.w.data() + kDnnBranchParams, x + 4)).epsilon(1e-14));
        CHECK(fw.f == doctest::Approx(reference_forward(m, x)).epsilon(1e-14));
        const double* c = m.w.data() + 2 * kDnnBranchParams;
        CHECK(fw.f == c[0] * fw.a + c[1] * fw.b + c[2] * fw.a * fw.b + c[3]);
    }
    DnnModel bad;
    bad.w.assign(10, 0.0);
    double x[8] = {0};
    CHECK_THROWS_AS(dnn_forward(bad, x), std::invalid_argument);
}

TEST_CASE("branches are independent until the combiner") {
    Rng rng(11);
    DnnModel m = init_dnn(11);
    double x[8];
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    DnnForward before = dnn_forward(m, x);

    DnnModel mb = m;
    for (int i = 0; i < kDnnBranchParams; ++i) mb.w[kDnnBranchParams + i] += 0.1 * (i % 3);
    CHECK(dnn_forward(mb, x).a == before.a);

    double x2[8];
    for (int i = 0; i < 8; ++i) x2[i] = x[i];
    for (int i = 0; i < 4; ++i) x2[i] += 0.3;
    CHECK(dnn_forward(m, x2).b == before.b);
}

TEST_CASE("backprop matches central finite differences") {
    Rng rng(19);
    DnnModel m = init_dnn(19);
    std::vector<std::vector<double>> storage(3, std::vector<double>(8));
    std::vector<const double*> xs;
    std::vector<int> labels{1, -1, 1};
    for (auto& row : storage) {
        for (double& v : row) v = rng.uniform(-1.0, 1.0);
        xs.push_back(row.data());
    }

    std::vector<double> grad = dnn_backprop(m, xs, labels);
    REQUIRE(grad.size() == 246);

    const double h = 1e-5;
    double worst = 0.0;
    for (int k = 0; k < 246; ++k) {
        DnnModel mp = m, mm = m;
        mp.w[k] += h;
        mm.w[k] -= h;
        double fd = (batch_mse(mp, xs, labels) - batch_mse(mm, xs, labels)) / (2 * h);
        worst = std::max(worst, std::abs(fd - grad[k]));
    }
    CHECK(worst < 1e-6);

    CHECK_THROWS_AS(dnn_backprop(m, {}, {}), std::invalid_argument);
    std::vector<double> short_grad(10, 0.0);
    CHECK_THROWS_AS(dnn_backprop_sample(m, storage[0].data(), 1.0, short_grad),
                    std::invalid_argument);
}

TEST_CASE("training smoke") {
    Dataset ds = toy_dataset(3, 40);
    DnnTrainConfig cfg;
    cfg.iterations = 100;
    cfg.seed = 5;
    cfg.eval_interval = 10;

    DnnTrainResult r = train_dnn(ds, cfg);
    REQUIRE(r.history.size() == 10);
    CHECK(r.history.front().iteration == 10);
    CHECK(r.history.back().iteration == 100);
    CHECK(r.history.back().loss < r.history.front().loss);
    for (const MetricRow& row : r.history) {
        CHECK(row.val_acc >= 0.0);
        CHECK(row.val_acc <= 1.0);
        CHECK(std::isfinite(row.loss));
    }

    DnnTrainResult again = train_dnn(ds, cfg);
    CHECK(r.model.w == again.model.w);

    Dataset no_split = ds;
    no_split.val_idx.clear();
    CHECK_THROWS_AS(train_dnn(no_split, cfg), std::invalid_argument);
}
