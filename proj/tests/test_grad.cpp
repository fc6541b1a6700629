#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dqml/grad.hpp"
#include "dqml/haar.hpp"
#include "dqml/rng.hpp"

#include <array>
#include <cmath>
#include <vector>

using namespace dqml;

namespace {

std::vector<double> random_params(int count, Rng& rng) {
    std::vector<double> p(static_cast<std::size_t>(count));
    for (auto& v : p) v = rng.uniform(0.0, 2 * M_PI);
    return p;
}

struct RandomCase {
    CircuitTemplate t;
    std::vector<double> params;
    std::vector<double> feats;
    GateMatrix ha, hb;
    EvalInput in;
};

RandomCase make_case(Rng& rng) {
    CircuitConfig c;
    c.qubits_per_proc = rng.uniform_int(2) ? 4 : 2;
    c.n_bell = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(c.qubits_per_proc) + 1));
    c.conv_depth = static_cast<int>(rng.uniform_int(3));
    c.second_stage_depth =
        c.qubits_per_proc == 4 ? static_cast<int>(rng.uniform_int(2)) : 0;
    c.mixing_depth = static_cast<int>(rng.uniform_int(2));
    c.mixing_scope = rng.uniform_int(2) ? MixingScope::Global : MixingScope::Local;
    switch (rng.uniform_int(3)) {
        case 0: c.embedding = Embedding::FeatureMap; break;
        case 1: c.embedding = Embedding::HaarRandom; break;
        default:
            c.embedding = c.qubits_per_proc == 2 ? Embedding::ChshOptimal : Embedding::FeatureMap;
    }

    RandomCase rc;
    rc.t = assemble(c);
    rc.params = random_params(rc.t.param_count, rng);
    rc.feats.resize(static_cast<std::size_t>(c.feature_count()));
    for (auto& f : rc.feats) f = rng.uniform(-M_PI, M_PI);
    if (c.embedding == Embedding::HaarRandom) {
        rc.ha = haar_unitary(1 << c.qubits_per_proc, rng);
        rc.hb = haar_unitary(1 << c.qubits_per_proc, rng);
        rc.in.haar_a = &rc.ha;
        rc.in.haar_b = &rc.hb;
    } else {
        rc.in.features = rc.feats.data();
        rc.in.feature_count = c.feature_count();
    }
    return rc;
}

}  // namespace

TEST_CASE("single live pooling rotation at pinned angles") {
    // qpp=2, no conv layers: embedding + pooling only, all parameters zero
    // except one pooling X rotation, checked at a few fixed angles.
    CircuitConfig c;
    c.qubits_per_proc = 2;
    c.conv_depth = 0;
    c.embedding = Embedding::FeatureMap;
    CircuitTemplate t = assemble(c);
    std::vector<double> params(static_cast<std::size_t>(t.param_count), 0.0);
    std::vector<double> feats{0.0, 0.0, 0.0, 0.0};
    EvalInput in{feats.data(), 4, nullptr, nullptr};

    // parameter p[1]: CRX on processor A's kept qubit, control value 0
    const int k = 1;
    for (double theta : {0.3, M_PI / 2, 1.7}) {
        params[static_cast<std::size_t>(k)] = theta;
        ProbGradient g = adjoint_gradient(t, params, in);
        ProbGradient fd = finite_diff_gradient(t, params, in);
        for (int y = 0; y < 4; ++y)
            CHECK(g.rows[y][static_cast<std::size_t>(k)] ==
                  doctest::Approx(fd.rows[y][static_cast<std::size_t>(k)]).epsilon(1e-7));
    }
}

TEST_CASE("outcome probability gradients sum to zero") {
    Rng rng(31);
    for (int rep = 0; rep < 6; ++rep) {
        RandomCase rc = make_case(rng);
        ProbGradient g = adjoint_gradient(rc.t, rc.params, rc.in);
        double psum = 0.0;
        for (int y = 0; y < 4; ++y) psum += g.probs[y];
        CHECK(psum == doctest::Approx(1.0).epsilon(1e-10));
        for (int k = 0; k < rc.t.param_count; ++k) {
            double s = 0.0;
            for (int y = 0; y < 4; ++y) s += g.rows[y][static_cast<std::size_t>(k)];
            CHECK(std::abs(s) < 1e-12);
        }
    }
}

TEST_CASE("adjoint matches central finite differences") {
    Rng rng(32);
    double worst = 0.0;
    for (int rep = 0; rep < 12; ++rep) {
        RandomCase rc = make_case(rng);
        ProbGradient g = adjoint_gradient(rc.t, rc.params, rc.in);
        ProbGradient fd = finite_diff_gradient(rc.t, rc.params, rc.in);
        for (int y = 0; y < 4; ++y) {
            CHECK(g.probs[y] == doctest::Approx(fd.probs[y]).epsilon(1e-12));
            for (int k = 0; k < rc.t.param_count; ++k)
                worst = std::max(worst, std::abs(g.rows[y][static_cast<std::size_t>(k)] -
                                                 fd.rows[y][static_cast<std::size_t>(k)]));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("expectation gradient is the omega contraction of the probability gradient") {
    Rng rng(33);
    for (int rep = 0; rep < 5; ++rep) {
        RandomCase rc = make_case(rng);
        std::array<double, 4> omega{1.0, -1.0, -1.0, 1.0};
        if (rep % 2) omega = {0.3, -1.2, 0.7, 2.1};

        ProbGradient g = adjoint_gradient(rc.t, rc.params, rc.in);
        ExpectationGradient e = adjoint_expectation_gradient(rc.t, rc.params, rc.in, omega);

        double want_e = 0.0;
        for (int y = 0; y < 4; ++y) {
            want_e += omega[static_cast<std::size_t>(y)] * g.probs[y];
            CHECK(e.probs[y] == doctest::Approx(g.probs[y]).epsilon(1e-12));
        }
        CHECK(e.expectation == doctest::Approx(want_e).epsilon(1e-12));

        for (int k = 0; k < rc.t.param_count; ++k) {
            double want = 0.0;
            for (int y = 0; y < 4; ++y)
                want += omega[static_cast<std::size_t>(y)] * g.rows[y][static_cast<std::size_t>(k)];
            CHECK(e.grad[static_cast<std::size_t>(k)] == doctest::Approx(want).epsilon(1e-10));
        }
    }
}

TEST_CASE("wrong parameter count throws") {
    CircuitConfig c;
    c.qubits_per_proc = 2;
    c.conv_depth = 1;
    c.embedding = Embedding::FeatureMap;
    CircuitTemplate t = assemble(c);
    std::vector<double> bad(2, 0.0);
    std::vector<double> feats{0.1, 0.2, 0.3, 0.4};
    EvalInput in{feats.data(), 4, nullptr, nullptr};
    CHECK_THROWS_AS(adjoint_gradient(t, bad, in), std::invalid_argument);
}
