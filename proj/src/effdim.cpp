#include "dqml/effdim.hpp"

#include "dqml/grad.hpp"
#include "dqml/haar.hpp"
#include "dqml/parallel.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dqml {

namespace {
constexpr double kProbFloor = 1e-14;
}

FisherMatrix fisher_matrix(const CircuitTemplate& t, const std::vector<double>& params,
                           const std::vector<EvalInput>& inputs, int workers) {
    if (inputs.empty()) throw std::invalid_argument("fisher_matrix needs at least one input");
    const int p = t.param_count;

    std::vector<Eigen::MatrixXd> slots(kAccumulationChunks, Eigen::MatrixXd::Zero(p, p));
    parallel_accumulate(inputs.size(), workers, [&](std::size_t i, std::size_t slot) {
        ProbGradient g = adjoint_gradient(t, params, inputs[i]);
        Eigen::MatrixXd& acc = slots[slot];
        for (int y = 0; y < 4; ++y) {
            if (g.probs[y] < kProbFloor) continue;
            Eigen::Map<const Eigen::VectorXd> row(g.rows[y].data(), p);
            acc.selfadjointView<Eigen::Lower>().rankUpdate(row, 1.0 / g.probs[y]);
        }
    });

    FisherMatrix fm;
    fm.n_inputs = static_cast<int>(inputs.size());
    fm.f = Eigen::MatrixXd::Zero(p, p);
    for (const auto& s : slots) fm.f += s;
    fm.f /= static_cast<double>(inputs.size());
    fm.f.triangularView<Eigen::StrictlyUpper>() = fm.f.transpose();
    return fm;
}

RankInfo numerical_rank(FisherMatrix& fm, double tol_rel) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(fm.f, Eigen::EigenvaluesOnly);
    fm.eigenvalues = solver.eigenvalues();  // ascending
    const int p = static_cast<int>(fm.eigenvalues.size());

    RankInfo info;
    info.lambda_max = p ? fm.eigenvalues[p - 1] : 0.0;
    const double threshold = tol_rel * std::max(info.lambda_max, 1e-300);
    double largest_dropped = 0.0;
    double smallest_kept = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p; ++i) {
        double ev = fm.eigenvalues[i];
        if (ev > threshold) {
            ++info.rank;
            smallest_kept = std::min(smallest_kept, ev);
        } else {
            largest_dropped = std::max(largest_dropped, ev);
        }
    }
    if (info.rank == 0 || largest_dropped <= 0.0)
        info.spectral_gap = std::numeric_limits<double>::infinity();
    else
        info.spectral_gap = smallest_kept / largest_dropped;
    return info;
}

EDResult effective_dimension(const CircuitConfig& config, const EDProtocolConfig& protocol,
                             std::uint64_t seed) {
    config.validate();
    if (config.embedding != Embedding::HaarRandom)
        throw std::invalid_argument("effective_dimension requires the haar_random embedding");
    if (protocol.n_haar < 1 || protocol.n_paramsets < 1)
        throw std::invalid_argument("protocol sizes must be positive");

    CircuitTemplate t = assemble(config);
    const int dim = 1 << config.qubits_per_proc;

    EDResult result;
    result.min_gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < protocol.n_paramsets; ++k) {
        Rng pr(derive_seed(seed, 1000 + static_cast<std::uint64_t>(k)));
        std::vector<double> params(t.param_count);
        for (double& v : params) v = pr.uniform(0.0, 2.0 * M_PI);

        std::vector<GateMatrix> blocks;
        blocks.reserve(2 * protocol.n_haar);
        std::vector<EvalInput> inputs(protocol.n_haar);
        Rng hr(derive_seed(seed, 2000 + static_cast<std::uint64_t>(k)));
        for (int h = 0; h < protocol.n_haar; ++h) {
            blocks.push_back(haar_unitary(dim, hr));
            blocks.push_back(haar_unitary(dim, hr));
        }
        for (int h = 0; h < protocol.n_haar; ++h) {
            inputs[h].haar_a = &blocks[2 * h];
            inputs[h].haar_b = &blocks[2 * h + 1];
        }

        FisherMatrix fm = fisher_matrix(t, params, inputs, protocol.workers);
        RankInfo info = numerical_rank(fm, protocol.rank_tol_rel);
        result.ranks.push_back(info.rank);
        result.ed = std::max(result.ed, info.rank);
        result.min_gap = std::min(result.min_gap, info.spectral_gap);
    }
    return result;
}

std::vector<SweepRecord> depth_sweep(CircuitConfig config, const EDProtocolConfig& protocol,
                                     int d_max, std::uint64_t seed) {
    if (d_max < 1) throw std::invalid_argument("d_max must be >= 1");
    std::vector<SweepRecord> out;
    int streak = 0;
    int prev = -1;
    for (int d = 1; d <= d_max; ++d) {
        config.conv_depth = d;
        EDResult r = effective_dimension(config, protocol, derive_seed(seed, 3000 + d));
        out.push_back({d, config.n_bell, config.mixing_depth, r.ed, r.min_gap});
        if (prev >= 0) {
            streak = r.ed <= prev ? streak + 1 : 0;
            if (streak >= 3) break;
        }
        prev = r.ed;
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRecord>& records) {
    std::ostringstream os;
    os << "depth,n_bell,mixing_depth,ed,min_gap\n";
    for (const SweepRecord& r : records) {
        os << r.depth << "," << r.n_bell << "," << r.mixing_depth << "," << r.ed << ",";
        if (std::isinf(r.min_gap))
            os << "inf";
        else
            os << r.min_gap;
        os << "\n";
    }
    return os.str();
}

}  // namespace dqml
