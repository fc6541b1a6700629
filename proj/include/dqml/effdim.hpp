#pragma once

#include "dqml/circuit.hpp"
#include "dqml/rng.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace dqml {

struct FisherMatrix {
    Eigen::MatrixXd f;  // P x P, symmetric PSD
    int n_inputs = 0;
    Eigen::VectorXd eigenvalues;  // ascending; filled by numerical_rank
};

struct EDProtocolConfig {
    int n_haar = 100;
    int n_paramsets = 20;
    double rank_tol_rel = 1e-10;
    int workers = 1;
};

struct RankInfo {
    int rank = 0;
    double spectral_gap = 0.0;  // smallest kept eigenvalue / largest dropped
    double lambda_max = 0.0;
};

// F = (1/N) sum_n sum_y (dP_y)(dP_y)^T / P_y over the four joint outcomes,
// in the stable Gram form; outcomes with P_y < 1e-14 are skipped.
FisherMatrix fisher_matrix(const CircuitTemplate& t, const std::vector<double>& params,
                           const std::vector<EvalInput>& inputs, int workers = 1);

// Eigenvalue count above tol_rel * lambda_max, plus the spectral gap at the
// threshold (infinite when nothing is dropped or the dropped mass is <= 0).
RankInfo numerical_rank(FisherMatrix& fm, double tol_rel);

struct EDResult {
    int ed = 0;
    double min_gap = 0.0;  // worst spectral gap across parameter sets
    std::vector<int> ranks;
};

// Effective dimension: max over n_paramsets uniform [0, 2pi) parameter sets
// of the rank of the Fisher matrix averaged over n_haar per-processor Haar
// unitary input pairs. Requires embedding = haar_random.
EDResult effective_dimension(const CircuitConfig& config, const EDProtocolConfig& protocol,
                             std::uint64_t seed);

struct SweepRecord {
    int depth = 0;
    int n_bell = 0;
    int mixing_depth = 0;
    int ed = 0;
    double min_gap = 0.0;
};

// ED for conv_depth = 1..d_max with early stop after three consecutive
// non-increases.
std::vector<SweepRecord> depth_sweep(CircuitConfig config, const EDProtocolConfig& protocol,
                                     int d_max, std::uint64_t seed);

// CSV rows (depth, n_bell, mixing_depth, ed, min_gap).
std::string sweep_csv(const std::vector<SweepRecord>& records);

}  // namespace dqml
