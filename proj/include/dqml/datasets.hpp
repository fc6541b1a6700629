#pragma once

#include "dqml/rng.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dqml {

// Extended CHSH input: s1, t1 in {0,1}; s2, t2 in {-1,1};
// label = s2 * t2 * (-1)^(s1 t1).
struct ChshInput {
    int s1 = 0;
    int t1 = 0;
    int s2 = 1;
    int t2 = 1;
    int label = 1;
};

// All 16 inputs in a fixed enumeration order.
std::vector<ChshInput> chsh_inputs();

enum class ChshEmbeddingKind { Optimal, Alternative };

// optimal:     pi/2 * (s1, s2, t1, t2)
// alternative: pi/2 * (s2, s1, t2, t1)
// First two features feed processor A.
std::array<double, 4> embed_chsh(const ChshInput& in, ChshEmbeddingKind kind);

struct Sample {
    std::array<double, 8> x{};
    int label = 0;
    int cluster = -1;
};

struct Dataset {
    std::vector<Sample> samples;
    std::vector<std::array<double, 8>> shift_vectors;
    std::vector<int> cluster_labels;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;
    std::uint64_t seed = 0;
};

// 4096 points uniform in the 8-ball of radius pi/4, partitioned into 64
// clusters of 64, shifted by distinct corner vectors in {-pi/4, pi/4}^8 with
// balanced cluster labels; stratified 3:1 train/validation split.
Dataset gen_synthetic(std::uint64_t seed);

// Label-stratified 3:1 split over existing samples (used after read_csv).
void stratified_split(Dataset& ds, std::uint64_t seed);

// Smallest pairwise distance between cluster shift vectors (diagnostic).
double min_intercluster_distance(const Dataset& ds);

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// CSV schema: x1..x8,label[,cluster]; fields print with 17 significant
// digits so a write/read round trip is exact.
void write_csv(const Dataset& ds, const std::string& path);
Dataset read_csv(const std::string& path);

// JSON manifest text (seed, counts, shift vectors, separation diagnostic).
std::string dataset_manifest(const Dataset& ds);

}  // namespace dqml
