#include "dqml/datasets.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace dqml {

namespace {

constexpr int kSamples = 4096;
constexpr int kClusters = 64;
constexpr int kClusterSize = kSamples / kClusters;
constexpr double kRadius = M_PI / 4;

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::vector<ChshInput> chsh_inputs() {
    std::vector<ChshInput> out;
    out.reserve(16);
    for (int s1 = 0; s1 <= 1; ++s1)
        for (int s2 = -1; s2 <= 1; s2 += 2)
            for (int t1 = 0; t1 <= 1; ++t1)
                for (int t2 = -1; t2 <= 1; t2 += 2) {
                    int label = s2 * t2 * (s1 * t1 != 0 ? -1 : 1);
                    out.push_back({s1, t1, s2, t2, label});
                }
    return out;
}

std::array<double, 4> embed_chsh(const ChshInput& in, ChshEmbeddingKind kind) {
    const double h = M_PI / 2;
    if (kind == ChshEmbeddingKind::Optimal)
        return {h * in.s1, h * in.s2, h * in.t1, h * in.t2};
    return {h * in.s2, h * in.s1, h * in.t2, h * in.t1};
}

Dataset gen_synthetic(std::uint64_t seed) {
    Dataset ds;
    ds.seed = seed;

    // base points, uniform in the ball: Gaussian direction, U^(1/8) radius
    Rng rp(derive_seed(seed, 1));
    std::vector<std::array<double, 8>> points(kSamples);
    for (auto& p : points) {
        double norm_sq = 0.0;
        for (double& c : p) {
            c = rp.normal();
            norm_sq += c * c;
        }
        double norm = std::sqrt(norm_sq);
        double radius = kRadius * std::pow(rp.uniform(), 1.0 / 8.0);
        for (double& c : p) c = c / norm * radius;
    }

    // random partition into 64 clusters of 64
    Rng rpart(derive_seed(seed, 2));
    auto perm = rpart.permutation(kSamples);
    std::vector<int> cluster_of(kSamples);
    for (int c = 0; c < kClusters; ++c)
        for (int i = 0; i < kClusterSize; ++i) cluster_of[perm[c * kClusterSize + i]] = c;

    // 64 distinct corners of {-pi/4, pi/4}^8
    Rng rcorn(derive_seed(seed, 3));
    auto corner_perm = rcorn.permutation(256);
    ds.shift_vectors.resize(kClusters);
    for (int c = 0; c < kClusters; ++c) {
        std::size_t bits = corner_perm[c];
        for (int i = 0; i < 8; ++i)
            ds.shift_vectors[c][i] = ((bits >> i) & 1) ? kRadius : -kRadius;
    }

    // balanced labels over clusters
    Rng rlab(derive_seed(seed, 4));
    auto lperm = rlab.permutation(kClusters);
    ds.cluster_labels.resize(kClusters);
    for (int c = 0; c < kClusters; ++c) ds.cluster_labels[c] = lperm[c] < kClusters / 2 ? 1 : -1;

    ds.samples.resize(kSamples);
    for (int i = 0; i < kSamples; ++i) {
        Sample& s = ds.samples[i];
        int c = cluster_of[i];
        for (int k = 0; k < 8; ++k) s.x[k] = points[i][k] + ds.shift_vectors[c][k];
        s.label = ds.cluster_labels[c];
        s.cluster = c;
    }

    stratified_split(ds, derive_seed(seed, 5));
    return ds;
}

void stratified_split(Dataset& ds, std::uint64_t seed) {
    Rng rs(seed);
    ds.train_idx.clear();
    ds.val_idx.clear();
    for (int label : {1, -1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < ds.samples.size(); ++i)
            if (ds.samples[i].label == label) idx.push_back(i);
        auto perm = rs.permutation(idx.size());
        std::size_t n_train = idx.size() * 3 / 4;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (i < n_train)
                ds.train_idx.push_back(idx[perm[i]]);
            else
                ds.val_idx.push_back(idx[perm[i]]);
        }
    }
    std::sort(ds.train_idx.begin(), ds.train_idx.end());
    std::sort(ds.val_idx.begin(), ds.val_idx.end());
}

double min_intercluster_distance(const Dataset& ds) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ds.shift_vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < ds.shift_vectors.size(); ++j) {
            double d2 = 0.0;
            for (int k = 0; k < 8; ++k) {
                double d = ds.shift_vectors[i][k] - ds.shift_vectors[j][k];
                d2 += d * d;
            }
            best = std::min(best, std::sqrt(d2));
        }
    }
    return best;
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "x1,x2,x3,x4,x5,x6,x7,x8,label,cluster\n";
    for (const Sample& s : ds.samples) {
        for (double v : s.x) out << fmt_double(v) << ",";
        out << s.label << "," << s.cluster << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

Dataset read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::string line;
    std::size_t line_no = 0;

    auto fail = [&](const std::string& msg) -> ParseError {
        return ParseError(path + ":" + std::to_string(line_no) + ": " + msg);
    };

    if (!std::getline(in, line)) throw ParseError(path + ": empty file");
    ++line_no;
    bool has_cluster;
    if (line == "x1,x2,x3,x4,x5,x6,x7,x8,label,cluster")
        has_cluster = true;
    else if (line == "x1,x2,x3,x4,x5,x6,x7,x8,label")
        has_cluster = false;
    else
        throw fail("unexpected header '" + line + "'");

    Dataset ds;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        std::size_t expected = has_cluster ? 10 : 9;
        if (fields.size() != expected)
            throw fail("expected " + std::to_string(expected) + " fields, got " +
                       std::to_string(fields.size()));
        Sample s;
        try {
            std::size_t pos = 0;
            for (int k = 0; k < 8; ++k) {
                s.x[k] = std::stod(fields[k], &pos);
                if (pos != fields[k].size()) throw std::invalid_argument("trailing junk");
            }
            s.label = std::stoi(fields[8], &pos);
            if (pos != fields[8].size()) throw std::invalid_argument("trailing junk");
            if (has_cluster) {
                s.cluster = std::stoi(fields[9], &pos);
                if (pos != fields[9].size()) throw std::invalid_argument("trailing junk");
            }
        } catch (const std::exception&) {
            throw fail("malformed numeric field");
        }
        if (s.label != 1 && s.label != -1) throw fail("label must be 1 or -1");
        ds.samples.push_back(s);
    }
    return ds;
}

std::string dataset_manifest(const Dataset& ds) {
    nlohmann::json j;
    j["seed"] = ds.seed;
    j["n_samples"] = ds.samples.size();
    j["n_train"] = ds.train_idx.size();
    j["n_val"] = ds.val_idx.size();
    std::size_t pos = 0;
    for (const Sample& s : ds.samples)
        if (s.label == 1) ++pos;
    j["label_balance"] = {pos, ds.samples.size() - pos};
    j["n_clusters"] = ds.shift_vectors.size();
    if (!ds.shift_vectors.empty()) {
        j["min_intercluster_distance"] = min_intercluster_distance(ds);
        auto& sv = j["shift_vectors"] = nlohmann::json::array();
        for (const auto& v : ds.shift_vectors) sv.push_back(v);
    }
    return j.dump(2);
}

}  // namespace dqml
