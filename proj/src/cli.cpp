#include "dqml/cli.hpp"

#include "dqml/circuit.hpp"
#include "dqml/datasets.hpp"
#include "dqml/dnn.hpp"
#include "dqml/effdim.hpp"
#include "dqml/model.hpp"
#include "dqml/parallel.hpp"
#include "dqml/train.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace dqml::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string timestamp_utc() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");
    return j;
}

void check_keys(const json& j, const std::set<std::string>& allowed) {
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key()))
            throw ConfigError("unknown config key '" + item.key() + "'");
    }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_manifest(const fs::path& out_dir, const std::string& subcommand, const json& resolved,
                    const std::vector<std::string>& outputs) {
    json m;
    m["subcommand"] = subcommand;
    m["config"] = resolved;
    m["outputs"] = outputs;
    m["timestamp"] = timestamp_utc();
    write_file(out_dir / "manifest.json", m.dump(2) + "\n");
}

LossKind parse_loss(const std::string& s) {
    if (s == "product") return LossKind::Product;
    if (s == "mse") return LossKind::Mse;
    throw ConfigError("loss must be 'product' or 'mse', got '" + s + "'");
}

ChshEmbeddingKind parse_chsh_embedding(const std::string& s) {
    if (s == "optimal") return ChshEmbeddingKind::Optimal;
    if (s == "alternative") return ChshEmbeddingKind::Alternative;
    throw ConfigError("embedding must be 'optimal' or 'alternative', got '" + s + "'");
}

OmegaMode parse_omega_mode(const std::string& s) {
    if (s == "free") return OmegaMode::Free;
    if (s == "parity_trainable") return OmegaMode::ParityTrainable;
    if (s == "parity_fixed_unit") return OmegaMode::ParityFixedUnit;
    throw ConfigError("omega_mode must be free|parity_trainable|parity_fixed_unit, got '" + s +
                      "'");
}

MixingScope parse_scope(const std::string& s) {
    if (s == "global") return MixingScope::Global;
    if (s == "local") return MixingScope::Local;
    throw ConfigError("mixing_scope must be 'global' or 'local', got '" + s + "'");
}

std::uint64_t cell_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = root;
    for (std::uint64_t t : tags) s = derive_seed(s, t);
    return s;
}

// ---------------------------------------------------------------- chsh ----

struct ChshOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> repeats;
    std::optional<int> workers;
    std::optional<int> depth;
    std::optional<int> bell;
    std::optional<std::string> loss;
    std::optional<std::string> embedding;
};

int cmd_chsh(const std::string& config_path, const ChshOverrides& ov) {
    json file = load_config_file(config_path);
    check_keys(file, {"seed", "out", "repeats", "workers", "bells", "embeddings", "losses",
                      "depth", "iterations", "learning_rate", "batch_fraction", "omega_mode",
                      "eval_interval"});

    json r;
    r["seed"] = ov.seed.value_or(get_or<std::uint64_t>(file, "seed", 1));
    r["out"] = ov.out.value_or(get_or<std::string>(file, "out", "runs/chsh"));
    r["repeats"] = ov.repeats.value_or(get_or<int>(file, "repeats", 1));
    r["workers"] = ov.workers.value_or(get_or<int>(file, "workers", default_workers()));
    r["bells"] = ov.bell ? json::array({*ov.bell})
                         : get_or<json>(file, "bells", json::array({0, 1}));
    r["embeddings"] = ov.embedding
                          ? json::array({*ov.embedding})
                          : get_or<json>(file, "embeddings", json::array({"optimal", "alternative"}));
    r["losses"] = ov.loss ? json::array({*ov.loss})
                          : get_or<json>(file, "losses", json::array({"product", "mse"}));
    r["depth"] = ov.depth.value_or(get_or<int>(file, "depth", 10));
    r["iterations"] = get_or<int>(file, "iterations", 2000);
    r["learning_rate"] = get_or<double>(file, "learning_rate", 0.05);
    r["batch_fraction"] = get_or<double>(file, "batch_fraction", 1.0);
    r["omega_mode"] = get_or<std::string>(file, "omega_mode", "parity_fixed_unit");
    r["eval_interval"] = get_or<int>(file, "eval_interval", 100);

    if (r["repeats"].get<int>() < 1) throw ConfigError("repeats must be >= 1");

    const fs::path out_dir(r["out"].get<std::string>());
    fs::create_directories(out_dir);

    const auto inputs16 = chsh_inputs();
    std::ostringstream runs;
    runs << "bell,embedding,loss_kind,repeat,seed,final_loss,accuracy,mean_success,S,p_win\n";
    std::ostringstream per_input;
    per_input << "bell,embedding,loss_kind,repeat,s1,s2,t1,t2,label,expectation,normalized,"
                 "success\n";
    std::vector<std::string> outputs = {"chsh_runs.csv", "chsh_inputs.csv"};

    for (const auto& bell_j : r["bells"]) {
        const int bell = bell_j.get<int>();
        for (const auto& emb_j : r["embeddings"]) {
            const std::string emb_name = emb_j.get<std::string>();
            const ChshEmbeddingKind emb = parse_chsh_embedding(emb_name);
            for (const auto& loss_j : r["losses"]) {
                const std::string loss_name = loss_j.get<std::string>();
                const LossKind loss = parse_loss(loss_name);
                for (int rep = 0; rep < r["repeats"].get<int>(); ++rep) {
                    const std::uint64_t seed =
                        cell_seed(r["seed"].get<std::uint64_t>(),
                                  {11 + static_cast<std::uint64_t>(bell),
                                   21 + static_cast<std::uint64_t>(emb == ChshEmbeddingKind::Optimal ? 0 : 1),
                                   31 + static_cast<std::uint64_t>(loss == LossKind::Product ? 0 : 1),
                                   41 + static_cast<std::uint64_t>(rep)});

                    CircuitConfig cc;
                    cc.qubits_per_proc = 2;
                    cc.n_bell = bell;
                    cc.conv_depth = r["depth"].get<int>();
                    cc.embedding = emb == ChshEmbeddingKind::Optimal ? Embedding::ChshOptimal
                                                                     : Embedding::ChshAlternative;
                    CircuitTemplate tmpl = assemble(cc);

                    std::vector<std::array<double, 4>> feats(16);
                    TrainTask task;
                    task.tmpl = &tmpl;
                    for (int i = 0; i < 16; ++i) {
                        feats[i] = embed_chsh(inputs16[i], emb);
                        task.inputs.push_back({feats[i].data(), 4, nullptr, nullptr});
                        task.labels.push_back(inputs16[i].label);
                        task.train_idx.push_back(i);
                        task.val_idx.push_back(i);
                    }

                    TrainConfig tc;
                    tc.learning_rate = r["learning_rate"].get<double>();
                    tc.iterations = r["iterations"].get<int>();
                    tc.batch_fraction = r["batch_fraction"].get<double>();
                    tc.seed = seed;
                    tc.loss = loss;
                    tc.omega_mode = parse_omega_mode(r["omega_mode"].get<std::string>());
                    tc.eval_interval = r["eval_interval"].get<int>();
                    tc.workers = r["workers"].get<int>();

                    TrainState st = train(task, tc);

                    WeightVector w = omega_from_state(tc.omega_mode, st.omega);
                    double scale = std::max({std::abs(w.values[0]), std::abs(w.values[1]),
                                             std::abs(w.values[2]), std::abs(w.values[3])});
                    auto es = evaluate_expectations(task, st.params, w, task.train_idx,
                                                    tc.workers);
                    double mean_success = 0.0;
                    std::array<double, 4> corr{};  // indexed by 2*s1 + t1
                    for (int i = 0; i < 16; ++i) {
                        const ChshInput& in = inputs16[i];
                        double success = chsh_success(es[i], in.label, scale);
                        mean_success += success / 16.0;
                        corr[2 * in.s1 + in.t1] += in.s2 * in.t2 * (es[i] / scale) / 4.0;
                        per_input << bell << "," << emb_name << "," << loss_name << "," << rep
                                  << "," << in.s1 << "," << in.s2 << "," << in.t1 << ","
                                  << in.t2 << "," << in.label << "," << fmt_double(es[i]) << ","
                                  << fmt_double(in.label * es[i] / scale) << ","
                                  << fmt_double(success) << "\n";
                    }
                    ChshCorrelator c = chsh_correlator(corr);
                    const MetricRow& last = st.history.back();
                    runs << bell << "," << emb_name << "," << loss_name << "," << rep << ","
                         << seed << "," << fmt_double(last.loss) << ","
                         << fmt_double(last.train_acc) << "," << fmt_double(mean_success) << ","
                         << fmt_double(c.s) << "," << fmt_double(c.p_win) << "\n";

                    std::string metric_name = "metrics_b" + std::to_string(bell) + "_" +
                                              emb_name + "_" + loss_name + "_r" +
                                              std::to_string(rep) + ".csv";
                    write_file(out_dir / metric_name, metrics_csv(st.history));
                    outputs.push_back(metric_name);
                }
            }
        }
    }
    write_file(out_dir / "chsh_runs.csv", runs.str());
    write_file(out_dir / "chsh_inputs.csv", per_input.str());
    write_manifest(out_dir, "chsh", r, outputs);
    return kExitOk;
}

// --------------------------------------------------------------- synth ----

struct SynthOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> repeats;
    std::optional<int> workers;
    std::optional<int> depth;
    std::optional<int> bell;
    std::optional<std::string> loss;
    std::optional<int> mixing_depth;
    std::optional<int> second_stage_depth;
};

Dataset load_or_generate(const json& r, const fs::path& out_dir,
                         std::vector<std::string>& outputs) {
    const std::string csv = r["dataset_csv"].get<std::string>();
    if (!csv.empty()) {
        Dataset ds = read_csv(csv);
        stratified_split(ds, derive_seed(r["dataset_seed"].get<std::uint64_t>(), 99));
        return ds;
    }
    Dataset ds = gen_synthetic(r["dataset_seed"].get<std::uint64_t>());
    write_csv(ds, (out_dir / "dataset.csv").string());
    write_file(out_dir / "dataset_manifest.json", dataset_manifest(ds) + "\n");
    outputs.push_back("dataset.csv");
    outputs.push_back("dataset_manifest.json");
    return ds;
}

struct CellResult {
    double final_loss = 0.0, train_acc = 0.0, val_acc = 0.0;
};

CellResult run_synth_cell(const Dataset& ds, const CircuitTemplate& tmpl, const TrainConfig& tc,
                          const fs::path& out_dir, const std::string& run_tag,
                          const std::string& checkpoint_dir, std::vector<std::string>& outputs) {
    TrainTask task;
    task.tmpl = &tmpl;
    task.inputs.reserve(ds.samples.size());
    task.labels.reserve(ds.samples.size());
    for (const Sample& s : ds.samples) {
        task.inputs.push_back({s.x.data(), 8, nullptr, nullptr});
        task.labels.push_back(s.label);
    }
    task.train_idx = ds.train_idx;
    task.val_idx = ds.val_idx;

    TrainState st = train(task, tc);

    std::string metric_name = "metrics_" + run_tag + ".csv";
    write_file(out_dir / metric_name, metrics_csv(st.history));
    outputs.push_back(metric_name);
    if (!checkpoint_dir.empty()) {
        fs::create_directories(checkpoint_dir);
        write_file(fs::path(checkpoint_dir) / ("ckpt_" + run_tag + ".json"),
                   checkpoint_json(st) + "\n");
    }
    const MetricRow& last = st.history.back();
    return {last.loss, last.train_acc, last.val_acc};
}

void append_summary(std::ostringstream& os,
                    const std::map<std::string, std::vector<double>>& groups) {
    for (const auto& [key, vals] : groups) {
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        double std_dev = vals.size() > 1 ? std::sqrt(var / (static_cast<double>(vals.size()) - 1))
                                         : 0.0;
        os << key << "," << vals.size() << "," << fmt_double(mean) << "," << fmt_double(std_dev)
           << "\n";
    }
}

int cmd_synth(const std::string& config_path, const SynthOverrides& ov) {
    json file = load_config_file(config_path);
    check_keys(file, {"seed", "dataset_seed", "dataset_csv", "out", "bells", "depths", "repeats",
                      "iterations", "learning_rate", "batch_fraction", "loss", "omega_mode",
                      "eval_interval", "workers", "mixing_depth", "mixing_scope",
                      "second_stage_depth", "checkpoint_dir"});

    json r;
    r["seed"] = ov.seed.value_or(get_or<std::uint64_t>(file, "seed", 1));
    r["dataset_seed"] = get_or<std::uint64_t>(file, "dataset_seed", 1);
    r["dataset_csv"] = get_or<std::string>(file, "dataset_csv", "");
    r["out"] = ov.out.value_or(get_or<std::string>(file, "out", "runs/synth"));
    r["bells"] = ov.bell ? json::array({*ov.bell})
                         : get_or<json>(file, "bells", json::array({0, 1, 2, 4}));
    r["depths"] = ov.depth ? json::array({*ov.depth})
                           : get_or<json>(file, "depths", json::array({10}));
    r["repeats"] = ov.repeats.value_or(get_or<int>(file, "repeats", 3));
    r["iterations"] = get_or<int>(file, "iterations", 500);
    r["learning_rate"] = get_or<double>(file, "learning_rate", 0.05);
    r["batch_fraction"] = get_or<double>(file, "batch_fraction", 0.25);
    r["loss"] = ov.loss.value_or(get_or<std::string>(file, "loss", "mse"));
    r["omega_mode"] = get_or<std::string>(file, "omega_mode", "parity_fixed_unit");
    r["eval_interval"] = get_or<int>(file, "eval_interval", 100);
    r["workers"] = ov.workers.value_or(get_or<int>(file, "workers", default_workers()));
    r["mixing_depth"] = ov.mixing_depth.value_or(get_or<int>(file, "mixing_depth", 0));
    r["mixing_scope"] = get_or<std::string>(file, "mixing_scope", "global");
    r["second_stage_depth"] =
        ov.second_stage_depth.value_or(get_or<int>(file, "second_stage_depth", 0));
    r["checkpoint_dir"] = get_or<std::string>(file, "checkpoint_dir", "");

    if (r["repeats"].get<int>() < 1) throw ConfigError("repeats must be >= 1");

    const fs::path out_dir(r["out"].get<std::string>());
    fs::create_directories(out_dir);
    std::vector<std::string> outputs = {"synth_runs.csv", "synth_summary.csv"};
    Dataset ds = load_or_generate(r, out_dir, outputs);

    std::ostringstream runs;
    runs << "bell,depth,mixing_depth,repeat,seed,final_loss,train_acc,val_acc\n";
    std::map<std::string, std::vector<double>> groups;

    for (const auto& bell_j : r["bells"]) {
        const int bell = bell_j.get<int>();
        for (const auto& depth_j : r["depths"]) {
            const int depth = depth_j.get<int>();
            CircuitConfig cc;
            cc.qubits_per_proc = 4;
            cc.n_bell = bell;
            cc.conv_depth = depth;
            cc.second_stage_depth = r["second_stage_depth"].get<int>();
            cc.mixing_depth = r["mixing_depth"].get<int>();
            cc.mixing_scope = parse_scope(r["mixing_scope"].get<std::string>());
            cc.embedding = Embedding::FeatureMap;
            CircuitTemplate tmpl = assemble(cc);

            for (int rep = 0; rep < r["repeats"].get<int>(); ++rep) {
                const std::uint64_t seed =
                    cell_seed(r["seed"].get<std::uint64_t>(),
                              {51 + static_cast<std::uint64_t>(bell),
                               61 + static_cast<std::uint64_t>(depth),
                               71 + static_cast<std::uint64_t>(cc.mixing_depth),
                               81 + static_cast<std::uint64_t>(rep)});
                TrainConfig tc;
                tc.learning_rate = r["learning_rate"].get<double>();
                tc.iterations = r["iterations"].get<int>();
                tc.batch_fraction = r["batch_fraction"].get<double>();
                tc.seed = seed;
                tc.loss = parse_loss(r["loss"].get<std::string>());
                tc.omega_mode = parse_omega_mode(r["omega_mode"].get<std::string>());
                tc.eval_interval = r["eval_interval"].get<int>();
                tc.workers = r["workers"].get<int>();

                std::string tag = "b" + std::to_string(bell) + "_d" + std::to_string(depth) +
                                  "_m" + std::to_string(cc.mixing_depth) + "_r" +
                                  std::to_string(rep);
                CellResult res = run_synth_cell(ds, tmpl, tc, out_dir, tag,
                                                r["checkpoint_dir"].get<std::string>(), outputs);
                runs << bell << "," << depth << "," << cc.mixing_depth << "," << rep << ","
                     << seed << "," << fmt_double(res.final_loss) << ","
                     << fmt_double(res.train_acc) << "," << fmt_double(res.val_acc) << "\n";
                groups[std::to_string(bell) + "," + std::to_string(depth) + "," +
                       std::to_string(cc.mixing_depth)]
                    .push_back(res.val_acc);
            }
        }
    }

    std::ostringstream summary;
    summary << "bell,depth,mixing_depth,n,val_acc_mean,val_acc_std\n";
    append_summary(summary, groups);
    write_file(out_dir / "synth_runs.csv", runs.str());
    write_file(out_dir / "synth_summary.csv", summary.str());
    write_manifest(out_dir, "synth", r, outputs);
    return kExitOk;
}

// -------------------------------------------------------------- effdim ----

struct EffdimOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> workers;
    std::optional<int> depth;
    std::optional<int> bell;
    std::optional<int> mixing_depth;
    std::optional<int> second_stage_depth;
};

int cmd_effdim(const std::string& config_path, const EffdimOverrides& ov) {
    json file = load_config_file(config_path);
    check_keys(file, {"seed", "out", "bells", "d_max", "mixing_depth", "mixing_scope",
                      "second_stage_depth", "qubits_per_proc", "n_haar", "n_paramsets",
                      "rank_tol_rel", "workers"});

    json r;
    r["seed"] = ov.seed.value_or(get_or<std::uint64_t>(file, "seed", 1));
    r["out"] = ov.out.value_or(get_or<std::string>(file, "out", "runs/effdim"));
    r["bells"] = ov.bell ? json::array({*ov.bell})
                         : get_or<json>(file, "bells", json::array({0, 1, 2, 3, 4}));
    r["d_max"] = ov.depth.value_or(get_or<int>(file, "d_max", 12));
    r["mixing_depth"] = ov.mixing_depth.value_or(get_or<int>(file, "mixing_depth", 0));
    r["mixing_scope"] = get_or<std::string>(file, "mixing_scope", "global");
    r["second_stage_depth"] =
        ov.second_stage_depth.value_or(get_or<int>(file, "second_stage_depth", 0));
    r["qubits_per_proc"] = get_or<int>(file, "qubits_per_proc", 4);
    r["n_haar"] = get_or<int>(file, "n_haar", 100);
    r["n_paramsets"] = get_or<int>(file, "n_paramsets", 20);
    r["rank_tol_rel"] = get_or<double>(file, "rank_tol_rel", 1e-10);
    r["workers"] = ov.workers.value_or(get_or<int>(file, "workers", default_workers()));

    const fs::path out_dir(r["out"].get<std::string>());
    fs::create_directories(out_dir);

    EDProtocolConfig protocol;
    protocol.n_haar = r["n_haar"].get<int>();
    protocol.n_paramsets = r["n_paramsets"].get<int>();
    protocol.rank_tol_rel = r["rank_tol_rel"].get<double>();
    protocol.workers = r["workers"].get<int>();

    std::vector<SweepRecord> records;
    for (const auto& bell_j : r["bells"]) {
        CircuitConfig cc;
        cc.qubits_per_proc = r["qubits_per_proc"].get<int>();
        cc.n_bell = bell_j.get<int>();
        cc.second_stage_depth = r["second_stage_depth"].get<int>();
        cc.mixing_depth = r["mixing_depth"].get<int>();
        cc.mixing_scope = parse_scope(r["mixing_scope"].get<std::string>());
        cc.embedding = Embedding::HaarRandom;
        auto rows = depth_sweep(cc, protocol, r["d_max"].get<int>(),
                                derive_seed(r["seed"].get<std::uint64_t>(),
                                            10 + static_cast<std::uint64_t>(cc.n_bell)));
        records.insert(records.end(), rows.begin(), rows.end());
    }

    write_file(out_dir / "effdim_sweep.csv", sweep_csv(records));
    write_manifest(out_dir, "effdim", r, {"effdim_sweep.csv"});
    return kExitOk;
}

// ----------------------------------------------------------------- dnn ----

struct DnnOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> repeats;
    std::optional<int> workers;
};

int cmd_dnn(const std::string& config_path, const DnnOverrides& ov) {
    json file = load_config_file(config_path);
    check_keys(file, {"seed", "dataset_seed", "dataset_csv", "out", "repeats", "iterations",
                      "learning_rate", "batch_fraction", "eval_interval", "workers"});

    json r;
    r["seed"] = ov.seed.value_or(get_or<std::uint64_t>(file, "seed", 1));
    r["dataset_seed"] = get_or<std::uint64_t>(file, "dataset_seed", 1);
    r["dataset_csv"] = get_or<std::string>(file, "dataset_csv", "");
    r["out"] = ov.out.value_or(get_or<std::string>(file, "out", "runs/dnn"));
    r["repeats"] = ov.repeats.value_or(get_or<int>(file, "repeats", 3));
    r["iterations"] = get_or<int>(file, "iterations", 2000);
    r["learning_rate"] = get_or<double>(file, "learning_rate", 0.01);
    r["batch_fraction"] = get_or<double>(file, "batch_fraction", 0.25);
    r["eval_interval"] = get_or<int>(file, "eval_interval", 100);
    r["workers"] = ov.workers.value_or(get_or<int>(file, "workers", default_workers()));

    if (r["repeats"].get<int>() < 1) throw ConfigError("repeats must be >= 1");

    const fs::path out_dir(r["out"].get<std::string>());
    fs::create_directories(out_dir);
    std::vector<std::string> outputs = {"dnn_runs.csv", "dnn_summary.csv"};
    Dataset ds = load_or_generate(r, out_dir, outputs);

    std::cout << "dnn_param_count " << dnn_param_count() << "\n";

    std::ostringstream runs;
    runs << "param_count,repeat,seed,final_loss,train_acc,val_acc\n";
    std::map<std::string, std::vector<double>> groups;
    for (int rep = 0; rep < r["repeats"].get<int>(); ++rep) {
        const std::uint64_t seed =
            cell_seed(r["seed"].get<std::uint64_t>(), {91 + static_cast<std::uint64_t>(rep)});
        DnnTrainConfig dc;
        dc.learning_rate = r["learning_rate"].get<double>();
        dc.iterations = r["iterations"].get<int>();
        dc.batch_fraction = r["batch_fraction"].get<double>();
        dc.seed = seed;
        dc.eval_interval = r["eval_interval"].get<int>();
        dc.workers = r["workers"].get<int>();

        DnnTrainResult res = train_dnn(ds, dc);
        std::string metric_name = "metrics_r" + std::to_string(rep) + ".csv";
        write_file(out_dir / metric_name, metrics_csv(res.history));
        outputs.push_back(metric_name);
        const MetricRow& last = res.history.back();
        runs << dnn_param_count() << "," << rep << "," << seed << "," << fmt_double(last.loss)
             << "," << fmt_double(last.train_acc) << "," << fmt_double(last.val_acc) << "\n";
        groups[std::to_string(dnn_param_count())].push_back(last.val_acc);
    }

    std::ostringstream summary;
    summary << "param_count,n,val_acc_mean,val_acc_std\n";
    append_summary(summary, groups);
    write_file(out_dir / "dnn_runs.csv", runs.str());
    write_file(out_dir / "dnn_summary.csv", summary.str());
    write_manifest(out_dir, "dnn", r, outputs);
    return kExitOk;
}

// -------------------------------------------------------------- report ----

// Key columns identify a grid cell; repeat/seed vary across aggregated runs
// and are dropped; every other column must be numeric and gets mean/std.
const std::set<std::string> kKeyColumns = {"bell",        "embedding", "loss_kind",
                                           "depth",       "mixing_depth", "iteration",
                                           "param_count", "n_bell",    "n"};
const std::set<std::string> kDroppedColumns = {"repeat", "seed"};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_simple_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (first) {
            t.header = fields;
            first = false;
        } else {
            if (fields.size() != t.header.size())
                throw ConfigError(path + ": row width does not match header");
            t.rows.push_back(fields);
        }
    }
    if (first) throw ConfigError(path + ": empty file");
    return t;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_path) {
    if (inputs.empty()) throw ConfigError("report needs at least one input CSV");
    CsvTable merged = read_simple_csv(inputs[0]);
    for (std::size_t i = 1; i < inputs.size(); ++i) {
        CsvTable t = read_simple_csv(inputs[i]);
        if (t.header != merged.header)
            throw ConfigError(inputs[i] + ": header does not match " + inputs[0]);
        merged.rows.insert(merged.rows.end(), t.rows.begin(), t.rows.end());
    }
    if (merged.rows.empty()) throw ConfigError("no data rows in input set");

    std::vector<std::size_t> key_cols, metric_cols;
    for (std::size_t c = 0; c < merged.header.size(); ++c) {
        const std::string& name = merged.header[c];
        if (kDroppedColumns.count(name)) continue;
        if (kKeyColumns.count(name))
            key_cols.push_back(c);
        else
            metric_cols.push_back(c);
    }
    if (metric_cols.empty()) throw ConfigError("input schema has no metric columns");
    for (std::size_t c : metric_cols) {
        for (const auto& row : merged.rows) {
            char* end = nullptr;
            std::strtod(row[c].c_str(), &end);
            if (end == row[c].c_str() || *end != '\0')
                throw ConfigError("column '" + merged.header[c] + "' holds non-numeric value '" +
                                  row[c] + "'");
        }
    }

    std::map<std::string, std::vector<std::vector<double>>> groups;  // key -> per-metric values
    for (const auto& row : merged.rows) {
        std::string key;
        for (std::size_t c : key_cols) {
            if (!key.empty()) key += ",";
            key += row[c];
        }
        auto& vals = groups[key];
        vals.resize(metric_cols.size());
        for (std::size_t m = 0; m < metric_cols.size(); ++m)
            vals[m].push_back(std::strtod(row[metric_cols[m]].c_str(), nullptr));
    }

    std::ostringstream os;
    bool first_col = true;
    for (std::size_t c : key_cols) {
        if (!first_col) os << ",";
        os << merged.header[c];
        first_col = false;
    }
    if (!key_cols.empty()) os << ",";
    os << "n";
    for (std::size_t m : metric_cols)
        os << "," << merged.header[m] << "_mean," << merged.header[m] << "_std";
    os << "\n";
    for (const auto& [key, vals] : groups) {
        if (!key.empty()) os << key << ",";
        os << vals[0].size();
        for (const auto& metric : vals) {
            double mean = 0.0;
            for (double v : metric) mean += v;
            mean /= static_cast<double>(metric.size());
            double var = 0.0;
            for (double v : metric) var += (v - mean) * (v - mean);
            double sd =
                metric.size() > 1 ? std::sqrt(var / (static_cast<double>(metric.size()) - 1)) : 0.0;
            os << "," << fmt_double(mean) << "," << fmt_double(sd);
        }
        os << "\n";
    }

    if (out_path.empty() || out_path == "-") {
        std::cout << os.str();
    } else {
        fs::path p(out_path);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        write_file(p, os.str());
    }
    return kExitOk;
}

}  // namespace

int run_args(const std::vector<std::string>& args) {
    CLI::App app{"distributed quantum classifier experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    ChshOverrides chsh_ov;
    SynthOverrides synth_ov;
    EffdimOverrides effdim_ov;
    DnnOverrides dnn_ov;
    std::vector<std::string> report_inputs;
    std::string report_out;

    auto add_common = [&](CLI::App* sub, auto& ov) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--seed", ov.seed, "root seed");
        sub->add_option("--out", ov.out, "output directory");
        sub->add_option("--workers", ov.workers, "worker threads");
    };

    CLI::App* chsh = app.add_subcommand("chsh", "extended-CHSH training campaign");
    add_common(chsh, chsh_ov);
    chsh->add_option("--repeats", chsh_ov.repeats, "repeats per cell");
    chsh->add_option("--depth", chsh_ov.depth, "convolution depth");
    chsh->add_option("--bell", chsh_ov.bell, "single Bell level");
    chsh->add_option("--loss", chsh_ov.loss, "single loss kind");
    chsh->add_option("--embedding", chsh_ov.embedding, "single embedding kind");

    CLI::App* synth = app.add_subcommand("synth", "synthetic-dataset training campaign");
    add_common(synth, synth_ov);
    synth->add_option("--repeats", synth_ov.repeats, "repeats per cell");
    synth->add_option("--depth", synth_ov.depth, "single convolution depth");
    synth->add_option("--bell", synth_ov.bell, "single Bell level");
    synth->add_option("--loss", synth_ov.loss, "loss kind");
    synth->add_option("--mixing-depth", synth_ov.mixing_depth, "entanglement mixing depth");
    synth->add_option("--second-stage-depth", synth_ov.second_stage_depth,
                      "two-qubit stage depth");

    CLI::App* effdim = app.add_subcommand("effdim", "effective-dimension depth sweep");
    add_common(effdim, effdim_ov);
    effdim->add_option("--depth", effdim_ov.depth, "maximum depth");
    effdim->add_option("--bell", effdim_ov.bell, "single Bell level");
    effdim->add_option("--mixing-depth", effdim_ov.mixing_depth, "entanglement mixing depth");
    effdim->add_option("--second-stage-depth", effdim_ov.second_stage_depth,
                       "two-qubit stage depth");

    CLI::App* dnn = app.add_subcommand("dnn", "classical baseline training campaign");
    add_common(dnn, dnn_ov);
    dnn->add_option("--repeats", dnn_ov.repeats, "repeats");

    CLI::App* report = app.add_subcommand("report", "aggregate run CSVs into mean/std tables");
    report->add_option("inputs", report_inputs, "input CSV files");
    report->add_option("--out", report_out, "output CSV path ('-' for stdout)");

    std::vector<const char*> argv;
    argv.push_back("dqml");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (chsh->parsed()) return cmd_chsh(config_path, chsh_ov);
        if (synth->parsed()) return cmd_synth(config_path, synth_ov);
        if (effdim->parsed()) return cmd_effdim(config_path, effdim_ov);
        if (dnn->parsed()) return cmd_dnn(config_path, dnn_ov);
        if (report->parsed()) return cmd_report(report_inputs, report_out);
        std::cerr << "no subcommand given\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_args(args);
}

}  // namespace dqml::cli
