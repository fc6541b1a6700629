#include "dqml/circuit.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace dqml {

namespace {

// H(x)H, CZ, RX(p0)(x)RX(p1) on global qubits (qa, qb).
void emit_conv_block(std::vector<GateSpec>& out, int qa, int qb, int p0, int p1) {
    out.push_back({GateKind::H, qa, -1, -1, -1, AngleBinding::none()});
    out.push_back({GateKind::H, qb, -1, -1, -1, AngleBinding::none()});
    out.push_back({GateKind::CZ, qa, qb, -1, -1, AngleBinding::none()});
    out.push_back({GateKind::RX, qa, -1, -1, -1, AngleBinding::parameter(p0)});
    out.push_back({GateKind::RX, qb, -1, -1, -1, AngleBinding::parameter(p1)});
}

// Deferred-measurement pooling branch pair for (measured m -> kept r).
// Z rotation precedes X rotation in each branch so no parameter sits in a
// gate that commutes with the final Z-basis marginal.
void emit_pool_pair(std::vector<GateSpec>& out, int m, int r, int p) {
    for (int v = 0; v <= 1; ++v) {
        out.push_back({GateKind::ControlledRZ, m, r, v, -1, AngleBinding::parameter(p++)});
        out.push_back({GateKind::ControlledRX, m, r, v, -1, AngleBinding::parameter(p++)});
    }
}

// Brick-wall pairs over a closed chain of `chain` qubits starting at `base`.
// Odd depth (1-based): (0,1),(2,3),...; even: (1,2),(3,4),...,(chain-1,0).
std::vector<std::pair<int, int>> brick_pairs(int base, int chain, int depth_index) {
    std::vector<std::pair<int, int>> pairs;
    if (chain == 2) {
        pairs.emplace_back(base, base + 1);
        return pairs;
    }
    bool odd = (depth_index % 2) == 1;
    for (int i = 0; i < chain; i += 2) {
        if (odd) {
            pairs.emplace_back(base + i, base + i + 1);
        } else {
            pairs.emplace_back(base + i + 1, base + (i + 2) % chain);
        }
    }
    return pairs;
}

}  // namespace

void CircuitConfig::validate() const {
    if (qubits_per_proc != 2 && qubits_per_proc != 4)
        throw std::invalid_argument("qubits_per_proc must be 2 or 4");
    if (n_bell < 0 || n_bell > qubits_per_proc)
        throw std::invalid_argument("n_bell must be in 0..qubits_per_proc");
    if (conv_depth < 0) throw std::invalid_argument("conv_depth must be >= 0");
    if (second_stage_depth < 0) throw std::invalid_argument("second_stage_depth must be >= 0");
    if (qubits_per_proc == 2 && second_stage_depth != 0)
        throw std::invalid_argument("second_stage_depth requires qubits_per_proc = 4");
    if (mixing_depth < 0) throw std::invalid_argument("mixing_depth must be >= 0");
    if ((embedding == Embedding::ChshOptimal || embedding == Embedding::ChshAlternative) &&
        qubits_per_proc != 2)
        throw std::invalid_argument("chsh embeddings require qubits_per_proc = 2");
}

std::vector<GateSpec> build_embedding(const CircuitConfig& config) {
    config.validate();
    const int qpp = config.qubits_per_proc;
    std::vector<GateSpec> out;
    if (config.embedding == Embedding::HaarRandom) {
        for (int proc = 0; proc < 2; ++proc) {
            GateSpec g{GateKind::HaarBlock, proc * qpp, proc * qpp + qpp - 1, -1, proc,
                       AngleBinding::none()};
            out.push_back(g);
        }
        return out;
    }
    for (int proc = 0; proc < 2; ++proc) {
        const int base = proc * qpp;
        for (int i = 0; i < qpp; ++i)
            out.push_back({GateKind::H, base + i, -1, -1, -1, AngleBinding::none()});
        for (int i = 0; i < qpp; ++i)
            out.push_back({GateKind::RZ, base + i, -1, -1, -1, AngleBinding::feature(base + i)});
        for (int i = 0; i + 1 < qpp; ++i)
            out.push_back({GateKind::RZZ, base + i, base + i + 1, -1, -1,
                           AngleBinding::feature_zz(base + i, base + i + 1)});
    }
    return out;
}

std::vector<GateSpec> build_conv_layer(int qubits_per_proc, int depth_index,
                                       int param_offset_a, int param_offset_b) {
    std::vector<GateSpec> out;
    for (int proc = 0; proc < 2; ++proc) {
        int p = proc == 0 ? param_offset_a : param_offset_b;
        for (auto [qa, qb] : brick_pairs(proc * qubits_per_proc, qubits_per_proc, depth_index)) {
            emit_conv_block(out, qa, qb, p, p + 1);
            p += 2;
        }
    }
    return out;
}

std::vector<GateSpec> build_pool(int qubits_per_proc, int stage,
                                 int param_offset_a, int param_offset_b) {
    if (stage != 1 && stage != 2) throw std::invalid_argument("pool stage must be 1 or 2");
    if (stage == 2 && qubits_per_proc != 4)
        throw std::invalid_argument("pool stage 2 requires qubits_per_proc = 4");
    std::vector<GateSpec> out;
    for (int proc = 0; proc < 2; ++proc) {
        const int base = proc * qubits_per_proc;
        int p = proc == 0 ? param_offset_a : param_offset_b;
        if (stage == 1 && qubits_per_proc == 4) {
            // Measure local qubits 0 and 2; on each kept qubit (1 and 3) the
            // Z angle is selected by qubit 2's outcome and the X angle by
            // qubit 0's outcome. The cross wiring keeps every pooling
            // parameter rank-live, which a per-pair wiring does not.
            for (int r : {1, 3}) {
                for (int v = 0; v <= 1; ++v) {
                    out.push_back({GateKind::ControlledRZ, base + 2, base + r, v, -1,
                                   AngleBinding::parameter(p++)});
                    out.push_back({GateKind::ControlledRX, base + 0, base + r, v, -1,
                                   AngleBinding::parameter(p++)});
                }
            }
        } else if (stage == 1) {
            // qubits_per_proc = 2: measure local 0, keep 1
            emit_pool_pair(out, base + 0, base + 1, p);
        } else {
            emit_pool_pair(out, base + 1, base + 3, p);
        }
    }
    return out;
}

std::vector<GateSpec> build_mixing(int total_qubits, int mixing_depth,
                                   MixingScope scope, int param_offset) {
    std::vector<GateSpec> out;
    int p = param_offset;
    for (int t = 1; t <= mixing_depth; ++t) {
        if (scope == MixingScope::Global) {
            for (auto [qa, qb] : brick_pairs(0, total_qubits, t)) {
                emit_conv_block(out, qa, qb, p, p + 1);
                p += 2;
            }
        } else {
            const int qpp = total_qubits / 2;
            for (int proc = 0; proc < 2; ++proc) {
                for (auto [qa, qb] : brick_pairs(proc * qpp, qpp, t)) {
                    emit_conv_block(out, qa, qb, p, p + 1);
                    p += 2;
                }
            }
        }
    }
    return out;
}

CircuitTemplate assemble(const CircuitConfig& config) {
    config.validate();
    const int qpp = config.qubits_per_proc;
    const int ppd = qpp == 4 ? 4 : 2;  // conv parameters per processor per depth
    const int pool1 = 4 * (qpp / 2);   // pool parameters per processor, stage 1

    CircuitTemplate t;
    t.config = config;
    t.num_qubits = config.num_qubits();

    int cursor = 0;
    auto segment = [&](const std::string& name, int count) {
        t.segments.push_back({name, cursor, cursor + count});
        cursor += count;
        return cursor - count;
    };

    const int mix_params = 2 * (t.num_qubits / 2) * config.mixing_depth;
    const int mix0 = segment("mixing", mix_params);
    const int convA1 = segment("convA.s1", ppd * config.conv_depth);
    const int convB1 = segment("convB.s1", ppd * config.conv_depth);
    const int poolA1 = segment("poolA.s1", pool1);
    const int poolB1 = segment("poolB.s1", pool1);
    int convA2 = 0, convB2 = 0, poolA2 = 0, poolB2 = 0;
    if (qpp == 4) {
        convA2 = segment("convA.s2", 2 * config.second_stage_depth);
        convB2 = segment("convB.s2", 2 * config.second_stage_depth);
        poolA2 = segment("poolA.s2", 4);
        poolB2 = segment("poolB.s2", 4);
    }
    t.param_count = cursor;

    auto append = [&](std::vector<GateSpec>&& gates) {
        for (auto& g : gates) t.gates.push_back(g);
    };

    append(build_mixing(t.num_qubits, config.mixing_depth, config.mixing_scope, mix0));
    append(build_embedding(config));
    for (int d = 1; d <= config.conv_depth; ++d)
        append(build_conv_layer(qpp, d, convA1 + ppd * (d - 1), convB1 + ppd * (d - 1)));
    append(build_pool(qpp, 1, poolA1, poolB1));

    if (qpp == 4) {
        for (int d = 1; d <= config.second_stage_depth; ++d) {
            std::vector<GateSpec> stage2;
            emit_conv_block(stage2, 1, 3, convA2 + 2 * (d - 1), convA2 + 2 * (d - 1) + 1);
            emit_conv_block(stage2, qpp + 1, qpp + 3, convB2 + 2 * (d - 1),
                            convB2 + 2 * (d - 1) + 1);
            append(std::move(stage2));
        }
        append(build_pool(qpp, 2, poolA2, poolB2));
        t.output_qubits = {3, qpp + 3};
        t.pooled_qubits = {0, 2, qpp + 0, qpp + 2, 1, qpp + 1};
    } else {
        t.output_qubits = {1, qpp + 1};
        t.pooled_qubits = {0, qpp + 0};
    }
    return t;
}

double resolve_angle(const AngleBinding& binding, const double* params, const EvalInput& input) {
    switch (binding.kind) {
        case AngleBinding::Kind::Fixed:
            return binding.fixed;
        case AngleBinding::Kind::Param:
            return params[binding.param];
        case AngleBinding::Kind::FeatureRZ:
            return input.features[binding.feat_i];
        case AngleBinding::Kind::FeatureRZZ:
            return 0.5 * (M_PI - input.features[binding.feat_i]) *
                   (M_PI - input.features[binding.feat_j]);
        default:
            throw std::invalid_argument("gate has no angle");
    }
}

void run_template(const CircuitTemplate& t, const std::vector<double>& params,
                  const EvalInput& input, Statevector& state) {
    if (static_cast<int>(params.size()) != t.param_count)
        throw std::invalid_argument("parameter vector length does not match template");
    const double* p = params.data();
    for (const GateSpec& g : t.gates) {
        switch (g.kind) {
            case GateKind::H:
                apply_h(state, g.q0);
                break;
            case GateKind::CZ:
                apply_cz(state, g.q0, g.q1);
                break;
            case GateKind::RX:
                apply_rx(state, g.q0, resolve_angle(g.angle, p, input));
                break;
            case GateKind::RZ:
                apply_rz(state, g.q0, resolve_angle(g.angle, p, input));
                break;
            case GateKind::RZZ:
                apply_rzz(state, g.q0, g.q1, resolve_angle(g.angle, p, input));
                break;
            case GateKind::ControlledRX:
                apply_crx(state, g.q0, g.control_value, g.q1, resolve_angle(g.angle, p, input));
                break;
            case GateKind::ControlledRZ:
                apply_crz(state, g.q0, g.control_value, g.q1, resolve_angle(g.angle, p, input));
                break;
            case GateKind::HaarBlock: {
                const GateMatrix* block = g.block_index == 0 ? input.haar_a : input.haar_b;
                if (block == nullptr)
                    throw std::invalid_argument("haar embedding requires per-processor unitaries");
                apply_dense_block(state, g.q0, g.q1 - g.q0 + 1, *block);
                break;
            }
        }
    }
}

OutcomeDistribution evaluate(const CircuitTemplate& t, const std::vector<double>& params,
                             const EvalInput& input) {
    if (t.config.embedding != Embedding::HaarRandom) {
        if (input.features == nullptr || input.feature_count != t.config.feature_count())
            throw std::invalid_argument("feature vector length does not match template");
    }
    Statevector state = init_bell(t.config.n_bell, t.config.qubits_per_proc);
    run_template(t, params, input, state);
    // outcome index 2a + b: bit 0 is processor B's output qubit
    auto probs = marginal_probs(state, {t.output_qubits[1], t.output_qubits[0]});
    return {probs[0], probs[1], probs[2], probs[3]};
}

std::string CircuitTemplate::dump() const {
    std::ostringstream os;
    const char* emb = "feature_map";
    switch (config.embedding) {
        case Embedding::ChshOptimal: emb = "chsh_optimal"; break;
        case Embedding::ChshAlternative: emb = "chsh_alternative"; break;
        case Embedding::FeatureMap: emb = "feature_map"; break;
        case Embedding::HaarRandom: emb = "haar_random"; break;
    }
    os << "circuit qpp=" << config.qubits_per_proc << " n_bell=" << config.n_bell
       << " conv_depth=" << config.conv_depth
       << " second_stage_depth=" << config.second_stage_depth
       << " mixing_depth=" << config.mixing_depth
       << " mixing_scope=" << (config.mixing_scope == MixingScope::Global ? "global" : "local")
       << " embedding=" << emb << "\n";
    os << "params " << param_count << "\n";
    for (const Segment& s : segments)
        os << "segment " << s.name << " [" << s.begin << "," << s.end << ")\n";
    os << "output_qubits " << output_qubits[0] << " " << output_qubits[1] << "\n";
    os << "pooled_qubits";
    for (int q : pooled_qubits) os << " " << q;
    os << "\n";
    auto angle_str = [](const AngleBinding& b) -> std::string {
        std::ostringstream a;
        switch (b.kind) {
            case AngleBinding::Kind::Fixed: a << "fixed=" << b.fixed; break;
            case AngleBinding::Kind::Param: a << "p[" << b.param << "]"; break;
            case AngleBinding::Kind::FeatureRZ: a << "feat[" << b.feat_i << "]"; break;
            case AngleBinding::Kind::FeatureRZZ:
                a << "zz(feat[" << b.feat_i << "],feat[" << b.feat_j << "])";
                break;
            default: break;
        }
        return a.str();
    };
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const GateSpec& g = gates[i];
        os << "gate " << i << " ";
        switch (g.kind) {
            case GateKind::H: os << "H q" << g.q0; break;
            case GateKind::CZ: os << "CZ q" << g.q0 << " q" << g.q1; break;
            case GateKind::RX: os << "RX q" << g.q0 << " " << angle_str(g.angle); break;
            case GateKind::RZ: os << "RZ q" << g.q0 << " " << angle_str(g.angle); break;
            case GateKind::RZZ:
                os << "RZZ q" << g.q0 << " q" << g.q1 << " " << angle_str(g.angle);
                break;
            case GateKind::ControlledRX:
                os << "CRX ctrl q" << g.q0 << "=" << g.control_value << " tgt q" << g.q1 << " "
                   << angle_str(g.angle);
                break;
            case GateKind::ControlledRZ:
                os << "CRZ ctrl q" << g.q0 << "=" << g.control_value << " tgt q" << g.q1 << " "
                   << angle_str(g.angle);
                break;
            case GateKind::HaarBlock:
                os << "HAAR[" << g.block_index << "] q" << g.q0 << "..q" << g.q1;
                break;
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace dqml
