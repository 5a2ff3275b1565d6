#include "mbias/model.hpp"

#include "mbias/error.hpp"
#include "mbias/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace mbias {

std::string_view to_string(Encoder e) { return e == Encoder::MeanPool ? "mean" : "attention"; }

std::optional<Encoder> parse_encoder(std::string_view s) {
    if (s == "mean" || s == "MeanPool" || s == "meanpool") return Encoder::MeanPool;
    if (s == "attention" || s == "SelfAttention" || s == "selfattention") return Encoder::SelfAttention;
    return std::nullopt;
}

void TrainConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw DataError(std::string("invalid training config: ") + what);
    };
    require(batch_size >= 1, "batch_size must be >= 1");
    require(learning_rate > 0.0 && std::isfinite(learning_rate), "learning_rate must be > 0");
    require(beta1 >= 0.0 && beta1 < 1.0, "beta1 must be in [0, 1)");
    require(beta2 >= 0.0 && beta2 < 1.0, "beta2 must be in [0, 1)");
    require(epsilon > 0.0, "epsilon must be > 0");
    require(pretrain_epochs >= 0, "pretrain_epochs must be >= 0");
    require(max_finetune_epochs >= 1, "max_finetune_epochs must be >= 1");
    require(patience >= 1, "patience must be >= 1");
    require(embed_dim >= 1, "embed_dim must be >= 1");
    require(min_freq >= 1, "min_freq must be >= 1");
    require(validation_fraction > 0.0 && validation_fraction < 1.0, "validation_fraction must be in (0, 1)");
}

nlohmann::ordered_json to_json(const TrainConfig& cfg) {
    nlohmann::ordered_json obj;
    obj["batch_size"] = cfg.batch_size;
    obj["learning_rate"] = cfg.learning_rate;
    obj["beta1"] = cfg.beta1;
    obj["beta2"] = cfg.beta2;
    obj["epsilon"] = cfg.epsilon;
    obj["pretrain_epochs"] = cfg.pretrain_epochs;
    obj["max_finetune_epochs"] = cfg.max_finetune_epochs;
    obj["patience"] = cfg.patience;
    obj["encoder"] = to_string(cfg.encoder);
    obj["embed_dim"] = cfg.embed_dim;
    obj["seed"] = cfg.seed;
    obj["min_freq"] = cfg.min_freq;
    obj["validation_fraction"] = cfg.validation_fraction;
    return obj;
}

TrainConfig train_config_from_json(const nlohmann::json& obj) {
    TrainConfig cfg;
    try {
        for (const auto& [key, value] : obj.items()) {
            if (key == "batch_size") cfg.batch_size = value.get<int>();
            else if (key == "learning_rate") cfg.learning_rate = value.get<double>();
            else if (key == "beta1") cfg.beta1 = value.get<double>();
            else if (key == "beta2") cfg.beta2 = value.get<double>();
            else if (key == "epsilon") cfg.epsilon = value.get<double>();
            else if (key == "pretrain_epochs") cfg.pretrain_epochs = value.get<int>();
            else if (key == "max_finetune_epochs") cfg.max_finetune_epochs = value.get<int>();
            else if (key == "patience") cfg.patience = value.get<int>();
            else if (key == "embed_dim") cfg.embed_dim = value.get<int>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "min_freq") cfg.min_freq = value.get<int>();
            else if (key == "validation_fraction") cfg.validation_fraction = value.get<double>();
            else if (key == "encoder") {
                const auto e = parse_encoder(value.get<std::string>());
                if (!e) throw DataError("unknown encoder '" + value.get<std::string>() + "'");
                cfg.encoder = *e;
            } else {
                throw DataError("unknown training config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("training config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() : surfaces_{"<unk>", "<pad>"} {}

Vocabulary Vocabulary::build(std::span<const std::string> texts, int min_freq) {
    std::map<std::string, std::size_t> counts;
    for (const auto& text : texts) {
        for (auto& t : tokenize(text)) ++counts[std::move(t.surface)];
    }
    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [surface, n] : counts) {
        if (n >= static_cast<std::size_t>(min_freq)) kept.emplace_back(surface, n);
    }
    std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<std::string> surfaces = {"<unk>", "<pad>"};
    for (auto& [surface, n] : kept) surfaces.push_back(std::move(surface));
    return from_surfaces(std::move(surfaces));
}

Vocabulary Vocabulary::from_surfaces(std::vector<std::string> surfaces) {
    if (surfaces.size() < 2) throw DataError("vocabulary must contain the UNK and PAD entries");
    Vocabulary v;
    v.surfaces_ = std::move(surfaces);
    v.index_.clear();
    for (std::size_t i = 2; i < v.surfaces_.size(); ++i) {
        if (!v.index_.emplace(v.surfaces_[i], static_cast<int>(i)).second) {
            throw DataError("duplicate vocabulary entry '" + v.surfaces_[i] + "'");
        }
    }
    return v;
}

int Vocabulary::index_of(std::string_view surface) const {
    const auto it = index_.find(std::string(surface));
    return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::encode(std::string_view text) const {
    std::vector<int> ids;
    for (const auto& t : tokenize(text)) ids.push_back(index_of(t.surface));
    return ids;
}

// ---------------------------------------------------------------------------
// Parameters

ModelParams::ModelParams(std::size_t vocab_size, std::size_t dim)
    : vocab_(vocab_size), dim_(dim), data_((vocab_size + 3) * dim + kNumClasses, 0.0) {}

ModelParams ModelParams::initialize(std::size_t vocab_size, std::size_t dim, std::uint64_t seed) {
    ModelParams p(vocab_size, dim);
    Rng rng(mix_seed(seed, 1));
    for (auto& x : p.embeddings()) x = uniform(rng, -0.05, 0.05);
    return p;
}

std::string ModelParams::describe(std::size_t i) const {
    const auto d = dim_;
    if (i < vocab_ * d) return "embedding[" + std::to_string(i / d) + "][" + std::to_string(i % d) + "]";
    i -= vocab_ * d;
    if (i < d) return "query[" + std::to_string(i) + "]";
    i -= d;
    if (i < 2 * d) return "head_weight[" + std::to_string(i / d) + "][" + std::to_string(i % d) + "]";
    i -= 2 * d;
    return "head_bias[" + std::to_string(i) + "]";
}

bool ModelParams::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

struct Activations {
    std::vector<int> tokens;          // PAD-free (or just PAD for empty input)
    std::vector<double> attention;    // one weight per token
    std::vector<double> pooled;       // h
    std::array<double, kNumClasses> logits{};
    Probabilities probs{};
};

void check_shapes(std::span<const int> tokens, const ModelParams& p, const TrainConfig& cfg) {
    if (p.dim() != static_cast<std::size_t>(cfg.embed_dim)) {
        throw DataError("shape mismatch: parameters have dim " + std::to_string(p.dim()) + ", config expects " +
                        std::to_string(cfg.embed_dim));
    }
    if (p.vocab_size() < 2) throw DataError("shape mismatch: vocabulary lacks UNK/PAD rows");
    for (const int t : tokens) {
        if (t < 0 || static_cast<std::size_t>(t) >= p.vocab_size()) {
            throw DataError("shape mismatch: token index " + std::to_string(t) + " outside vocabulary of size " +
                            std::to_string(p.vocab_size()));
        }
    }
}

Activations run_forward(std::span<const int> input, const ModelParams& p, const TrainConfig& cfg) {
    check_shapes(input, p, cfg);
    Activations a;
    for (const int t : input) {
        if (t != Vocabulary::kPad) a.tokens.push_back(t);
    }
    if (a.tokens.empty()) a.tokens.push_back(Vocabulary::kPad);

    const std::size_t d = p.dim();
    const std::size_t n = a.tokens.size();
    a.attention.assign(n, 1.0 / static_cast<double>(n));
    if (cfg.encoder == Encoder::SelfAttention) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(d));
        const auto q = p.query();
        double max_score = -std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            const auto e = p.embedding(static_cast<std::size_t>(a.tokens[t]));
            a.attention[t] = std::inner_product(q.begin(), q.end(), e.begin(), 0.0) * scale;
            max_score = std::max(max_score, a.attention[t]);
        }
        double z = 0.0;
        for (auto& s : a.attention) {
            s = std::exp(s - max_score);
            z += s;
        }
        for (auto& s : a.attention) s /= z;
    }

    a.pooled.assign(d, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const auto e = p.embedding(static_cast<std::size_t>(a.tokens[t]));
        for (std::size_t j = 0; j < d; ++j) a.pooled[j] += a.attention[t] * e[j];
    }

    for (int k = 0; k < kNumClasses; ++k) {
        const auto w = p.head_row(k);
        a.logits[static_cast<std::size_t>(k)] =
            std::inner_product(w.begin(), w.end(), a.pooled.begin(), 0.0) + p.head_bias()[static_cast<std::size_t>(k)];
    }
    const double m = std::max(a.logits[0], a.logits[1]);
    const double e0 = std::exp(a.logits[0] - m);
    const double e1 = std::exp(a.logits[1] - m);
    a.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
    return a;
}

// -log softmax(z)[y], computed without forming the probability
double nll(const Activations& a, int label) {
    const double m = std::max(a.logits[0], a.logits[1]);
    const double lse = m + std::log(std::exp(a.logits[0] - m) + std::exp(a.logits[1] - m));
    return lse - a.logits[static_cast<std::size_t>(label)];
}

void check_label(int label) {
    if (label != 0 && label != 1) throw DataError("label must be 0 or 1, got " + std::to_string(label));
}

}  // namespace

Probabilities forward(std::span<const int> tokens, const ModelParams& p, const TrainConfig& cfg) {
    return run_forward(tokens, p, cfg).probs;
}

double loss(std::span<const LabeledSequence> batch, const ModelParams& p, const TrainConfig& cfg) {
    if (batch.empty()) throw DataError("loss: empty batch");
    double total = 0.0;
    for (const auto& seq : batch) {
        check_label(seq.label);
        total += nll(run_forward(seq.tokens, p, cfg), seq.label);
    }
    return total / static_cast<double>(batch.size());
}

LossAndGradients loss_and_gradients(std::span<const LabeledSequence> batch, const ModelParams& p,
                                    const TrainConfig& cfg) {
    if (batch.empty()) throw DataError("gradients: empty batch");
    const std::size_t d = p.dim();
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));

    LossAndGradients out{0.0, ModelParams(p.vocab_size(), d)};
    auto& g = out.gradients;
    std::vector<double> dh(d);
    std::vector<double> dscore;
    for (const auto& seq : batch) {
        check_label(seq.label);
        const auto a = run_forward(seq.tokens, p, cfg);
        out.loss += nll(a, seq.label);

        // d(-log p_y)/dz_k = p_k - [k == y]
        std::array<double, kNumClasses> dz{};
        for (int k = 0; k < kNumClasses; ++k) {
            dz[static_cast<std::size_t>(k)] = (a.probs[static_cast<std::size_t>(k)] - (k == seq.label ? 1.0 : 0.0)) * inv_n;
        }
        std::fill(dh.begin(), dh.end(), 0.0);
        for (int k = 0; k < kNumClasses; ++k) {
            const auto dzk = dz[static_cast<std::size_t>(k)];
            const auto w = p.head_row(k);
            auto gw = g.head_row(k);
            for (std::size_t j = 0; j < d; ++j) {
                gw[j] += dzk * a.pooled[j];
                dh[j] += dzk * w[j];
            }
            g.head_bias()[static_cast<std::size_t>(k)] += dzk;
        }

        const std::size_t n = a.tokens.size();
        if (cfg.encoder == Encoder::MeanPool) {
            for (std::size_t t = 0; t < n; ++t) {
                auto ge = g.embedding(static_cast<std::size_t>(a.tokens[t]));
                for (std::size_t j = 0; j < d; ++j) ge[j] += a.attention[t] * dh[j];
            }
            continue;
        }

        // h = sum_t a_t e_t with a = softmax(s), s_t = q.e_t / sqrt(d)
        dscore.assign(n, 0.0);
        double mean_g = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const auto e = p.embedding(static_cast<std::size_t>(a.tokens[t]));
            dscore[t] = std::inner_product(dh.begin(), dh.end(), e.begin(), 0.0);
            mean_g += a.attention[t] * dscore[t];
        }
        for (std::size_t t = 0; t < n; ++t) dscore[t] = a.attention[t] * (dscore[t] - mean_g);

        const auto q = p.query();
        auto gq = g.query();
        for (std::size_t t = 0; t < n; ++t) {
            const auto e = p.embedding(static_cast<std::size_t>(a.tokens[t]));
            auto ge = g.embedding(static_cast<std::size_t>(a.tokens[t]));
            for (std::size_t j = 0; j < d; ++j) {
                ge[j] += a.attention[t] * dh[j] + dscore[t] * q[j] * scale;
                gq[j] += dscore[t] * e[j] * scale;
            }
        }
    }
    out.loss *= inv_n;
    return out;
}

ModelParams gradients(std::span<const LabeledSequence> batch, const ModelParams& p, const TrainConfig& cfg) {
    return loss_and_gradients(batch, p, cfg).gradients;
}

void adam_step(ModelParams& p, const ModelParams& grads, AdamState& state, const TrainConfig& cfg) {
    const auto params = p.data();
    const auto g = grads.data();
    if (g.size() != params.size()) throw TrainingError("adam_step: gradient shape does not match parameters");
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i])) {
            std::ostringstream msg;
            msg << "non-finite gradient at " << p.describe(i) << " (value " << g[i] << ", step " << state.step + 1
                << ")";
            throw TrainingError(msg.str());
        }
    }
    if (state.first_moment.empty()) {
        state.first_moment.assign(params.size(), 0.0);
        state.second_moment.assign(params.size(), 0.0);
        state.step = 0;
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(cfg.beta1, t);
    const double correction2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& m = state.first_moment[i];
        auto& v = state.second_moment[i];
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * g[i];
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * g[i] * g[i];
        const double m_hat = m / correction1;
        const double v_hat = v / correction2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
    if (!p.all_finite()) throw TrainingError("parameters became non-finite at step " + std::to_string(state.step));
}

// ---------------------------------------------------------------------------
// Training

double train_epoch(std::span<const LabeledSequence> data, ModelParams& p, AdamState& state, const TrainConfig& cfg,
                   std::uint64_t shuffle_seed) {
    if (data.empty()) throw TrainingError("train_epoch: empty data");
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(shuffle_seed);
    shuffle(std::span(order), rng);

    const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
    std::vector<LabeledSequence> batch;
    double total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
        batch.clear();
        for (std::size_t i = start; i < std::min(order.size(), start + batch_size); ++i) batch.push_back(data[order[i]]);
        auto lg = loss_and_gradients(batch, p, cfg);
        adam_step(p, lg.gradients, state, cfg);
        total += lg.loss;
        ++batches;
    }
    return total / static_cast<double>(batches);
}

ModelParams pretrain(std::span<const LabeledSequence> weak, ModelParams init, const TrainConfig& cfg) {
    cfg.validate();
    if (weak.empty()) throw TrainingError("pretrain: empty weak corpus");
    AdamState state;
    for (int epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
        train_epoch(weak, init, state, cfg, mix_seed(cfg.seed, 100 + static_cast<std::uint64_t>(epoch)));
    }
    return init;
}

EarlyStoppingOutcome run_early_stopping(int max_epochs, int patience, const std::function<double(int)>& run_epoch,
                                        const std::function<void(int)>& snapshot) {
    if (max_epochs < 1) throw DataError("max_epochs must be >= 1");
    if (patience < 1) throw DataError("patience must be >= 1");
    EarlyStoppingOutcome out;
    out.best_loss = std::numeric_limits<double>::infinity();
    int since_best = 0;
    for (int epoch = 1; epoch <= max_epochs; ++epoch) {
        const double l = run_epoch(epoch);
        out.history.push_back(l);
        out.epochs_run = epoch;
        if (l < out.best_loss) {
            out.best_loss = l;
            out.best_epoch = epoch;
            since_best = 0;
            snapshot(epoch);
        } else if (++since_best >= patience) {
            break;
        }
    }
    return out;
}

FinetuneResult finetune(std::span<const LabeledSequence> train, std::span<const LabeledSequence> validation,
                        const ModelParams& init, const TrainConfig& cfg) {
    cfg.validate();
    if (train.empty()) throw TrainingError("finetune: empty training split");
    if (validation.empty()) throw TrainingError("finetune: empty validation split");
    ModelParams current = init;
    AdamState state;
    FinetuneResult result{init, {}};
    result.stopping = run_early_stopping(
        cfg.max_finetune_epochs, cfg.patience,
        [&](int epoch) {
            train_epoch(train, current, state, cfg, mix_seed(cfg.seed, 200 + static_cast<std::uint64_t>(epoch)));
            return loss(validation, current, cfg);
        },
        [&](int) { result.params = current; });
    return result;
}

Prediction predict(std::string_view text, const Vocabulary& vocab, const ModelParams& p, const TrainConfig& cfg) {
    const auto probs = forward(vocab.encode(text), p, cfg);
    Prediction out;
    out.p_biased = probs[1];
    out.label = probs[1] > 0.5 ? SentenceLabel::Biased : SentenceLabel::NonBiased;
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoints

nlohmann::ordered_json to_json(const Checkpoint& c) {
    nlohmann::ordered_json obj;
    obj["format"] = kCheckpointFormat;
    obj["config"] = to_json(c.config);
    obj["vocabulary"] = c.vocab.surfaces();
    obj["vocab_size"] = c.params.vocab_size();
    obj["dim"] = c.params.dim();
    obj["params"] = std::vector<double>(c.params.data().begin(), c.params.data().end());
    return obj;
}

Checkpoint checkpoint_from_json(const nlohmann::json& obj) {
    try {
        if (obj.at("format").get<std::string>() != kCheckpointFormat) {
            throw DataError("unsupported checkpoint format '" + obj.at("format").get<std::string>() + "'");
        }
        Checkpoint c;
        c.config = train_config_from_json(obj.at("config"));
        c.vocab = Vocabulary::from_surfaces(obj.at("vocabulary").get<std::vector<std::string>>());
        const auto vocab_size = obj.at("vocab_size").get<std::size_t>();
        const auto dim = obj.at("dim").get<std::size_t>();
        if (vocab_size != c.vocab.size()) throw DataError("checkpoint vocab_size does not match vocabulary");
        if (dim != static_cast<std::size_t>(c.config.embed_dim)) throw DataError("checkpoint dim does not match config");
        c.params = ModelParams(vocab_size, dim);
        const auto values = obj.at("params").get<std::vector<double>>();
        if (values.size() != c.params.data().size()) throw DataError("checkpoint parameter count mismatch");
        std::copy(values.begin(), values.end(), c.params.data().begin());
        if (!c.params.all_finite()) throw DataError("checkpoint contains non-finite parameters");
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << to_json(c).dump() << "\n";
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return checkpoint_from_json(obj);
}

}  // namespace mbias
