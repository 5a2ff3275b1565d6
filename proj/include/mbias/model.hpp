#pragma once

#include "mbias/corpus.hpp"

#include <json.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace mbias {

enum class Encoder { MeanPool, SelfAttention };

std::string_view to_string(Encoder e);
std::optional<Encoder> parse_encoder(std::string_view s);

struct TrainConfig {
    int batch_size = 64;
    double learning_rate = 5e-5;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int pretrain_epochs = 1;
    int max_finetune_epochs = 10;
    int patience = 2;
    Encoder encoder = Encoder::MeanPool;
    int embed_dim = 64;
    std::uint64_t seed = 0;
    int min_freq = 2;
    /// Share of the training data held out to monitor early stopping.
    double validation_fraction = 0.1;

    /// Throws DataError on out-of-range values.
    void validate() const;

    bool operator==(const TrainConfig&) const = default;
};

nlohmann::ordered_json to_json(const TrainConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
TrainConfig train_config_from_json(const nlohmann::json& obj);

class Vocabulary {
public:
    static constexpr int kUnk = 0;
    static constexpr int kPad = 1;

    Vocabulary();

    /// Surfaces with at least min_freq occurrences, ordered by descending
    /// frequency then lexicographically.
    static Vocabulary build(std::span<const std::string> texts, int min_freq);
    /// Rebuilds from an index-ordered surface list (first two entries are
    /// the reserved UNK and PAD).
    static Vocabulary from_surfaces(std::vector<std::string> surfaces);

    int index_of(std::string_view surface) const;
    std::vector<int> encode(std::string_view text) const;
    std::size_t size() const { return surfaces_.size(); }
    const std::vector<std::string>& surfaces() const { return surfaces_; }

    bool operator==(const Vocabulary& other) const { return surfaces_ == other.surfaces_; }

private:
    std::vector<std::string> surfaces_;
    std::unordered_map<std::string, int> index_;
};

struct LabeledSequence {
    std::vector<int> tokens;
    int label = 0;  // 0 neutral, 1 biased
};

inline constexpr int kNumClasses = 2;

/// All trainable parameters in one flat buffer:
/// embeddings (vocab x dim, row-major) | query (dim) | head weights
/// (2 x dim, row per class) | head bias (2).
class ModelParams {
public:
    ModelParams() = default;
    ModelParams(std::size_t vocab_size, std::size_t dim);

    /// Embeddings uniform in [-0.05, 0.05] from the seed; everything else 0.
    static ModelParams initialize(std::size_t vocab_size, std::size_t dim, std::uint64_t seed);

    std::size_t vocab_size() const { return vocab_; }
    std::size_t dim() const { return dim_; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    std::span<double> embedding(std::size_t token) { return data().subspan(token * dim_, dim_); }
    std::span<const double> embedding(std::size_t token) const { return data().subspan(token * dim_, dim_); }
    std::span<double> embeddings() { return data().first(vocab_ * dim_); }
    std::span<const double> embeddings() const { return data().first(vocab_ * dim_); }
    std::span<double> query() { return data().subspan(vocab_ * dim_, dim_); }
    std::span<const double> query() const { return data().subspan(vocab_ * dim_, dim_); }
    std::span<double> head_row(int cls) { return data().subspan((vocab_ + 1 + cls) * dim_, dim_); }
    std::span<const double> head_row(int cls) const { return data().subspan((vocab_ + 1 + cls) * dim_, dim_); }
    std::span<double> head_bias() { return data().subspan((vocab_ + 3) * dim_, kNumClasses); }
    std::span<const double> head_bias() const { return data().subspan((vocab_ + 3) * dim_, kNumClasses); }

    /// Name of the parameter group a flat index falls into, e.g.
    /// "embedding[12][3]"; used in diagnostics.
    std::string describe(std::size_t flat_index) const;

    bool all_finite() const;

    bool operator==(const ModelParams&) const = default;

private:
    std::size_t vocab_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

using Probabilities = std::array<double, kNumClasses>;

/// Class probabilities (neutral, biased). PAD tokens are ignored; a
/// sequence that is empty afterwards is encoded by the PAD embedding.
Probabilities forward(std::span<const int> tokens, const ModelParams& p, const TrainConfig& cfg);

/// Mean cross-entropy -log p(y) over the batch.
double loss(std::span<const LabeledSequence> batch, const ModelParams& p, const TrainConfig& cfg);

struct LossAndGradients {
    double loss = 0.0;
    ModelParams gradients;
};

/// Analytic gradients of `loss`, shaped like the parameters.
LossAndGradients loss_and_gradients(std::span<const LabeledSequence> batch, const ModelParams& p,
                                    const TrainConfig& cfg);
ModelParams gradients(std::span<const LabeledSequence> batch, const ModelParams& p, const TrainConfig& cfg);

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step = 0;
};

/// One bias-corrected Adam update. Throws TrainingError (naming the first
/// offending component) if the gradient is not finite.
void adam_step(ModelParams& p, const ModelParams& grads, AdamState& state, const TrainConfig& cfg);

/// One pass over `data` in a seeded shuffled order, in mini-batches.
/// Returns the mean training loss over batches.
double train_epoch(std::span<const LabeledSequence> data, ModelParams& p, AdamState& state, const TrainConfig& cfg,
                   std::uint64_t shuffle_seed);

/// cfg.pretrain_epochs passes over the weakly labeled data starting from
/// `init`. Zero epochs return `init` unchanged.
ModelParams pretrain(std::span<const LabeledSequence> weak, ModelParams init, const TrainConfig& cfg);

struct EarlyStoppingOutcome {
    int best_epoch = 0;  // 1-based
    int epochs_run = 0;
    double best_loss = 0.0;
    std::vector<double> history;
};

/// Generic epoch loop with patience. `run_epoch(epoch)` trains one epoch
/// and returns the monitored loss; `snapshot(epoch)` is called whenever
/// that loss improves on the best so far. Stops after `patience`
/// consecutive epochs without improvement or after max_epochs.
EarlyStoppingOutcome run_early_stopping(int max_epochs, int patience, const std::function<double(int)>& run_epoch,
                                        const std::function<void(int)>& snapshot);

struct FinetuneResult {
    ModelParams params;  // snapshot of the best validation epoch
    EarlyStoppingOutcome stopping;
};

FinetuneResult finetune(std::span<const LabeledSequence> train, std::span<const LabeledSequence> validation,
                        const ModelParams& init, const TrainConfig& cfg);

struct Prediction {
    SentenceLabel label = SentenceLabel::NonBiased;
    double p_biased = 0.5;
};

/// Biased iff p(biased) > 0.5.
Prediction predict(std::string_view text, const Vocabulary& vocab, const ModelParams& p, const TrainConfig& cfg);

struct Checkpoint {
    TrainConfig config;
    Vocabulary vocab;
    ModelParams params;

    bool operator==(const Checkpoint&) const = default;
};

inline constexpr const char* kCheckpointFormat = "mbias.checkpoint/1";

nlohmann::ordered_json to_json(const Checkpoint& c);
Checkpoint checkpoint_from_json(const nlohmann::json& obj);
void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mbias
