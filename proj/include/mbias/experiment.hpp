#pragma once

#include "mbias/aggregation.hpp"
#include "mbias/baseline.hpp"
#include "mbias/distant.hpp"
#include "mbias/eval.hpp"
#include "mbias/model.hpp"

#include <span>
#include <vector>

namespace mbias {

/// Binary training items from aggregated labels (1 = Biased). Sentences
/// without agreement are skipped and counted in `excluded`.
std::vector<LabeledText> labeled_gold(const GoldStore& store, std::span<const GoldLabel> labels,
                                      std::size_t* excluded = nullptr);

std::vector<LabeledText> labeled_weak(std::span<const WeakRecord> records);

struct ValidationSplit {
    std::vector<LabeledText> train;
    std::vector<LabeledText> validation;
};

/// Per class, round(fraction * n) items (at least one overall) go to the
/// validation side after an id-keyed seeded shuffle.
ValidationSplit split_validation(std::span<const LabeledText> items, double fraction, std::uint64_t seed);

std::vector<LabeledSequence> encode(std::span<const LabeledText> items, const Vocabulary& vocab);

struct TrainedModel {
    Checkpoint checkpoint;
    EarlyStoppingOutcome stopping;
    std::size_t n_train = 0;
    std::size_t n_validation = 0;
};

/// Full two-stage procedure: vocabulary over weak + training text,
/// seeded initialization, optional pre-training on `weak` (skipped when
/// empty), then fine-tuning with early stopping on a held-out split.
TrainedModel train_model(std::span<const LabeledText> train, std::span<const LabeledText> weak, TrainConfig cfg);

/// Trainer for cross_validate; the fold seed replaces cfg.seed.
Trainer make_neural_trainer(TrainConfig cfg, std::vector<LabeledText> weak);

/// Lexicon rule; ignores the training split.
Trainer make_baseline_trainer(LexiconSet lexicons);

}  // namespace mbias
