#include "mbias/experiment.hpp"

#include "mbias/error.hpp"
#include "mbias/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace mbias {

std::vector<LabeledText> labeled_gold(const GoldStore& store, std::span<const GoldLabel> labels,
                                      std::size_t* excluded) {
    std::vector<LabeledText> out;
    std::size_t skipped = 0;
    for (const auto& l : labels) {
        const auto* s = store.find(l.sentence_id);
        if (!s) throw DataError("gold label for unknown sentence '" + l.sentence_id + "'");
        if (l.bias == BiasVerdict::NoAgreement) {
            ++skipped;
            continue;
        }
        out.push_back({s->id, s->text, l.bias == BiasVerdict::Biased ? 1 : 0});
    }
    if (excluded) *excluded = skipped;
    return out;
}

std::vector<LabeledText> labeled_weak(std::span<const WeakRecord> records) {
    std::vector<LabeledText> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.id, r.text, r.weak_label == WeakLabel::Biased ? 1 : 0});
    return out;
}

ValidationSplit split_validation(std::span<const LabeledText> items, double fraction, std::uint64_t seed) {
    if (items.size() < 2) throw TrainingError("need at least two training items to hold out a validation split");
    std::array<std::vector<std::size_t>, 2> members;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (items[i].label != 0 && items[i].label != 1) throw DataError("labels must be 0 or 1");
        members[static_cast<std::size_t>(items[i].label)].push_back(i);
    }
    std::vector<bool> held_out(items.size(), false);
    std::size_t n_val = 0;
    for (std::size_t c = 0; c < 2; ++c) {
        auto& idx = members[c];
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return items[a].id < items[b].id; });
        Rng rng(mix_seed(seed, 20 + c));
        shuffle(std::span(idx), rng);
        const auto take = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(idx.size()) + 0.5));
        for (std::size_t i = 0; i < std::min(take, idx.size()); ++i) {
            held_out[idx[i]] = true;
            ++n_val;
        }
    }
    if (n_val == 0) {
        const auto& larger = members[0].size() >= members[1].size() ? members[0] : members[1];
        held_out[larger.front()] = true;
        ++n_val;
    }
    if (n_val == items.size()) throw TrainingError("validation split would leave no training items");
    ValidationSplit split;
    for (std::size_t i = 0; i < items.size(); ++i) {
        (held_out[i] ? split.validation : split.train).push_back(items[i]);
    }
    return split;
}

std::vector<LabeledSequence> encode(std::span<const LabeledText> items, const Vocabulary& vocab) {
    std::vector<LabeledSequence> out;
    out.reserve(items.size());
    for (const auto& item : items) out.push_back({vocab.encode(item.text), item.label});
    return out;
}

TrainedModel train_model(std::span<const LabeledText> train, std::span<const LabeledText> weak, TrainConfig cfg) {
    cfg.validate();
    std::vector<std::string> texts;
    texts.reserve(train.size() + weak.size());
    for (const auto& w : weak) texts.push_back(w.text);
    for (const auto& t : train) texts.push_back(t.text);

    TrainedModel out;
    out.checkpoint.config = cfg;
    out.checkpoint.vocab = Vocabulary::build(texts, cfg.min_freq);
    const auto& vocab = out.checkpoint.vocab;

    auto params = ModelParams::initialize(vocab.size(), static_cast<std::size_t>(cfg.embed_dim), cfg.seed);
    if (!weak.empty() && cfg.pretrain_epochs > 0) params = pretrain(encode(weak, vocab), std::move(params), cfg);

    const auto split = split_validation(train, cfg.validation_fraction, mix_seed(cfg.seed, 3));
    out.n_train = split.train.size();
    out.n_validation = split.validation.size();
    auto tuned = finetune(encode(split.train, vocab), encode(split.validation, vocab), params, cfg);
    out.checkpoint.params = std::move(tuned.params);
    out.stopping = std::move(tuned.stopping);
    return out;
}

Trainer make_neural_trainer(TrainConfig cfg, std::vector<LabeledText> weak) {
    return [cfg, weak = std::move(weak)](std::span<const LabeledText> train, std::span<const LabeledText> test,
                                         std::uint64_t seed) {
        auto fold_cfg = cfg;
        fold_cfg.seed = seed;
        const auto model = train_model(train, weak, fold_cfg);
        const auto& c = model.checkpoint;
        std::vector<int> preds;
        preds.reserve(test.size());
        for (const auto& item : test) {
            preds.push_back(predict(item.text, c.vocab, c.params, c.config).label == SentenceLabel::Biased ? 1 : 0);
        }
        return preds;
    };
}

Trainer make_baseline_trainer(LexiconSet lexicons) {
    return [lex = std::move(lexicons)](std::span<const LabeledText>, std::span<const LabeledText> test,
                                       std::uint64_t) {
        std::vector<int> preds;
        preds.reserve(test.size());
        for (const auto& item : test) {
            preds.push_back(classify_sentence(tokenize(item.text), lex) == SentenceLabel::Biased ? 1 : 0);
        }
        return preds;
    };
}

}  // namespace mbias
