#include "mbias/eval.hpp"

#include "mbias/error.hpp"
#include "mbias/rng.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

namespace mbias {

std::vector<std::size_t> FoldAssignment::test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] == fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldAssignment::train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] != fold) out.push_back(i);
    }
    return out;
}

namespace {

FoldAssignment deal(std::span<const int> labels, int k, std::uint64_t seed,
                    const std::function<bool(std::size_t, std::size_t)>* order) {
    if (k < 2) throw DataError("stratified_kfold: k must be >= 2");
    std::array<std::vector<std::size_t>, 2> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1) throw DataError("stratified_kfold: labels must be 0 or 1");
        members[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    for (int c = 0; c < 2; ++c) {
        if (members[static_cast<std::size_t>(c)].size() < static_cast<std::size_t>(k)) {
            throw DataError("stratified_kfold: class " + std::to_string(c) + " has " +
                            std::to_string(members[static_cast<std::size_t>(c)].size()) + " items, fewer than k = " +
                            std::to_string(k));
        }
    }

    FoldAssignment out;
    out.k = k;
    out.seed = seed;
    out.fold_of.assign(labels.size(), -1);
    std::size_t next = 0;
    for (std::size_t c = 0; c < 2; ++c) {
        auto& idx = members[c];
        if (order) std::sort(idx.begin(), idx.end(), *order);
        Rng rng(mix_seed(seed, 10 + c));
        shuffle(std::span(idx), rng);
        for (const auto i : idx) {
            out.fold_of[i] = static_cast<int>(next % static_cast<std::size_t>(k));
            ++next;
        }
    }
    return out;
}

}  // namespace

FoldAssignment stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed) {
    return deal(labels, k, seed, nullptr);
}

FoldAssignment stratified_kfold(std::span<const int> labels, std::span<const std::string> ids, int k,
                                std::uint64_t seed) {
    if (ids.size() != labels.size()) throw DataError("stratified_kfold: ids and labels differ in length");
    const std::function<bool(std::size_t, std::size_t)> by_id = [&](std::size_t a, std::size_t b) {
        return ids[a] < ids[b];
    };
    return deal(labels, k, seed, &by_id);
}

F1Scores f1(std::span<const int> predictions, std::span<const int> golds) {
    if (predictions.size() != golds.size()) {
        throw DataError("f1: " + std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(golds.size()) + " gold labels");
    }
    if (golds.empty()) throw DataError("f1: empty input");
    std::array<std::array<std::size_t, 2>, 2> confusion{};  // [gold][pred]
    for (std::size_t i = 0; i < golds.size(); ++i) {
        if ((golds[i] != 0 && golds[i] != 1) || (predictions[i] != 0 && predictions[i] != 1)) {
            throw DataError("f1: labels must be 0 or 1");
        }
        ++confusion[static_cast<std::size_t>(golds[i])][static_cast<std::size_t>(predictions[i])];
    }
    F1Scores s;
    for (std::size_t c = 0; c < 2; ++c) {
        const auto tp = static_cast<double>(confusion[c][c]);
        const auto predicted = static_cast<double>(confusion[0][c] + confusion[1][c]);
        const auto actual = static_cast<double>(confusion[c][0] + confusion[c][1]);
        const double precision = predicted > 0 ? tp / predicted : 0.0;
        const double recall = actual > 0 ? tp / actual : 0.0;
        s.per_class[c] = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        s.support[c] = confusion[c][0] + confusion[c][1];
    }
    s.macro = (s.per_class[0] + s.per_class[1]) / 2.0;
    const auto n = static_cast<double>(golds.size());
    s.weighted = (s.per_class[0] * static_cast<double>(s.support[0]) + s.per_class[1] * static_cast<double>(s.support[1])) / n;
    return s;
}

MeanStdErr mean_std_err(std::span<const double> values) {
    MeanStdErr out;
    if (values.empty()) return out;
    const auto n = static_cast<double>(values.size());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() < 2) return out;
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std_err = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return out;
}

CvReport cross_validate(std::span<const LabeledText> corpus, const Trainer& trainer, int k, std::uint64_t seed,
                        int workers) {
    std::vector<int> labels;
    std::vector<std::string> ids;
    for (const auto& item : corpus) {
        labels.push_back(item.label);
        ids.push_back(item.id);
    }
    const auto folds = stratified_kfold(labels, ids, k, seed);

    auto run_fold = [&](int fold) {
        auto by_id = [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; };
        auto train_idx = folds.train_indices(fold);
        auto test_idx = folds.test_indices(fold);
        std::sort(train_idx.begin(), train_idx.end(), by_id);
        std::sort(test_idx.begin(), test_idx.end(), by_id);
        std::vector<LabeledText> train, test;
        std::vector<int> gold;
        for (const auto i : train_idx) train.push_back(corpus[i]);
        for (const auto i : test_idx) {
            test.push_back(corpus[i]);
            gold.push_back(corpus[i].label);
        }
        FoldResult r;
        r.fold = fold;
        r.n_train = train.size();
        r.n_test = test.size();
        try {
            const auto preds = trainer(train, test, mix_seed(seed, 1000 + static_cast<std::uint64_t>(fold)));
            r.scores = f1(preds, gold);
        } catch (const std::exception& e) {
            throw TrainingError("fold " + std::to_string(fold) + ": " + e.what());
        }
        return r;
    };

    CvReport report;
    report.k = k;
    report.seed = seed;
    report.n_items = corpus.size();
    report.folds.resize(static_cast<std::size_t>(k));
    if (workers <= 1) {
        for (int f = 0; f < k; ++f) report.folds[static_cast<std::size_t>(f)] = run_fold(f);
    } else {
        for (int start = 0; start < k; start += workers) {
            std::vector<std::future<FoldResult>> pending;
            for (int f = start; f < std::min(k, start + workers); ++f) {
                pending.push_back(std::async(std::launch::async, run_fold, f));
            }
            for (auto& p : pending) {
                auto r = p.get();
                report.folds[static_cast<std::size_t>(r.fold)] = std::move(r);
            }
        }
    }

    std::vector<double> macro, weighted, c0, c1;
    for (const auto& f : report.folds) {
        macro.push_back(f.scores.macro);
        weighted.push_back(f.scores.weighted);
        c0.push_back(f.scores.per_class[0]);
        c1.push_back(f.scores.per_class[1]);
    }
    report.macro_f1 = mean_std_err(macro);
    report.weighted_f1 = mean_std_err(weighted);
    report.class_f1 = {mean_std_err(c0), mean_std_err(c1)};
    return report;
}

namespace {

nlohmann::ordered_json to_json(const MeanStdErr& m) {
    return nlohmann::ordered_json{{"mean", m.mean}, {"std_err", m.std_err}};
}

}  // namespace

nlohmann::ordered_json to_json(const F1Scores& s) {
    nlohmann::ordered_json obj;
    obj["macro_f1"] = s.macro;
    obj["weighted_f1"] = s.weighted;
    obj["f1_neutral"] = s.per_class[0];
    obj["f1_biased"] = s.per_class[1];
    obj["support_neutral"] = s.support[0];
    obj["support_biased"] = s.support[1];
    return obj;
}

nlohmann::ordered_json to_json(const CvReport& r) {
    nlohmann::ordered_json obj;
    obj["schema"] = kCvReportSchema;
    obj["k"] = r.k;
    obj["seed"] = r.seed;
    obj["n_items"] = r.n_items;
    obj["excluded_no_agreement"] = r.excluded_no_agreement;
    obj["macro_f1"] = to_json(r.macro_f1);
    obj["weighted_f1"] = to_json(r.weighted_f1);
    obj["f1_neutral"] = to_json(r.class_f1[0]);
    obj["f1_biased"] = to_json(r.class_f1[1]);
    nlohmann::ordered_json folds = nlohmann::ordered_json::array();
    for (const auto& f : r.folds) {
        auto fold = to_json(f.scores);
        fold["fold"] = f.fold;
        fold["n_train"] = f.n_train;
        fold["n_test"] = f.n_test;
        folds.push_back(std::move(fold));
    }
    obj["folds"] = std::move(folds);
    return obj;
}

}  // namespace mbias
