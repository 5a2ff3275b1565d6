#pragma once

#include <json.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mbias {

struct FoldAssignment {
    int k = 0;
    std::uint64_t seed = 0;
    std::vector<int> fold_of;  // per item

    std::vector<std::size_t> test_indices(int fold) const;
    std::vector<std::size_t> train_indices(int fold) const;
};

/// Per class, a seeded shuffle dealt round-robin over the folds; the deal
/// continues across classes so fold sizes differ by at most one. Requires
/// k >= 2 and at least k items in each of the two classes.
FoldAssignment stratified_kfold(std::span<const int> labels, int k, std::uint64_t seed);

/// Same, but each class is sorted by item id before shuffling so the
/// assignment of an item does not depend on input order.
FoldAssignment stratified_kfold(std::span<const int> labels, std::span<const std::string> ids, int k,
                                std::uint64_t seed);

struct F1Scores {
    std::array<double, 2> per_class{};  // index = class label
    std::array<std::size_t, 2> support{};
    double macro = 0.0;
    double weighted = 0.0;
};

/// Binary F1 per class (0 when precision + recall is 0), their unweighted
/// mean and their support-weighted mean.
F1Scores f1(std::span<const int> predictions, std::span<const int> golds);

struct LabeledText {
    std::string id;
    std::string text;
    int label = 0;
};

/// Trains on `train` and returns one 0/1 prediction per `test` item.
using Trainer = std::function<std::vector<int>(std::span<const LabeledText> train, std::span<const LabeledText> test,
                                               std::uint64_t seed)>;

struct MeanStdErr {
    double mean = 0.0;
    double std_err = 0.0;  // sample standard deviation / sqrt(k)
};

MeanStdErr mean_std_err(std::span<const double> values);

struct FoldResult {
    int fold = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    F1Scores scores;
};

struct CvReport {
    int k = 0;
    std::uint64_t seed = 0;
    std::size_t n_items = 0;
    std::size_t excluded_no_agreement = 0;
    std::vector<FoldResult> folds;
    MeanStdErr macro_f1;
    MeanStdErr weighted_f1;
    std::array<MeanStdErr, 2> class_f1{};
};

inline constexpr const char* kCvReportSchema = "mbias.cv_report/1";

/// Stratified k-fold evaluation. Folds may run on `workers` threads; the
/// report is assembled in fold order and does not depend on the worker
/// count. Trainer failures are rethrown as TrainingError naming the fold.
CvReport cross_validate(std::span<const LabeledText> corpus, const Trainer& trainer, int k, std::uint64_t seed,
                        int workers = 1);

nlohmann::ordered_json to_json(const F1Scores& s);
nlohmann::ordered_json to_json(const CvReport& r);

}  // namespace mbias
