#pragma once

#include "mbias/corpus.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace mbias {

/// Items x raters grid of optional nominal labels. Labels are codes in
/// [0, alphabet size).
class ReliabilityMatrix {
public:
    ReliabilityMatrix(std::size_t items, std::size_t raters, std::vector<std::string> alphabet);

    std::size_t items() const { return items_; }
    std::size_t raters() const { return raters_; }
    const std::vector<std::string>& alphabet() const { return alphabet_; }

    void set(std::size_t item, std::size_t rater, std::optional<int> label);
    std::optional<int> at(std::size_t item, std::size_t rater) const { return cells_[item * raters_ + rater]; }

    /// Number of raters that labeled the item (m_u).
    std::size_t pairable_count(std::size_t item) const;

    /// Present labels of one item, in rater order.
    std::vector<int> values(std::size_t item) const;

private:
    std::size_t items_;
    std::size_t raters_;
    std::vector<std::string> alphabet_;
    std::vector<std::optional<int>> cells_;
};

enum class LabelKind { Bias, Opinion };

/// One item per sentence (store order), one column per rater (sorted by id),
/// using every raw vote.
ReliabilityMatrix reliability_from_gold(const GoldStore& store, LabelKind kind);

struct AgreementOptions {
    /// Report alpha = 1 instead of failing when expected disagreement is 0.
    bool degenerate_as_one = false;
};

struct AlphaResult {
    double alpha = 0.0;
    double n = 0.0;  // pairable values
    double observed_disagreement = 0.0;
    double expected_disagreement = 0.0;
    std::size_t items_used = 0;  // items with m_u >= 2
};

/// Nominal Krippendorff's alpha via the coincidence matrix. Throws
/// DataError when fewer than two pairable values exist and
/// UndefinedStatistic when all pairable values share one label (unless
/// options.degenerate_as_one).
AlphaResult krippendorff_alpha(const ReliabilityMatrix& m, AgreementOptions options = {});

/// Same statistic by direct enumeration of value pairs; used to check
/// krippendorff_alpha.
AlphaResult alpha_oracle(const ReliabilityMatrix& m, AgreementOptions options = {});

struct KappaResult {
    double kappa = 0.0;
    double mean_agreement = 0.0;    // P-bar
    double chance_agreement = 0.0;  // P_e
    std::size_t items = 0;
    std::size_t raters_per_item = 0;
};

/// Fleiss' kappa. Requires every item to carry the same number (>= 2) of
/// labels; missing cells are allowed as long as the counts match.
KappaResult fleiss_kappa(const ReliabilityMatrix& m, AgreementOptions options = {});

nlohmann::ordered_json to_json(const AlphaResult& r);
nlohmann::ordered_json to_json(const KappaResult& r);

}  // namespace mbias
