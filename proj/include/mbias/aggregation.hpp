#pragma once

#include "mbias/corpus.hpp"

#include <json.hpp>

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mbias {

enum class BiasVerdict { Biased, NonBiased, NoAgreement };
enum class OpinionVerdict { Opinionated, Factual, Mixed, NoAgreement };

std::string_view to_string(BiasVerdict v);
std::string_view to_string(OpinionVerdict v);
std::optional<BiasVerdict> parse_bias_verdict(std::string_view s);

struct GoldLabel {
    std::string sentence_id;
    BiasVerdict bias = BiasVerdict::NoAgreement;
    OpinionVerdict opinion = OpinionVerdict::NoAgreement;
    std::vector<Token> biased_words;  // in text order
    int n_raters = 0;

    bool operator==(const GoldLabel&) const = default;
};

struct DistributionReport {
    std::size_t n_sentences = 0;
    std::map<std::string, std::size_t> bias_counts;
    std::map<std::string, std::size_t> opinion_counts;
    std::map<std::string, double> bias_percent;
    std::map<std::string, double> opinion_percent;
    std::size_t total_biased_words = 0;
    /// Mean number of biased words over sentences whose verdict is Biased;
    /// 0 when there are none.
    double avg_biased_words_per_biased_sentence = 0.0;
};

/// Strict majority: a label wins with at least floor(n/2)+1 votes; an exact
/// tie (even n only) is NoAgreement. Throws DataError if votes.size() != n_raters.
BiasVerdict aggregate_bias(std::span<const SentenceLabel> votes, int n_raters);

/// Unique plurality label, NoAgreement when the top count is shared.
OpinionVerdict aggregate_opinion(std::span<const OpinionLabel> votes);

/// Tokens of `text` covered (on at least one code point) by the merged spans
/// of at least `threshold` distinct raters. All annotations must reference
/// the same sentence.
std::vector<Token> aggregate_words(std::string_view text, std::span<const RaterAnnotation> annotations,
                                   int threshold);

/// Word threshold used when none is configured: 2 for the extended
/// five-rater group, 3 otherwise.
int default_word_threshold(SourceSet set);

GoldLabel aggregate_sentence(const SentenceRecord& sentence, std::span<const RaterAnnotation> annotations,
                             int word_threshold);

/// Aggregates every sentence of the store. With no threshold given, each
/// sentence uses default_word_threshold(source_set). Sentences without
/// annotations are rejected.
std::vector<GoldLabel> aggregate_store(const GoldStore& store, std::optional<int> word_threshold = std::nullopt);

DistributionReport distribution(std::span<const GoldLabel> gold);

nlohmann::ordered_json to_json(const GoldLabel& label);
nlohmann::ordered_json to_json(const DistributionReport& report);

}  // namespace mbias
