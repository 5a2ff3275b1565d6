#include "mbias/aggregation.hpp"

#include "mbias/error.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace mbias {

std::string_view to_string(BiasVerdict v) {
    switch (v) {
        case BiasVerdict::Biased: return "Biased";
        case BiasVerdict::NonBiased: return "NonBiased";
        case BiasVerdict::NoAgreement: return "NoAgreement";
    }
    return "NoAgreement";
}

std::string_view to_string(OpinionVerdict v) {
    switch (v) {
        case OpinionVerdict::Opinionated: return "Opinionated";
        case OpinionVerdict::Factual: return "Factual";
        case OpinionVerdict::Mixed: return "Mixed";
        case OpinionVerdict::NoAgreement: return "NoAgreement";
    }
    return "NoAgreement";
}

std::optional<BiasVerdict> parse_bias_verdict(std::string_view s) {
    if (s == "Biased") return BiasVerdict::Biased;
    if (s == "NonBiased") return BiasVerdict::NonBiased;
    if (s == "NoAgreement") return BiasVerdict::NoAgreement;
    return std::nullopt;
}

BiasVerdict aggregate_bias(std::span<const SentenceLabel> votes, int n_raters) {
    if (n_raters < 1 || votes.size() != static_cast<std::size_t>(n_raters)) {
        throw DataError("aggregate_bias: got " + std::to_string(votes.size()) + " votes for " +
                        std::to_string(n_raters) + " raters");
    }
    const auto biased = std::count(votes.begin(), votes.end(), SentenceLabel::Biased);
    const auto majority = n_raters / 2 + 1;
    if (biased >= majority) return BiasVerdict::Biased;
    if (n_raters - biased >= majority) return BiasVerdict::NonBiased;
    return BiasVerdict::NoAgreement;
}

OpinionVerdict aggregate_opinion(std::span<const OpinionLabel> votes) {
    if (votes.empty()) throw DataError("aggregate_opinion: no votes");
    std::array<int, 3> counts{};
    for (const auto v : votes) ++counts[static_cast<std::size_t>(v)];
    const int top = *std::max_element(counts.begin(), counts.end());
    if (std::count(counts.begin(), counts.end(), top) > 1) return OpinionVerdict::NoAgreement;
    const auto winner = std::distance(counts.begin(), std::max_element(counts.begin(), counts.end()));
    return static_cast<OpinionVerdict>(winner);
}

std::vector<Token> aggregate_words(std::string_view text, std::span<const RaterAnnotation> annotations,
                                   int threshold) {
    if (threshold < 1) throw DataError("word threshold must be >= 1");
    if (annotations.empty()) return {};
    const auto& sentence_id = annotations.front().sentence_id;
    for (const auto& a : annotations) {
        if (a.sentence_id != sentence_id) {
            throw DataError("aggregate_words: annotations mix sentences '" + sentence_id + "' and '" +
                            a.sentence_id + "'");
        }
    }

    std::vector<Token> out;
    for (auto& token : tokenize(text)) {
        std::set<std::string_view> raters;
        for (const auto& a : annotations) {
            const bool covers = std::any_of(a.biased_spans.begin(), a.biased_spans.end(), [&](const Span& s) {
                return s.start < token.end && token.start < s.end;
            });
            if (covers) raters.insert(a.rater_id);
        }
        if (static_cast<int>(raters.size()) >= threshold) out.push_back(std::move(token));
    }
    return out;
}

int default_word_threshold(SourceSet set) {
    return set == SourceSet::SG2_EXT ? 2 : 3;
}

GoldLabel aggregate_sentence(const SentenceRecord& sentence, std::span<const RaterAnnotation> annotations,
                             int word_threshold) {
    if (annotations.empty()) throw DataError("sentence '" + sentence.id + "' has no annotations");
    std::vector<SentenceLabel> bias;
    std::vector<OpinionLabel> opinion;
    for (const auto& a : annotations) {
        bias.push_back(a.sentence_label);
        opinion.push_back(a.opinion_label);
    }
    GoldLabel label;
    label.sentence_id = sentence.id;
    label.n_raters = static_cast<int>(annotations.size());
    label.bias = aggregate_bias(bias, label.n_raters);
    label.opinion = aggregate_opinion(opinion);
    label.biased_words = aggregate_words(sentence.text, annotations, word_threshold);
    return label;
}

std::vector<GoldLabel> aggregate_store(const GoldStore& store, std::optional<int> word_threshold) {
    std::vector<GoldLabel> out;
    out.reserve(store.sentences().size());
    for (const auto& s : store.sentences()) {
        std::vector<RaterAnnotation> anns;
        for (const auto* a : store.annotations_for(s.id)) anns.push_back(*a);
        out.push_back(aggregate_sentence(s, anns, word_threshold.value_or(default_word_threshold(s.source_set))));
    }
    return out;
}

DistributionReport distribution(std::span<const GoldLabel> gold) {
    if (gold.empty()) throw DataError("distribution: no sentences");
    DistributionReport r;
    r.n_sentences = gold.size();
    for (const auto v : {BiasVerdict::Biased, BiasVerdict::NonBiased, BiasVerdict::NoAgreement}) {
        r.bias_counts[std::string(to_string(v))] = 0;
    }
    for (const auto v : {OpinionVerdict::Opinionated, OpinionVerdict::Factual, OpinionVerdict::Mixed,
                         OpinionVerdict::NoAgreement}) {
        r.opinion_counts[std::string(to_string(v))] = 0;
    }
    std::size_t biased_sentences = 0;
    std::size_t words_in_biased = 0;
    for (const auto& g : gold) {
        ++r.bias_counts[std::string(to_string(g.bias))];
        ++r.opinion_counts[std::string(to_string(g.opinion))];
        r.total_biased_words += g.biased_words.size();
        if (g.bias == BiasVerdict::Biased) {
            ++biased_sentences;
            words_in_biased += g.biased_words.size();
        }
    }
    const double n = static_cast<double>(gold.size());
    for (const auto& [k, c] : r.bias_counts) r.bias_percent[k] = 100.0 * static_cast<double>(c) / n;
    for (const auto& [k, c] : r.opinion_counts) r.opinion_percent[k] = 100.0 * static_cast<double>(c) / n;
    if (biased_sentences > 0) {
        r.avg_biased_words_per_biased_sentence =
            static_cast<double>(words_in_biased) / static_cast<double>(biased_sentences);
    }
    return r;
}

nlohmann::ordered_json to_json(const GoldLabel& label) {
    nlohmann::ordered_json words = nlohmann::ordered_json::array();
    for (const auto& t : label.biased_words) {
        words.push_back({{"surface", t.surface}, {"start", t.start}, {"end", t.end}});
    }
    nlohmann::ordered_json obj;
    obj["sentence_id"] = label.sentence_id;
    obj["bias"] = to_string(label.bias);
    obj["opinion"] = to_string(label.opinion);
    obj["biased_words"] = std::move(words);
    obj["n_raters"] = label.n_raters;
    return obj;
}

nlohmann::ordered_json to_json(const DistributionReport& report) {
    nlohmann::ordered_json obj;
    obj["n_sentences"] = report.n_sentences;
    obj["bias_counts"] = report.bias_counts;
    obj["bias_percent"] = report.bias_percent;
    obj["opinion_counts"] = report.opinion_counts;
    obj["opinion_percent"] = report.opinion_percent;
    obj["total_biased_words"] = report.total_biased_words;
    obj["avg_biased_words_per_biased_sentence"] = report.avg_biased_words_per_biased_sentence;
    return obj;
}

}  // namespace mbias
