#include "mbias/aggregation.hpp"
#include "mbias/error.hpp"
#include "mbias/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace mbias;

namespace {

std::vector<SentenceLabel> votes(int biased, int non_biased) {
    std::vector<SentenceLabel> v(static_cast<std::size_t>(biased), SentenceLabel::Biased);
    v.insert(v.end(), static_cast<std::size_t>(non_biased), SentenceLabel::NonBiased);
    return v;
}

std::vector<OpinionLabel> opinions(int opinionated, int factual, int mixed) {
    std::vector<OpinionLabel> v(static_cast<std::size_t>(opinionated), OpinionLabel::Opinionated);
    v.insert(v.end(), static_cast<std::size_t>(factual), OpinionLabel::Factual);
    v.insert(v.end(), static_cast<std::size_t>(mixed), OpinionLabel::Mixed);
    return v;
}

RaterAnnotation ann(const std::string& rater, std::vector<Span> spans) {
    return {rater, "s", SentenceLabel::Biased, OpinionLabel::Factual, std::move(spans)};
}

// Character-level coverage oracle: a token counts a rater when any code
// point of the token lies inside one of that rater's spans.
std::vector<std::string> words_oracle(const std::string& ascii_text, const std::vector<RaterAnnotation>& anns,
                                      int threshold) {
    std::vector<std::set<std::string>> covered_by(ascii_text.size());
    for (const auto& a : anns)
        for (const auto& s : a.biased_spans)
            for (std::size_t i = s.start; i < s.end; ++i) covered_by[i].insert(a.rater_id);
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < ascii_text.size()) {
        if (ascii_text[i] == ' ') {
            ++i;
            continue;
        }
        std::size_t j = i;
        std::set<std::string> raters;
        while (j < ascii_text.size() && ascii_text[j] != ' ') raters.insert(covered_by[j].begin(), covered_by[j].end()), ++j;
        if (static_cast<int>(raters.size()) >= threshold) out.push_back(ascii_text.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<std::string> surfaces(const std::vector<Token>& toks) {
    std::vector<std::string> out;
    for (const auto& t : toks) out.push_back(t.surface);
    return out;
}

}  // namespace

TEST_SUITE("aggregation") {

TEST_CASE("majority vote examples") {
    CHECK(aggregate_bias(votes(6, 2), 8) == BiasVerdict::Biased);
    CHECK(aggregate_bias(votes(4, 4), 8) == BiasVerdict::NoAgreement);
    CHECK(aggregate_bias(votes(3, 2), 5) == BiasVerdict::Biased);
    CHECK(aggregate_bias(votes(2, 3), 5) == BiasVerdict::NonBiased);
    CHECK(aggregate_bias(votes(3, 5), 8) == BiasVerdict::NonBiased);
    CHECK_THROWS_AS(aggregate_bias(votes(3, 2), 8), DataError);
}

TEST_CASE("majority vote is permutation-invariant and monotone") {
    Rng rng(3);
    for (int n = 1; n <= 9; ++n) {
        for (int b = 0; b <= n; ++b) {
            auto v = votes(b, n - b);
            const auto base = aggregate_bias(v, n);
            for (int rep = 0; rep < 10; ++rep) {
                shuffle(std::span(v), rng);
                CHECK(aggregate_bias(v, n) == base);
            }
            if (n % 2 == 1) CHECK(base != BiasVerdict::NoAgreement);
            if (b < n && base == BiasVerdict::Biased) {
                // Flipping a NonBiased vote to Biased.
                CHECK(aggregate_bias(votes(b + 1, n - b - 1), n) == BiasVerdict::Biased);
            }
            if (b < n) CHECK_FALSE((base == BiasVerdict::Biased &&
                                    aggregate_bias(votes(b + 1, n - b - 1), n) == BiasVerdict::NonBiased));
        }
    }
}

TEST_CASE("opinion plurality") {
    CHECK(aggregate_opinion(opinions(1, 3, 1)) == OpinionVerdict::Factual);
    CHECK(aggregate_opinion(opinions(2, 2, 1)) == OpinionVerdict::NoAgreement);
    CHECK(aggregate_opinion(opinions(0, 0, 5)) == OpinionVerdict::Mixed);
    CHECK(aggregate_opinion(opinions(5, 0, 0)) == OpinionVerdict::Opinionated);
    CHECK_THROWS_AS(aggregate_opinion(opinions(0, 0, 0)), DataError);
}

TEST_CASE("word threshold counts distinct raters") {
    const std::string text = "the radical plan";  // radical = [4, 11)
    std::vector<RaterAnnotation> anns = {ann("r1", {{4, 11}}), ann("r2", {{5, 7}}), ann("r3", {{0, 11}})};
    for (int r = 4; r <= 8; ++r) anns.push_back(ann("r" + std::to_string(r), {}));
    CHECK(surfaces(aggregate_words(text, anns, 3)) == std::vector<std::string>{"radical"});
    CHECK(surfaces(aggregate_words(text, anns, 4)).empty());

    const std::vector<RaterAnnotation> single = {ann("r1", {{12, 16}}), ann("r2", {})};
    CHECK(surfaces(aggregate_words(text, single, 2)).empty());
    CHECK(surfaces(aggregate_words(text, single, 1)) == std::vector<std::string>{"plan"});

    auto mixed = anns;
    mixed[1].sentence_id = "other";
    CHECK_THROWS_AS(aggregate_words(text, mixed, 2), DataError);
    CHECK_THROWS_AS(aggregate_words(text, anns, 0), DataError);
}

TEST_CASE("5-rater fixture matches the per-token counting oracle") {
    const std::string text = "officials slammed the reckless and corrupt budget plan today";
    const std::vector<RaterAnnotation> anns = {
        ann("r1", {{10, 17}, {22, 30}}),  // slammed, reckless
        ann("r2", {{10, 30}}),            // slammed the reckless
        ann("r3", {{35, 42}}),            // corrupt
        ann("r4", {{12, 14}, {37, 49}}),  // inside slammed, corrupt budget
        ann("r5", {{22, 30}, {35, 42}}),  // reckless, corrupt
    };
    CHECK(surfaces(aggregate_words(text, anns, 2)) ==
          std::vector<std::string>{"slammed", "reckless", "corrupt"});
    CHECK(surfaces(aggregate_words(text, anns, 3)) ==
          std::vector<std::string>{"slammed", "reckless", "corrupt"});
    CHECK(surfaces(aggregate_words(text, anns, 4)).empty());
    CHECK(surfaces(aggregate_words(text, anns, 1)) ==
          std::vector<std::string>{"slammed", "the", "reckless", "corrupt", "budget"});
    for (int t = 1; t <= 6; ++t) CHECK(surfaces(aggregate_words(text, anns, t)) == words_oracle(text, anns, t));
}

TEST_CASE("random fixtures: oracle agreement and threshold monotonicity") {
    Rng rng(41);
    const std::vector<std::string> lexicon = {"aa", "bbb", "c", "dddd", "ee", "fff"};
    for (int trial = 0; trial < 300; ++trial) {
        std::string text;
        const auto n_words = 1 + uniform_index(rng, 10);
        for (std::size_t w = 0; w < n_words; ++w) {
            if (w) text += ' ';
            text += lexicon[uniform_index(rng, lexicon.size())];
        }
        const int n_raters = 1 + static_cast<int>(uniform_index(rng, 8));
        std::vector<RaterAnnotation> anns;
        for (int r = 0; r < n_raters; ++r) {
            std::vector<Span> spans;
            const auto n_spans = uniform_index(rng, 3);
            for (std::size_t s = 0; s < n_spans; ++s) {
                const auto a = uniform_index(rng, text.size());
                const auto b = a + 1 + uniform_index(rng, text.size() - a);
                spans.push_back({a, b});
            }
            anns.push_back(ann("r" + std::to_string(r), merge_spans(spans)));
        }
        std::vector<Token> prev;
        for (int t = 1; t <= n_raters + 1; ++t) {
            const auto words = aggregate_words(text, anns, t);
            CHECK(surfaces(words) == words_oracle(text, anns, t));
            if (t > 1) CHECK(std::includes(prev.begin(), prev.end(), words.begin(), words.end(),
                                           [](const Token& x, const Token& y) { return x.start < y.start; }));
            prev = words;
        }
    }
}

TEST_CASE("default thresholds per source set") {
    CHECK(default_word_threshold(SourceSet::SG1) == 3);
    CHECK(default_word_threshold(SourceSet::SG2_EXT) == 2);
}

TEST_CASE("distribution of a single biased sentence") {
    GoldLabel g;
    g.sentence_id = "s";
    g.bias = BiasVerdict::Biased;
    g.opinion = OpinionVerdict::Factual;
    g.biased_words = {{"a", 0, 1}, {"b", 2, 3}};
    g.n_raters = 5;
    const std::vector<GoldLabel> gold = {g};
    const auto d = distribution(gold);
    CHECK(d.bias_percent.at("Biased") == 100.0);
    CHECK(d.bias_percent.at("NoAgreement") == 0.0);
    CHECK(d.total_biased_words == 2);
    CHECK(d.avg_biased_words_per_biased_sentence == 2.0);
    CHECK_THROWS_AS(distribution(std::span<const GoldLabel>{}), DataError);
}

TEST_CASE("distribution averages words over Biased sentences") {
    std::vector<GoldLabel> gold(4);
    gold[0].bias = BiasVerdict::Biased;
    gold[0].biased_words = {{"a", 0, 1}};
    gold[1].bias = BiasVerdict::Biased;
    gold[1].biased_words = {{"a", 0, 1}, {"b", 2, 3}, {"c", 4, 5}};
    gold[2].bias = BiasVerdict::NonBiased;
    gold[3].bias = BiasVerdict::NoAgreement;
    const auto d = distribution(gold);
    CHECK(d.bias_counts.at("Biased") == 2);
    CHECK(d.bias_percent.at("NonBiased") == 25.0);
    CHECK(d.avg_biased_words_per_biased_sentence == 2.0);
    const auto j = to_json(d);
    CHECK(j["total_biased_words"] == 4);
}

TEST_CASE("aggregate_store uses per-set default thresholds") {
    const std::string text = "the radical plan";
    std::vector<SentenceRecord> sentences = {{"a", text, "", "", SourceSet::SG1}, {"b", text, "", "", SourceSet::SG2_EXT}};
    std::vector<RaterAnnotation> anns;
    for (const char* id : {"a", "b"}) {
        for (int r = 0; r < 5; ++r) {
            anns.push_back({"r" + std::to_string(r), id, r < 3 ? SentenceLabel::Biased : SentenceLabel::NonBiased,
                            OpinionLabel::Factual, r < 2 ? std::vector<Span>{{4, 11}} : std::vector<Span>{}});
        }
    }
    const auto store = GoldStore::build(sentences, anns);
    const auto labels = aggregate_store(store);
    REQUIRE(labels.size() == 2);
    CHECK(labels[0].bias == BiasVerdict::Biased);
    CHECK(labels[0].biased_words.empty());        // 2 raters < 3
    CHECK(labels[1].biased_words.size() == 1);    // 2 raters >= 2
    CHECK(aggregate_store(store, 1)[0].biased_words.size() == 1);
}

}  // TEST_SUITE
