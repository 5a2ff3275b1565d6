#include "mbias/distant.hpp"
#include "mbias/error.hpp"
#include "mbias/rng.hpp"
#include "mbias/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <tuple>

using namespace mbias;

namespace {

const std::vector<OutletLeaning> kLeanings = {
    {"left-daily", Leaning::Left}, {"right-herald", Leaning::Right}, {"wire", Leaning::Center}};

std::set<std::pair<std::string, WeakLabel>> content(const DistantBuild& b) {
    std::set<std::pair<std::string, WeakLabel>> out;
    for (const auto& r : b.records) out.emplace(normalize(r.text), r.weak_label);
    return out;
}

double jaccard(std::string_view a, std::string_view b) {
    std::set<std::string> sa, sb;
    for (const auto& t : tokenize(a)) sa.insert(t.surface);
    for (const auto& t : tokenize(b)) sb.insert(t.surface);
    std::size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

}  // namespace

TEST_SUITE("distant") {

TEST_CASE("partisan label mapping") {
    CHECK(weak_label_for(Leaning::Left) == WeakLabel::Biased);
    CHECK(weak_label_for(Leaning::Right) == WeakLabel::Biased);
    CHECK(weak_label_for(Leaning::Center) == WeakLabel::Neutral);
}

TEST_CASE("overlap with gold and repeated headlines are dropped") {
    const std::vector<HeadlineRecord> heads = {
        {"h1", "Senate passes the bill", "left-daily"},
        {"h2", "  THE radical plan  fails ", "wire"},
        {"h3", "Markets rally on Monday", "right-herald"},
        {"h4", "markets rally on monday", "right-herald"},
        {"h5", "Weather stays mild", "wire"},
    };
    const std::vector<SentenceRecord> gold = {{"g1", "The radical plan fails", "", "", SourceSet::SG1}};
    const auto b = build_corpus(heads, kLeanings, gold);
    CHECK(b.dropped_overlap == std::vector<std::string>{"h2"});
    CHECK(b.dropped_duplicate == std::vector<std::string>{"h4"});
    REQUIRE(b.records.size() == 3);
    CHECK(b.records[0] == WeakRecord{"h1", "Senate passes the bill", WeakLabel::Biased, "left-daily"});
    CHECK(b.records[2].weak_label == WeakLabel::Neutral);
    CHECK(b.raw.total == 5);
    CHECK(b.raw.by_label.at("Biased") == 3);

    std::set<std::string> gold_norm;
    for (const auto& g : gold) gold_norm.insert(normalize(g.text));
    for (const auto& r : b.records) CHECK(gold_norm.count(normalize(r.text)) == 0);
}

TEST_CASE("unknown outlets are listed in the error") {
    const std::vector<HeadlineRecord> heads = {{"h1", "a", "mystery"}, {"h2", "b", "left-daily"}, {"h3", "c", "other"}};
    CHECK_THROWS_WITH_AS(build_corpus(heads, kLeanings, {}), doctest::Contains("'mystery', 'other'"), DataError);
}

TEST_CASE("output is set-equal under input permutation") {
    std::vector<OutletLeaning> outlets = kLeanings;
    auto heads = synthetic::headlines({.n_headlines = 300, .outlets = outlets, .id_prefix = "h", .seed = 4});
    heads.push_back({"dup", heads[10].text, heads[10].outlet});
    const auto gold_src = synthetic::marker_corpus({.n_items = 20, .id_prefix = "g", .seed = 9});
    std::vector<SentenceRecord> gold;
    for (const auto& g : gold_src) gold.push_back({g.id, g.text, "", "", SourceSet::SG1});
    heads.push_back({"ov", gold[0].text, "wire"});

    const auto base = build_corpus(heads, kLeanings, gold);
    CHECK(base.records.size() <= heads.size());
    Rng rng(1);
    for (int rep = 0; rep < 5; ++rep) {
        auto shuffled = heads;
        shuffle(std::span(shuffled), rng);
        const auto other = build_corpus(shuffled, kLeanings, gold);
        CHECK(content(other) == content(base));
        CHECK(other.dropped_overlap == base.dropped_overlap);
    }
}

TEST_CASE("near-duplicate report matches an all-pairs scan") {
    const std::vector<SentenceRecord> gold = {
        {"g1", "one two three four five six seven eight nine ten", "", "", SourceSet::SG1},
        {"g2", "alpha beta gamma delta", "", "", SourceSet::SG1},
        {"g3", "red green blue", "", "", SourceSet::SG1},
    };
    const std::vector<HeadlineRecord> heads = {
        {"h1", "one two three four five six seven eight nine ten eleven", "wire"},  // 10/11
        {"h2", "one two three four five six seven eight nine", "wire"},             // 9/10
        {"h3", "alpha beta gamma epsilon", "wire"},                                  // 3/5
        {"h4", "red green blue blue", "wire"},                                       // 1.0, not exact
        {"h5", "unrelated words only", "wire"},
    };
    const auto b = build_corpus(heads, kLeanings, gold);
    std::vector<std::tuple<std::string, std::string>> expected;
    for (const auto& r : b.records)
        for (const auto& g : gold)
            if (jaccard(r.text, g.text) >= kNearDuplicateThreshold) expected.emplace_back(r.id, g.id);
    std::vector<std::tuple<std::string, std::string>> got;
    for (const auto& n : b.near_duplicates) got.emplace_back(n.headline_id, n.sentence_id);
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    CHECK(got == expected);
    CHECK(got.size() == 3);
    CHECK(b.records.size() == 5);  // reported, never dropped
}

TEST_CASE("corpus stats") {
    CHECK(corpus_stats({}).total == 0);
    CHECK(corpus_stats({}).by_label.at("Biased") == 0);
    std::vector<WeakRecord> rs;
    for (int i = 0; i < 3; ++i) rs.push_back({"b" + std::to_string(i), "t", WeakLabel::Biased, "x"});
    for (int i = 0; i < 2; ++i) rs.push_back({"n" + std::to_string(i), "t", WeakLabel::Neutral, "y"});
    const auto s = corpus_stats(rs);
    CHECK(s.by_label.at("Biased") == 3);
    CHECK(s.by_label.at("Neutral") == 2);
    CHECK(s.by_outlet.at("y").at("Neutral") == 2);
    CHECK(s.total == 5);
}

TEST_CASE("weak corpus serialization round-trips") {
    const std::vector<WeakRecord> rs = {{"a", "Text \"quoted\"", WeakLabel::Biased, "x"},
                                        {"b", "caf\xC3\xA9", WeakLabel::Neutral, "y"}};
    CHECK(parse_weak(serialize_weak(rs)) == rs);
    CHECK_THROWS_AS(parse_weak(R"({"id":"a","text":"t","weak_label":"Maybe","outlet":"x"})"), DataError);
}

}  // TEST_SUITE
