#include "mbias/synthetic.hpp"

#include "mbias/rng.hpp"

#include <algorithm>
#include <array>

namespace mbias::synthetic {

namespace {

const std::vector<std::string> kMarkers = {"slammed",  "radical", "disgraceful", "shameful", "outrageous",
                                           "extremist", "corrupt", "reckless",   "draconian", "absurd"};

const std::vector<std::string> kFiller = {
    "the",      "a",        "of",       "and",       "to",        "in",         "on",        "for",
    "with",     "by",       "from",     "about",     "after",     "before",     "during",    "over",
    "senator",  "governor", "mayor",    "president", "committee", "agency",     "court",     "council",
    "voters",   "officials", "lawmakers", "workers",  "students",  "residents",  "police",    "company",
    "bill",     "policy",   "plan",     "budget",    "report",    "proposal",   "law",       "vote",
    "election", "tax",      "border",   "health",    "care",      "climate",    "energy",    "housing",
    "school",   "market",   "trade",    "wages",     "jobs",      "prices",     "rates",     "funding",
    "said",     "announced", "approved", "proposed", "discussed", "released",   "reviewed",  "signed",
    "met",      "reported", "expects",  "plans",     "considers", "debated",    "passed",    "delayed",
    "new",      "local",    "federal",  "state",     "annual",    "public",     "final",     "early",
    "monday",   "tuesday",  "wednesday", "thursday", "friday",    "week",       "month",     "year",
    "city",     "county",   "district", "region",    "nation",    "capital",    "office",    "hearing"};

std::string sentence(Rng& rng, std::size_t min_len, std::size_t max_len, bool with_marker) {
    const auto len = min_len + static_cast<std::size_t>(uniform_index(rng, max_len - min_len + 1));
    std::vector<std::string> words;
    for (std::size_t i = 0; i < len; ++i) words.push_back(kFiller[uniform_index(rng, kFiller.size())]);
    if (with_marker) {
        const auto pos = static_cast<std::size_t>(uniform_index(rng, words.size() + 1));
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(pos), kMarkers[uniform_index(rng, kMarkers.size())]);
    }
    std::string text;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) text += ' ';
        text += words[i];
    }
    text[0] = static_cast<char>(text[0] - 'a' + 'A');
    return text + ".";
}

std::string numbered(const std::string& prefix, std::size_t i) {
    std::string n = std::to_string(i);
    return prefix + std::string(n.size() < 5 ? 5 - n.size() : 0, '0') + n;
}

}  // namespace

std::span<const std::string> marker_words() { return kMarkers; }
std::span<const std::string> filler_words() { return kFiller; }

std::vector<LabeledText> marker_corpus(const MarkerCorpusSpec& spec) {
    Rng rng(mix_seed(spec.seed, 501));
    std::vector<LabeledText> out;
    out.reserve(spec.n_items);
    for (std::size_t i = 0; i < spec.n_items; ++i) {
        const bool biased = uniform01(rng) < spec.biased_fraction;
        const bool marker = biased && uniform01(rng) < spec.marker_rate;
        auto text = sentence(rng, spec.min_length, spec.max_length, marker);
        int label = biased ? 1 : 0;
        if (uniform01(rng) < spec.label_noise) label = 1 - label;
        out.push_back({numbered(spec.id_prefix, i), std::move(text), label});
    }
    return out;
}

GoldStore gold_store(const GoldStoreSpec& spec) {
    const auto base = marker_corpus(spec.sentences);
    Rng rng(mix_seed(spec.sentences.seed, 502));
    std::vector<SentenceRecord> sentences;
    std::vector<RaterAnnotation> annotations;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const auto& item = base[i];
        sentences.push_back({item.id, item.text, spec.outlets[i % spec.outlets.size()],
                             spec.topics[i % spec.topics.size()], spec.source_set});
        const auto tokens = tokenize(item.text);
        const bool biased = item.label == 1;
        for (std::size_t r = 0; r < spec.n_raters; ++r) {
            RaterAnnotation a;
            a.rater_id = "rater" + std::to_string(r + 1);
            a.sentence_id = item.id;
            const bool votes_biased = (uniform01(rng) < spec.rater_accuracy) == biased;
            a.sentence_label = votes_biased ? SentenceLabel::Biased : SentenceLabel::NonBiased;
            const double u = uniform01(rng);
            const double lean = votes_biased ? 0.6 : 0.15;
            a.opinion_label = u < lean ? OpinionLabel::Opinionated
                              : u < lean + 0.25 ? OpinionLabel::Mixed
                                                : OpinionLabel::Factual;
            if (votes_biased) {
                for (const auto& t : tokens) {
                    const bool is_marker =
                        std::find(kMarkers.begin(), kMarkers.end(), t.surface) != kMarkers.end();
                    if (is_marker && uniform01(rng) < spec.mark_rate) a.biased_spans.push_back({t.start, t.end});
                }
                if (!tokens.empty() && uniform01(rng) < spec.stray_mark_rate) {
                    const auto& t = tokens[uniform_index(rng, tokens.size())];
                    a.biased_spans.push_back({t.start, t.end});
                }
            }
            annotations.push_back(std::move(a));
        }
    }
    return GoldStore::build(std::move(sentences), std::move(annotations));
}

std::vector<HeadlineRecord> headlines(const HeadlineSpec& spec) {
    Rng rng(mix_seed(spec.seed, 503));
    std::vector<HeadlineRecord> out;
    out.reserve(spec.n_headlines);
    for (std::size_t i = 0; i < spec.n_headlines; ++i) {
        const auto& outlet = spec.outlets[uniform_index(rng, spec.outlets.size())];
        const double rate = outlet.leaning == Leaning::Center ? spec.center_marker_rate : spec.marker_rate;
        const bool marker = uniform01(rng) < rate;
        out.push_back({numbered(spec.id_prefix, i), sentence(rng, 5, 10, marker), outlet.outlet});
    }
    return out;
}

}  // namespace mbias::synthetic
