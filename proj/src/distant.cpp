#include "mbias/distant.hpp"

#include "mbias/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace mbias {

std::string_view to_string(WeakLabel v) { return v == WeakLabel::Biased ? "Biased" : "Neutral"; }

std::optional<WeakLabel> parse_weak_label(std::string_view s) {
    if (s == "Biased") return WeakLabel::Biased;
    if (s == "Neutral") return WeakLabel::Neutral;
    return std::nullopt;
}

WeakLabel weak_label_for(Leaning leaning) {
    return leaning == Leaning::Center ? WeakLabel::Neutral : WeakLabel::Biased;
}

namespace {

std::vector<std::string> token_set(std::string_view text) {
    std::set<std::string> unique;
    for (auto& t : tokenize(text)) unique.insert(std::move(t.surface));
    return {unique.begin(), unique.end()};
}

// Prefix-filtered set-similarity join: a gold sentence B can only reach
// Jaccard(A, B) >= t if it shares one of the |A| - ceil(t|A|) + 1 rarest
// tokens of A.
class NearDuplicateIndex {
public:
    explicit NearDuplicateIndex(std::span<const SentenceRecord> gold) : gold_(gold) {
        sets_.reserve(gold.size());
        for (std::size_t i = 0; i < gold.size(); ++i) {
            sets_.push_back(token_set(gold[i].text));
            for (const auto& t : sets_.back()) postings_[t].push_back(i);
        }
    }

    void probe(const WeakRecord& r, double threshold, std::vector<NearDuplicate>& out) const {
        auto tokens = token_set(r.text);
        if (tokens.empty()) return;
        std::sort(tokens.begin(), tokens.end(), [&](const std::string& a, const std::string& b) {
            const auto fa = frequency(a), fb = frequency(b);
            return fa != fb ? fa < fb : a < b;
        });
        const auto size = static_cast<double>(tokens.size());
        const auto prefix = tokens.size() - static_cast<std::size_t>(std::ceil(threshold * size)) + 1;
        std::set<std::size_t> candidates;
        for (std::size_t i = 0; i < std::min(prefix, tokens.size()); ++i) {
            const auto it = postings_.find(tokens[i]);
            if (it != postings_.end()) candidates.insert(it->second.begin(), it->second.end());
        }
        std::sort(tokens.begin(), tokens.end());
        for (const auto c : candidates) {
            const auto& other = sets_[c];
            std::vector<std::string> common;
            std::set_intersection(tokens.begin(), tokens.end(), other.begin(), other.end(), std::back_inserter(common));
            const double inter = static_cast<double>(common.size());
            const double jac = inter / (size + static_cast<double>(other.size()) - inter);
            if (jac >= threshold) out.push_back({r.id, gold_[c].id, jac});
        }
    }

private:
    std::size_t frequency(const std::string& token) const {
        const auto it = postings_.find(token);
        return it == postings_.end() ? 0 : it->second.size();
    }

    std::span<const SentenceRecord> gold_;
    std::vector<std::vector<std::string>> sets_;
    std::unordered_map<std::string, std::vector<std::size_t>> postings_;
};

void count(WeakCorpusStats& s, const std::string& outlet, WeakLabel label) {
    const std::string key(to_string(label));
    ++s.by_label[key];
    ++s.by_outlet[outlet][key];
    ++s.total;
}

WeakCorpusStats empty_stats() {
    WeakCorpusStats s;
    s.by_label["Biased"] = 0;
    s.by_label["Neutral"] = 0;
    return s;
}

}  // namespace

DistantBuild build_corpus(std::span<const HeadlineRecord> headlines, std::span<const OutletLeaning> leanings,
                          std::span<const SentenceRecord> gold) {
    std::unordered_map<std::string, Leaning> leaning_of;
    for (const auto& l : leanings) leaning_of.emplace(l.outlet, l.leaning);

    std::set<std::string> unknown;
    for (const auto& h : headlines) {
        if (!leaning_of.count(h.outlet)) unknown.insert(h.outlet);
    }
    if (!unknown.empty()) {
        std::string list;
        for (const auto& o : unknown) list += (list.empty() ? "" : ", ") + ("'" + o + "'");
        throw DataError("unknown outlet(s) without a leaning entry: " + list);
    }

    std::unordered_set<std::string> gold_text;
    for (const auto& s : gold) gold_text.insert(normalize(s.text));

    DistantBuild build;
    build.raw = empty_stats();
    std::unordered_set<std::string> seen;
    for (const auto& h : headlines) {
        const auto label = weak_label_for(leaning_of.at(h.outlet));
        count(build.raw, h.outlet, label);
        auto key = normalize(h.text);
        if (gold_text.count(key)) {
            build.dropped_overlap.push_back(h.id);
        } else if (!seen.insert(std::move(key)).second) {
            build.dropped_duplicate.push_back(h.id);
        } else {
            build.records.push_back({h.id, h.text, label, h.outlet});
        }
    }

    if (!gold.empty()) {
        const NearDuplicateIndex index(gold);
        for (const auto& r : build.records) index.probe(r, kNearDuplicateThreshold, build.near_duplicates);
    }
    return build;
}

WeakCorpusStats corpus_stats(std::span<const WeakRecord> records) {
    auto s = empty_stats();
    for (const auto& r : records) count(s, r.outlet, r.weak_label);
    return s;
}

nlohmann::ordered_json to_json(const WeakRecord& r) {
    nlohmann::ordered_json obj;
    obj["id"] = r.id;
    obj["text"] = r.text;
    obj["weak_label"] = to_string(r.weak_label);
    obj["outlet"] = r.outlet;
    return obj;
}

nlohmann::ordered_json to_json(const WeakCorpusStats& s) {
    nlohmann::ordered_json obj;
    obj["total"] = s.total;
    obj["by_label"] = s.by_label;
    nlohmann::ordered_json outlets = nlohmann::ordered_json::object();
    for (const auto& [outlet, labels] : s.by_outlet) outlets[outlet] = labels;
    obj["by_outlet"] = std::move(outlets);
    return obj;
}

nlohmann::ordered_json to_json(const DistantBuild& b) {
    nlohmann::ordered_json obj;
    obj["raw"] = to_json(b.raw);
    obj["deduplicated"] = to_json(corpus_stats(b.records));
    obj["dropped_overlap"] = b.dropped_overlap;
    obj["dropped_duplicate"] = b.dropped_duplicate;
    nlohmann::ordered_json near = nlohmann::ordered_json::array();
    for (const auto& n : b.near_duplicates) {
        near.push_back({{"headline_id", n.headline_id}, {"sentence_id", n.sentence_id}, {"jaccard", n.jaccard}});
    }
    obj["near_duplicates"] = std::move(near);
    return obj;
}

std::string serialize_weak(std::span<const WeakRecord> records) {
    std::string out;
    for (const auto& r : records) out += to_json(r).dump() + "\n";
    return out;
}

std::vector<WeakRecord> parse_weak(std::string_view content) {
    std::vector<WeakRecord> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        auto nl = content.find('\n', pos);
        if (nl == std::string_view::npos) nl = content.size();
        const auto line = content.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        const auto where = "line " + std::to_string(line_no) + ": ";
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw DataError(where + e.what());
        }
        try {
            const auto label = parse_weak_label(obj.at("weak_label").get<std::string>());
            if (!label) throw DataError(where + "unknown weak_label");
            out.push_back({obj.at("id").get<std::string>(), obj.at("text").get<std::string>(), *label,
                           obj.value("outlet", std::string())});
        } catch (const nlohmann::json::exception& e) {
            throw DataError(where + e.what());
        }
    }
    return out;
}

std::vector<WeakRecord> load_weak(const std::filesystem::path& path) {
    try {
        return parse_weak(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace mbias
