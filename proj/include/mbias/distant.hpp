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

enum class WeakLabel { Biased, Neutral };

std::string_view to_string(WeakLabel v);
std::optional<WeakLabel> parse_weak_label(std::string_view s);

struct WeakRecord {
    std::string id;
    std::string text;
    WeakLabel weak_label = WeakLabel::Neutral;
    std::string outlet;

    bool operator==(const WeakRecord&) const = default;
};

/// Partisan (Left/Right) outlets give Biased, Center outlets Neutral.
WeakLabel weak_label_for(Leaning leaning);

struct NearDuplicate {
    std::string headline_id;
    std::string sentence_id;
    double jaccard = 0.0;
};

struct WeakCorpusStats {
    std::map<std::string, std::size_t> by_label;
    std::map<std::string, std::map<std::string, std::size_t>> by_outlet;
    std::size_t total = 0;
};

struct DistantBuild {
    std::vector<WeakRecord> records;
    /// Label counts of every headline before overlap removal and dedup.
    WeakCorpusStats raw;
    std::vector<std::string> dropped_overlap;    // headline ids matching a gold sentence
    std::vector<std::string> dropped_duplicate;  // repeated normalized text, later occurrences
    /// Kept headlines whose token set is close to a gold sentence
    /// (Jaccard >= near_duplicate_threshold). Informational only.
    std::vector<NearDuplicate> near_duplicates;
};

inline constexpr double kNearDuplicateThreshold = 0.9;

/// Labels headlines by outlet leaning, drops exact (normalized) overlaps
/// with the gold sentences and in-corpus duplicates (first occurrence
/// kept). Throws DataError listing every outlet without a leaning.
DistantBuild build_corpus(std::span<const HeadlineRecord> headlines, std::span<const OutletLeaning> leanings,
                          std::span<const SentenceRecord> gold);

WeakCorpusStats corpus_stats(std::span<const WeakRecord> records);

nlohmann::ordered_json to_json(const WeakRecord& r);
nlohmann::ordered_json to_json(const WeakCorpusStats& s);
nlohmann::ordered_json to_json(const DistantBuild& b);

std::string serialize_weak(std::span<const WeakRecord> records);
std::vector<WeakRecord> parse_weak(std::string_view content);
std::vector<WeakRecord> load_weak(const std::filesystem::path& path);

}  // namespace mbias
