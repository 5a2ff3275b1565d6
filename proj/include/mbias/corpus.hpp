#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mbias {

enum class SourceSet { SG1, SG2_EXT, MBIC, OTHER };
enum class SentenceLabel { Biased, NonBiased };
enum class OpinionLabel { Opinionated, Factual, Mixed };
enum class Leaning { Left, Center, Right };

std::string_view to_string(SourceSet v);
std::string_view to_string(SentenceLabel v);
std::string_view to_string(OpinionLabel v);
std::string_view to_string(Leaning v);

// Parsers accept the canonical spellings above plus a few common aliases
// ("biased"/"non-biased", "sg2", ...), case-insensitively.
std::optional<SourceSet> parse_source_set(std::string_view s);
std::optional<SentenceLabel> parse_sentence_label(std::string_view s);
std::optional<OpinionLabel> parse_opinion_label(std::string_view s);
std::optional<Leaning> parse_leaning(std::string_view s);

/// Half-open range of Unicode code point offsets into a text.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    bool operator==(const Span&) const = default;
    auto operator<=>(const Span&) const = default;
};

struct SentenceRecord {
    std::string id;
    std::string text;
    std::string outlet;
    std::string topic;
    SourceSet source_set = SourceSet::OTHER;

    bool operator==(const SentenceRecord&) const = default;
};

struct RaterAnnotation {
    std::string rater_id;
    std::string sentence_id;
    SentenceLabel sentence_label = SentenceLabel::NonBiased;
    OpinionLabel opinion_label = OpinionLabel::Factual;
    std::vector<Span> biased_spans;  // sorted, disjoint after ingestion

    bool operator==(const RaterAnnotation&) const = default;
};

struct HeadlineRecord {
    std::string id;
    std::string text;
    std::string outlet;

    bool operator==(const HeadlineRecord&) const = default;
};

struct OutletLeaning {
    std::string outlet;
    Leaning leaning = Leaning::Center;

    bool operator==(const OutletLeaning&) const = default;
};

/// A word of a text. Offsets are code point offsets into the original
/// (un-normalized) text; surface is the normalized form.
struct Token {
    std::string surface;
    std::size_t start = 0;
    std::size_t end = 0;

    bool operator==(const Token&) const = default;
};

// ---------------------------------------------------------------------------
// Text handling

/// Lowercase (Unicode case folding), NFC, whitespace runs collapsed to a
/// single space, trimmed. Idempotent.
std::string normalize(std::string_view text);

/// Maximal runs of letters/digits (with combining marks attached and
/// apostrophes kept between two word characters). Offsets refer to `text`.
std::vector<Token> tokenize(std::string_view text);

/// Number of code points in a UTF-8 string.
std::size_t codepoint_length(std::string_view text);

bool is_valid_utf8(std::string_view text);

/// Sorts spans and merges any that overlap (touching spans stay separate).
std::vector<Span> merge_spans(std::vector<Span> spans);

// ---------------------------------------------------------------------------
// Gold store

enum class GoldFormat { JSONL, CSV };

/// How `biased_spans` are encoded in an input file. Token-index spans are
/// half-open ranges over `tokenize(text)` and are converted to code point
/// offsets on load.
enum class SpanEncoding { CharOffsets, TokenIndices };

std::optional<GoldFormat> parse_gold_format(std::string_view s);
std::optional<SpanEncoding> parse_span_encoding(std::string_view s);

/// Sentences plus their per-rater annotations. Validated on construction
/// and immutable afterwards.
class GoldStore {
public:
    GoldStore() = default;

    /// Validates every invariant (unique ids, non-empty text, spans in
    /// bounds, one annotation per rater and sentence, no dangling sentence
    /// ids) and merges overlapping spans. Throws DataError.
    static GoldStore build(std::vector<SentenceRecord> sentences,
                           std::vector<RaterAnnotation> annotations);

    const std::vector<SentenceRecord>& sentences() const { return sentences_; }
    const std::vector<RaterAnnotation>& annotations() const { return annotations_; }

    const SentenceRecord* find(std::string_view sentence_id) const;

    /// Annotations of one sentence, in file order.
    std::vector<const RaterAnnotation*> annotations_for(std::string_view sentence_id) const;

    /// Keeps only sentences of one source set (and their annotations).
    GoldStore filter(SourceSet set) const;

    bool operator==(const GoldStore& other) const {
        return sentences_ == other.sentences_ && annotations_ == other.annotations_;
    }

private:
    std::vector<SentenceRecord> sentences_;
    std::vector<RaterAnnotation> annotations_;
    std::unordered_map<std::string, std::size_t> sentence_index_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_sentence_;
};

GoldStore parse_gold(std::string_view content, GoldFormat format,
                     SpanEncoding encoding = SpanEncoding::CharOffsets);
GoldStore load_gold(const std::filesystem::path& path, GoldFormat format,
                    SpanEncoding encoding = SpanEncoding::CharOffsets);
/// Picks the format from the file extension (.csv, otherwise JSONL).
GoldStore load_gold(const std::filesystem::path& path);

std::string serialize_gold(const GoldStore& store, GoldFormat format);
void write_gold(const GoldStore& store, const std::filesystem::path& path, GoldFormat format);

std::vector<HeadlineRecord> parse_headlines(std::string_view content);
std::vector<HeadlineRecord> load_headlines(const std::filesystem::path& path);

std::vector<OutletLeaning> parse_leanings(std::string_view content);
std::vector<OutletLeaning> load_leanings(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF. Each row
/// carries the 1-based line number it started on.
struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> fields;
};
std::vector<CsvRow> parse_csv(std::string_view content);
std::string csv_escape(std::string_view field);

}  // namespace mbias
