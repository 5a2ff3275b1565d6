#include "mbias/corpus.hpp"

#include "mbias/error.hpp"
#include "text_internal.hpp"

#include <json.hpp>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace mbias {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    // "non-biased", "non_biased" and "nonbiased" compare equal
    std::erase_if(out, [](char c) { return c == '-' || c == '_' || c == ' '; });
    return out;
}

const icu::Normalizer2& nfc() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
    return *n;
}

const icu::Normalizer2& nfd() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFDInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFD normalizer unavailable");
    return *n;
}

bool is_word_char(UChar32 c) { return u_isalnum(c) != 0; }
bool is_mark(UChar32 c) { return (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0; }
bool is_apostrophe(UChar32 c) { return c == 0x27 || c == 0x2019; }

}  // namespace

namespace detail {

std::vector<CodePoint> decode_utf8(std::string_view text) {
    std::vector<CodePoint> out;
    out.reserve(text.size());
    const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
    const auto length = static_cast<std::int32_t>(text.size());
    std::int32_t i = 0;
    while (i < length) {
        const std::int32_t begin = i;
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c < 0) c = 0xFFFD;
        out.push_back({static_cast<char32_t>(c), static_cast<std::size_t>(begin)});
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Enum names

std::string_view to_string(SourceSet v) {
    switch (v) {
        case SourceSet::SG1: return "SG1";
        case SourceSet::SG2_EXT: return "SG2_EXT";
        case SourceSet::MBIC: return "MBIC";
        case SourceSet::OTHER: return "OTHER";
    }
    return "OTHER";
}

std::string_view to_string(SentenceLabel v) {
    return v == SentenceLabel::Biased ? "Biased" : "NonBiased";
}

std::string_view to_string(OpinionLabel v) {
    switch (v) {
        case OpinionLabel::Opinionated: return "Opinionated";
        case OpinionLabel::Factual: return "Factual";
        case OpinionLabel::Mixed: return "Mixed";
    }
    return "Mixed";
}

std::string_view to_string(Leaning v) {
    switch (v) {
        case Leaning::Left: return "Left";
        case Leaning::Center: return "Center";
        case Leaning::Right: return "Right";
    }
    return "Center";
}

std::optional<SourceSet> parse_source_set(std::string_view s) {
    const auto k = lower_ascii(s);
    if (k == "sg1") return SourceSet::SG1;
    if (k == "sg2ext" || k == "sg2") return SourceSet::SG2_EXT;
    if (k == "mbic") return SourceSet::MBIC;
    if (k == "other") return SourceSet::OTHER;
    return std::nullopt;
}

std::optional<SentenceLabel> parse_sentence_label(std::string_view s) {
    const auto k = lower_ascii(s);
    if (k == "biased") return SentenceLabel::Biased;
    if (k == "nonbiased" || k == "notbiased" || k == "neutral") return SentenceLabel::NonBiased;
    return std::nullopt;
}

std::optional<OpinionLabel> parse_opinion_label(std::string_view s) {
    const auto k = lower_ascii(s);
    if (k == "opinionated" || k == "expressesawriter'sopinion") return OpinionLabel::Opinionated;
    if (k == "factual" || k == "entirelyfactual") return OpinionLabel::Factual;
    if (k == "mixed" || k == "somewhatfactualbutalsoopinionated") return OpinionLabel::Mixed;
    return std::nullopt;
}

std::optional<Leaning> parse_leaning(std::string_view s) {
    const auto k = lower_ascii(s);
    if (k == "left") return Leaning::Left;
    if (k == "center" || k == "centre") return Leaning::Center;
    if (k == "right") return Leaning::Right;
    return std::nullopt;
}

std::optional<GoldFormat> parse_gold_format(std::string_view s) {
    const auto k = lower_ascii(s);
    if (k == "jsonl") return GoldFormat::JSONL;
    if (k == "csv") return GoldFormat::CSV;
    return std::nullopt;
}

std::optional<SpanEncoding> parse_span_encoding(std::string_view s) {
    const auto k = lower_ascii(s);
    if (k == "offsets" || k == "chars" || k == "charoffsets") return SpanEncoding::CharOffsets;
    if (k == "tokens" || k == "tokenindices") return SpanEncoding::TokenIndices;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Text handling

std::string normalize(std::string_view text) {
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString us = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
    us = nfd().normalize(us, status);
    us.foldCase();
    us = nfc().normalize(us, status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");

    icu::UnicodeString collapsed;
    bool pending_space = false;
    for (std::int32_t i = 0; i < us.length();) {
        const UChar32 c = us.char32At(i);
        i += U16_LENGTH(c);
        if (u_isUWhiteSpace(c)) {
            pending_space = !collapsed.isEmpty();
            continue;
        }
        if (pending_space) {
            collapsed.append(static_cast<UChar>(u' '));
            pending_space = false;
        }
        collapsed.append(c);
    }
    std::string out;
    collapsed.toUTF8String(out);
    return out;
}

std::vector<Token> tokenize(std::string_view text) {
    const auto cps = detail::decode_utf8(text);
    std::vector<Token> tokens;
    const std::size_t n = cps.size();
    std::size_t i = 0;
    while (i < n) {
        if (!is_word_char(cps[i].value)) {
            ++i;
            continue;
        }
        const std::size_t begin = i;
        ++i;
        while (i < n) {
            const char32_t c = cps[i].value;
            if (is_word_char(c) || is_mark(c)) {
                ++i;
            } else if (is_apostrophe(c) && i + 1 < n && is_word_char(cps[i + 1].value)) {
                i += 2;
            } else {
                break;
            }
        }
        const std::size_t byte_begin = cps[begin].byte_offset;
        const std::size_t byte_end = i < n ? cps[i].byte_offset : text.size();
        tokens.push_back({normalize(text.substr(byte_begin, byte_end - byte_begin)), begin, i});
    }
    return tokens;
}

std::size_t codepoint_length(std::string_view text) {
    return detail::decode_utf8(text).size();
}

bool is_valid_utf8(std::string_view text) {
    const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
    const auto length = static_cast<std::int32_t>(text.size());
    std::int32_t i = 0;
    while (i < length) {
        UChar32 c;
        U8_NEXT(s, i, length, c);
        if (c < 0) return false;
    }
    return true;
}

std::vector<Span> merge_spans(std::vector<Span> spans) {
    std::sort(spans.begin(), spans.end());
    std::vector<Span> merged;
    for (const auto& s : spans) {
        if (!merged.empty() && s.start < merged.back().end) {
            merged.back().end = std::max(merged.back().end, s.end);
        } else {
            merged.push_back(s);
        }
    }
    return merged;
}

// ---------------------------------------------------------------------------
// GoldStore

GoldStore GoldStore::build(std::vector<SentenceRecord> sentences,
                           std::vector<RaterAnnotation> annotations) {
    GoldStore store;
    std::vector<std::size_t> lengths;
    lengths.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const auto& s = sentences[i];
        if (s.id.empty()) throw DataError("sentence with empty id");
        if (!is_valid_utf8(s.text)) throw DataError("sentence '" + s.id + "': text is not valid UTF-8");
        if (normalize(s.text).empty()) throw DataError("sentence '" + s.id + "': empty text");
        if (!store.sentence_index_.emplace(s.id, i).second) {
            throw DataError("duplicate sentence id '" + s.id + "'");
        }
        lengths.push_back(codepoint_length(s.text));
    }

    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        auto& a = annotations[i];
        const std::string who = "annotation (rater '" + a.rater_id + "', sentence '" + a.sentence_id + "')";
        const auto it = store.sentence_index_.find(a.sentence_id);
        if (it == store.sentence_index_.end()) {
            throw DataError(who + ": unknown sentence id");
        }
        if (!seen.emplace(a.rater_id, a.sentence_id).second) {
            throw DataError("duplicate " + who);
        }
        const std::size_t len = lengths[it->second];
        for (const auto& span : a.biased_spans) {
            if (span.start >= span.end || span.end > len) {
                throw DataError(who + ": span [" + std::to_string(span.start) + ", " +
                                std::to_string(span.end) + ") out of bounds for text of length " +
                                std::to_string(len));
            }
        }
        a.biased_spans = merge_spans(std::move(a.biased_spans));
        store.by_sentence_[a.sentence_id].push_back(i);
    }

    store.sentences_ = std::move(sentences);
    store.annotations_ = std::move(annotations);
    return store;
}

const SentenceRecord* GoldStore::find(std::string_view sentence_id) const {
    const auto it = sentence_index_.find(std::string(sentence_id));
    return it == sentence_index_.end() ? nullptr : &sentences_[it->second];
}

std::vector<const RaterAnnotation*> GoldStore::annotations_for(std::string_view sentence_id) const {
    std::vector<const RaterAnnotation*> out;
    const auto it = by_sentence_.find(std::string(sentence_id));
    if (it == by_sentence_.end()) return out;
    out.reserve(it->second.size());
    for (const auto idx : it->second) out.push_back(&annotations_[idx]);
    return out;
}

GoldStore GoldStore::filter(SourceSet set) const {
    std::vector<SentenceRecord> sentences;
    std::set<std::string> keep;
    for (const auto& s : sentences_) {
        if (s.source_set == set) {
            sentences.push_back(s);
            keep.insert(s.id);
        }
    }
    std::vector<RaterAnnotation> annotations;
    for (const auto& a : annotations_) {
        if (keep.count(a.sentence_id)) annotations.push_back(a);
    }
    return build(std::move(sentences), std::move(annotations));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct RawAnnotation {
    RaterAnnotation annotation;
    std::size_t line = 0;
};

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
    throw DataError("line " + std::to_string(line) + ": " + what);
}

std::string require_string(const nlohmann::json& obj, const char* key, std::size_t line) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) fail_at(line, std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

std::vector<Span> parse_spans(const nlohmann::json& value, std::size_t line) {
    if (value.is_null()) return {};
    if (!value.is_array()) fail_at(line, "biased_spans must be an array of [start, end] pairs");
    std::vector<Span> spans;
    for (const auto& pair : value) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
            !pair[1].is_number_unsigned()) {
            fail_at(line, "biased_spans entries must be [start, end] with non-negative integers");
        }
        spans.push_back({pair[0].get<std::size_t>(), pair[1].get<std::size_t>()});
    }
    return spans;
}

SentenceRecord sentence_from(const nlohmann::json& obj, std::size_t line) {
    SentenceRecord s;
    s.id = require_string(obj, "id", line);
    s.text = require_string(obj, "text", line);
    s.outlet = obj.contains("outlet") && obj["outlet"].is_string() ? obj["outlet"].get<std::string>() : "";
    s.topic = obj.contains("topic") && obj["topic"].is_string() ? obj["topic"].get<std::string>() : "";
    const auto set = obj.contains("source_set") && obj["source_set"].is_string()
                         ? obj["source_set"].get<std::string>()
                         : std::string("OTHER");
    const auto parsed = parse_source_set(set);
    if (!parsed) fail_at(line, "unknown source_set '" + set + "'");
    s.source_set = *parsed;
    return s;
}

RawAnnotation annotation_from(const nlohmann::json& obj, std::size_t line) {
    RawAnnotation raw;
    raw.line = line;
    auto& a = raw.annotation;
    a.rater_id = require_string(obj, "rater_id", line);
    a.sentence_id = require_string(obj, "sentence_id", line);
    const auto bias = require_string(obj, "sentence_label", line);
    const auto op = require_string(obj, "opinion_label", line);
    const auto b = parse_sentence_label(bias);
    if (!b) fail_at(line, "unknown sentence_label '" + bias + "'");
    const auto o = parse_opinion_label(op);
    if (!o) fail_at(line, "unknown opinion_label '" + op + "'");
    a.sentence_label = *b;
    a.opinion_label = *o;
    if (obj.contains("biased_spans")) a.biased_spans = parse_spans(obj["biased_spans"], line);
    return raw;
}

void convert_token_spans(std::vector<SentenceRecord>& sentences, std::vector<RawAnnotation>& annotations) {
    std::unordered_map<std::string, std::vector<Token>> tokens;
    for (const auto& s : sentences) tokens.emplace(s.id, tokenize(s.text));
    for (auto& raw : annotations) {
        auto& a = raw.annotation;
        const auto it = tokens.find(a.sentence_id);
        if (it == tokens.end()) continue;  // dangling id, reported by GoldStore::build
        const auto& toks = it->second;
        for (auto& span : a.biased_spans) {
            if (span.start >= span.end || span.end > toks.size()) {
                fail_at(raw.line, "annotation (rater '" + a.rater_id + "', sentence '" + a.sentence_id +
                                      "'): token span [" + std::to_string(span.start) + ", " +
                                      std::to_string(span.end) + ") out of bounds for " +
                                      std::to_string(toks.size()) + " tokens");
            }
            span = {toks[span.start].start, toks[span.end - 1].end};
        }
    }
}

GoldStore finish(std::vector<SentenceRecord> sentences, std::vector<RawAnnotation> raw, SpanEncoding encoding) {
    if (encoding == SpanEncoding::TokenIndices) convert_token_spans(sentences, raw);
    std::vector<RaterAnnotation> annotations;
    annotations.reserve(raw.size());
    for (auto& r : raw) annotations.push_back(std::move(r.annotation));
    return GoldStore::build(std::move(sentences), std::move(annotations));
}

template <typename F>
void for_each_line(std::string_view content, F&& f) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        const auto nl = content.find('\n', pos);
        const auto end = nl == std::string_view::npos ? content.size() : nl;
        auto line = content.substr(pos, end - pos);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") != std::string_view::npos) f(line_no, line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
}

nlohmann::json parse_json_line(std::string_view line, std::size_t line_no) {
    try {
        auto obj = nlohmann::json::parse(line);
        if (!obj.is_object()) fail_at(line_no, "expected a JSON object");
        return obj;
    } catch (const nlohmann::json::parse_error& e) {
        fail_at(line_no, std::string("JSON parse error: ") + e.what());
    }
}

GoldStore parse_gold_jsonl(std::string_view content, SpanEncoding encoding) {
    std::vector<SentenceRecord> sentences;
    std::vector<RawAnnotation> annotations;
    for_each_line(content, [&](std::size_t line_no, std::string_view line) {
        const auto obj = parse_json_line(line, line_no);
        const auto kind = require_string(obj, "kind", line_no);
        if (kind == "sentence") {
            sentences.push_back(sentence_from(obj, line_no));
        } else if (kind == "annotation") {
            annotations.push_back(annotation_from(obj, line_no));
        } else {
            fail_at(line_no, "unknown record kind '" + kind + "'");
        }
    });
    return finish(std::move(sentences), std::move(annotations), encoding);
}

const std::vector<std::string> kGoldCsvColumns = {
    "kind", "id", "text", "outlet", "topic", "source_set", "rater_id",
    "sentence_id", "sentence_label", "opinion_label", "biased_spans"};

GoldStore parse_gold_csv(std::string_view content, SpanEncoding encoding) {
    const auto rows = parse_csv(content);
    if (rows.empty()) return GoldStore::build({}, {});
    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < rows[0].fields.size(); ++i) column[rows[0].fields[i]] = i;
    if (!column.count("kind")) fail_at(rows[0].line, "CSV header lacks a 'kind' column");

    std::vector<SentenceRecord> sentences;
    std::vector<RawAnnotation> annotations;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.fields.size() == 1 && row.fields[0].empty()) continue;
        if (row.fields.size() != rows[0].fields.size()) {
            fail_at(row.line, "expected " + std::to_string(rows[0].fields.size()) + " fields, got " +
                                  std::to_string(row.fields.size()));
        }
        // Rebuild a JSON object so both formats share one validation path.
        nlohmann::json obj = nlohmann::json::object();
        for (const auto& [name, idx] : column) {
            if (name == "biased_spans") continue;
            if (!row.fields[idx].empty()) obj[name] = row.fields[idx];
        }
        const auto kind = obj.value("kind", std::string());
        if (kind == "sentence") {
            sentences.push_back(sentence_from(obj, row.line));
        } else if (kind == "annotation") {
            if (const auto it = column.find("biased_spans"); it != column.end()) {
                const auto& cell = row.fields[it->second];
                if (!cell.empty()) {
                    try {
                        obj["biased_spans"] = nlohmann::json::parse(cell);
                    } catch (const nlohmann::json::parse_error& e) {
                        fail_at(row.line, std::string("biased_spans: ") + e.what());
                    }
                }
            }
            annotations.push_back(annotation_from(obj, row.line));
        } else {
            fail_at(row.line, "unknown record kind '" + kind + "'");
        }
    }
    return finish(std::move(sentences), std::move(annotations), encoding);
}

ordered_json spans_json(const std::vector<Span>& spans) {
    ordered_json arr = ordered_json::array();
    for (const auto& s : spans) arr.push_back({s.start, s.end});
    return arr;
}

}  // namespace

std::vector<CsvRow> parse_csv(std::string_view content) {
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool in_quotes = false;
    bool row_started = false;
    std::size_t line = 1;
    row.line = 1;
    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            row_started = true;
        } else if (c == ',') {
            row.fields.push_back(std::move(field));
            field.clear();
            row_started = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < content.size() && content[i + 1] == '\n') ++i;
            if (row_started || !field.empty()) {
                row.fields.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            field.clear();
            row = CsvRow{};
            row_started = false;
            ++line;
            row.line = line;
        } else {
            field.push_back(c);
            row_started = true;
        }
    }
    if (in_quotes) throw DataError("line " + std::to_string(row.line) + ": unterminated quoted CSV field");
    if (row_started || !field.empty()) {
        row.fields.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (const char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

GoldStore parse_gold(std::string_view content, GoldFormat format, SpanEncoding encoding) {
    return format == GoldFormat::JSONL ? parse_gold_jsonl(content, encoding) : parse_gold_csv(content, encoding);
}

GoldStore load_gold(const std::filesystem::path& path, GoldFormat format, SpanEncoding encoding) {
    try {
        return parse_gold(read_file(path), format, encoding);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

GoldStore load_gold(const std::filesystem::path& path) {
    const auto ext = lower_ascii(path.extension().string());
    return load_gold(path, ext == ".csv" ? GoldFormat::CSV : GoldFormat::JSONL);
}

std::string serialize_gold(const GoldStore& store, GoldFormat format) {
    std::string out;
    if (format == GoldFormat::JSONL) {
        for (const auto& s : store.sentences()) {
            ordered_json obj;
            obj["kind"] = "sentence";
            obj["id"] = s.id;
            obj["text"] = s.text;
            obj["outlet"] = s.outlet;
            obj["topic"] = s.topic;
            obj["source_set"] = to_string(s.source_set);
            out += obj.dump() + "\n";
        }
        for (const auto& a : store.annotations()) {
            ordered_json obj;
            obj["kind"] = "annotation";
            obj["rater_id"] = a.rater_id;
            obj["sentence_id"] = a.sentence_id;
            obj["sentence_label"] = to_string(a.sentence_label);
            obj["opinion_label"] = to_string(a.opinion_label);
            obj["biased_spans"] = spans_json(a.biased_spans);
            out += obj.dump() + "\n";
        }
        return out;
    }

    for (std::size_t i = 0; i < kGoldCsvColumns.size(); ++i) {
        out += (i ? "," : "") + kGoldCsvColumns[i];
    }
    out += "\n";
    auto row = [&](std::initializer_list<std::string_view> fields) {
        bool first = true;
        for (const auto f : fields) {
            if (!first) out += ",";
            out += csv_escape(f);
            first = false;
        }
        out += "\n";
    };
    for (const auto& s : store.sentences()) {
        row({"sentence", s.id, s.text, s.outlet, s.topic, to_string(s.source_set), "", "", "", "", ""});
    }
    for (const auto& a : store.annotations()) {
        const auto spans = spans_json(a.biased_spans).dump();
        row({"annotation", "", "", "", "", "", a.rater_id, a.sentence_id, to_string(a.sentence_label),
             to_string(a.opinion_label), spans});
    }
    return out;
}

void write_gold(const GoldStore& store, const std::filesystem::path& path, GoldFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << serialize_gold(store, format);
}

std::vector<HeadlineRecord> parse_headlines(std::string_view content) {
    std::vector<HeadlineRecord> headlines;
    std::set<std::string> ids;
    for_each_line(content, [&](std::size_t line_no, std::string_view line) {
        const auto obj = parse_json_line(line, line_no);
        HeadlineRecord h{require_string(obj, "id", line_no), require_string(obj, "text", line_no),
                         require_string(obj, "outlet", line_no)};
        if (!is_valid_utf8(h.text)) fail_at(line_no, "headline text is not valid UTF-8");
        if (normalize(h.text).empty()) fail_at(line_no, "headline '" + h.id + "' has empty text");
        if (!ids.insert(h.id).second) fail_at(line_no, "duplicate headline id '" + h.id + "'");
        headlines.push_back(std::move(h));
    });
    return headlines;
}

std::vector<HeadlineRecord> load_headlines(const std::filesystem::path& path) {
    try {
        return parse_headlines(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::vector<OutletLeaning> parse_leanings(std::string_view content) {
    std::vector<OutletLeaning> out;
    std::set<std::string> outlets;
    bool first = true;
    for (const auto& row : parse_csv(content)) {
        if (row.fields.size() == 1 && row.fields[0].empty()) continue;
        if (row.fields.size() != 2) fail_at(row.line, "expected 'outlet,leaning'");
        const bool header = first && lower_ascii(row.fields[0]) == "outlet" && lower_ascii(row.fields[1]) == "leaning";
        first = false;
        if (header) continue;
        const auto leaning = parse_leaning(row.fields[1]);
        if (!leaning) fail_at(row.line, "unknown leaning '" + row.fields[1] + "'");
        if (!outlets.insert(row.fields[0]).second) fail_at(row.line, "duplicate outlet '" + row.fields[0] + "'");
        out.push_back({row.fields[0], *leaning});
    }
    return out;
}

std::vector<OutletLeaning> load_leanings(const std::filesystem::path& path) {
    try {
        return parse_leanings(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace mbias
