#include "mbias/baseline.hpp"

#include "mbias/error.hpp"

#include <algorithm>

namespace mbias {

void LexiconSet::add(const std::string& list, std::string_view entry) {
    auto normalized = normalize(entry);
    auto& words = lists_[list];
    if (!normalized.empty()) words.insert(std::move(normalized));
}

void LexiconSet::ensure_list(const std::string& list) { lists_[list]; }

LexiconSet LexiconSet::select(const std::set<std::string>& lists) const {
    LexiconSet out;
    for (const auto& [name, words] : lists_) {
        if (lists.count(name)) out.lists_.emplace(name, words);
    }
    return out;
}

bool LexiconSet::contains(std::string_view surface) const {
    return std::any_of(lists_.begin(), lists_.end(),
                       [&](const auto& entry) { return entry.second.find(surface) != entry.second.end(); });
}

std::size_t LexiconSet::size() const {
    std::size_t n = 0;
    for (const auto& [name, words] : lists_) n += words.size();
    return n;
}

void parse_lexicon(LexiconSet& lex, const std::string& list, std::string_view content) {
    lex.ensure_list(list);
    std::size_t pos = 0;
    while (pos < content.size()) {
        auto nl = content.find('\n', pos);
        if (nl == std::string_view::npos) nl = content.size();
        auto line = content.substr(pos, nl - pos);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        lex.add(list, line);
        pos = nl + 1;
    }
}

LexiconSet load_lexicons(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw DataError("lexicon directory '" + dir.string() + "' not found");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    LexiconSet lex;
    for (const auto& f : files) {
        const auto content = read_file(f);
        if (!is_valid_utf8(content)) throw DataError(f.string() + ": not valid UTF-8");
        parse_lexicon(lex, f.stem().string(), content);
    }
    return lex;
}

std::vector<bool> tag_words(std::span<const Token> tokens, const LexiconSet& lex) {
    std::vector<bool> mask;
    mask.reserve(tokens.size());
    for (const auto& t : tokens) mask.push_back(lex.contains(t.surface));
    return mask;
}

SentenceLabel classify_sentence(std::span<const Token> tokens, const LexiconSet& lex) {
    const bool hit = std::any_of(tokens.begin(), tokens.end(), [&](const Token& t) { return lex.contains(t.surface); });
    return hit ? SentenceLabel::Biased : SentenceLabel::NonBiased;
}

}  // namespace mbias
