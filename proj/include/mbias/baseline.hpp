#pragma once

#include "mbias/corpus.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace mbias {

/// Named word lists (opinion words, hedges, assertive and factive verbs,
/// plus any extra lists). Entries are stored normalized.
class LexiconSet {
public:
    static constexpr const char* kOpinionWords = "opinion_words";
    static constexpr const char* kHedges = "hedges";
    static constexpr const char* kAssertiveVerbs = "assertive_verbs";
    static constexpr const char* kFactiveVerbs = "factive_verbs";

    void add(const std::string& list, std::string_view entry);
    /// Creates the list if it does not exist yet.
    void ensure_list(const std::string& list);

    /// Restricts to the named lists; unknown names are ignored.
    LexiconSet select(const std::set<std::string>& lists) const;

    bool contains(std::string_view surface) const;
    std::size_t size() const;
    const std::map<std::string, std::set<std::string, std::less<>>>& lists() const { return lists_; }

private:
    std::map<std::string, std::set<std::string, std::less<>>> lists_;
};

/// One entry per line, `#` starts a comment, blank lines ignored.
void parse_lexicon(LexiconSet& lex, const std::string& list, std::string_view content);

/// Loads every `*.txt` file of `dir` as a list named after the file stem.
LexiconSet load_lexicons(const std::filesystem::path& dir);

std::vector<bool> tag_words(std::span<const Token> tokens, const LexiconSet& lex);

/// Biased as soon as any token is a lexicon hit.
SentenceLabel classify_sentence(std::span<const Token> tokens, const LexiconSet& lex);

}  // namespace mbias
