#pragma once

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rqe::text {

using Tokens = std::vector<std::string>;

/**
 * Splits text into lowercase word tokens.
 *
 * Input is NFC-normalized and lowercased first. A token is a maximal run of
 * letters and digits, optionally joined by single internal hyphens or
 * apostrophes ("wolff-parkinson-white", "don't"). Everything else separates
 * tokens. Order and duplicates are preserved. Invalid UTF-8 sequences are
 * treated as separators.
 */
Tokens tokenize(std::string_view text);

/// Fixed list of function words, one lowercase entry per line in its file.
class Stoplist {
public:
    Stoplist() = default;
    explicit Stoplist(std::set<std::string> words);

    /// Loads one word per line; blank lines and `#` comments are skipped.
    static Stoplist load(const std::string& path);

    bool contains(std::string_view word) const;
    std::size_t size() const noexcept { return words_.size(); }
    const std::set<std::string, std::less<>>& words() const noexcept { return words_; }

private:
    std::set<std::string, std::less<>> words_;
};

/// Order-preserving filter.
Tokens remove_stopwords(std::span<const std::string> tokens, const Stoplist& stoplist);

/**
 * Porter (1980) suffix stripping, following the reference implementation
 * distributed by its author: words of length <= 2 are returned unchanged,
 * step 2 uses the "bli" and "logi" rules.
 *
 * The input must be lowercase. Non-ASCII input is returned unchanged.
 */
std::string porter_stem(std::string_view word);

enum class PosTag { Noun, Verb, Other };

std::string_view to_string(PosTag tag) noexcept;

/// One tag per input token.
class PosTagger {
public:
    virtual ~PosTagger() = default;
    virtual std::vector<PosTag> tag(std::span<const std::string> tokens) const = 0;
};

/**
 * Dictionary tagger over a noun/verb word list. A form listed as both noun
 * and verb is tagged as a noun.
 */
class PosLexicon final : public PosTagger {
public:
    PosLexicon() = default;
    PosLexicon(std::set<std::string> nouns, std::set<std::string> verbs);

    /// Lines of `<word>\t<NOUN|VERB>`. Throws ParseError with the line number on bad input.
    static PosLexicon load(const std::string& path);

    bool is_noun(std::string_view word) const;
    bool is_verb(std::string_view word) const;

    std::vector<PosTag> tag(std::span<const std::string> tokens) const override;

    std::size_t noun_count() const noexcept { return nouns_.size(); }
    std::size_t verb_count() const noexcept { return verbs_.size(); }

private:
    std::set<std::string, std::less<>> nouns_;
    std::set<std::string, std::less<>> verbs_;
};

std::vector<PosTag> tag_pos(std::span<const std::string> tokens, const PosTagger& tagger);

struct NormalizedText {
    std::string raw;
    /// All tokens, before stopword removal.
    Tokens tokens;
    /// One tag per entry of `tokens`.
    std::vector<PosTag> tags;
    /// Stems of the tokens surviving stopword removal, in order.
    Tokens content_stems;
    /// `tokens` joined by single spaces.
    std::string char_form;

    bool operator==(const NormalizedText&) const = default;
};

NormalizedText preprocess(std::string_view text, const Stoplist& stoplist, const PosTagger& tagger);

/// tokenize -> remove_stopwords -> porter_stem, without tagging.
Tokens content_stems(std::string_view text, const Stoplist& stoplist);

}  // namespace rqe::text
