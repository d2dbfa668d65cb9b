#include "rqe/text_prep.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <fstream>

#include "rqe/error.hpp"

namespace rqe::text {
namespace {

bool is_word_char(UChar32 c) { return u_isalnum(c) != 0; }

bool is_joiner(UChar32 c)
{
    // hyphen-minus, apostrophe, and their typographic variants
    return c == '-' || c == '\'' || c == 0x2010 || c == 0x2011 || c == 0x2019 || c == 0x02BC;
}

UChar32 canonical_joiner(UChar32 c) { return c == '-' || c == 0x2010 || c == 0x2011 ? '-' : '\''; }

std::string normalized_lower(std::string_view text)
{
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    icu::UnicodeString in = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    icu::UnicodeString out = U_SUCCESS(status) ? nfc->normalize(in, status) : in;
    if (U_FAILURE(status)) {
        out = in;
    }
    out.toLower(icu::Locale::getRoot());
    // Lowercasing can produce decomposed sequences (e.g. U+0130).
    status = U_ZERO_ERROR;
    icu::UnicodeString recomposed = nfc->normalize(out, status);
    std::string utf8;
    (U_SUCCESS(status) ? recomposed : out).toUTF8String(utf8);
    return utf8;
}

void append_utf8(std::string& dst, UChar32 c)
{
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, c, error);
    if (!error) {
        dst.append(buf, static_cast<std::size_t>(len));
    }
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

Tokens tokenize(std::string_view text)
{
    const std::string norm = normalized_lower(text);
    std::vector<UChar32> cps;
    cps.reserve(norm.size());
    const auto* s = reinterpret_cast<const uint8_t*>(norm.data());
    const auto length = static_cast<int32_t>(norm.size());
    for (int32_t i = 0; i < length;) {
        UChar32 c = 0;
        U8_NEXT(s, i, length, c);
        cps.push_back(c < 0 ? UChar32{' '} : c);
    }

    Tokens tokens;
    std::string current;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const UChar32 c = cps[i];
        if (is_word_char(c)) {
            append_utf8(current, c);
        } else if (is_joiner(c) && !current.empty() && i + 1 < cps.size() && is_word_char(cps[i + 1])) {
            append_utf8(current, canonical_joiner(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

Stoplist::Stoplist(std::set<std::string> words) : words_(words.begin(), words.end()) {}

Stoplist Stoplist::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open stopword list: " + path);
    }
    std::set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        std::string word = trim(line);
        if (word.empty() || word.front() == '#') continue;
        // Entries pass through the tokenizer's normalization so lookups agree with token forms.
        for (auto& t : tokenize(word)) {
            words.insert(std::move(t));
        }
    }
    return Stoplist(std::move(words));
}

bool Stoplist::contains(std::string_view word) const { return words_.find(word) != words_.end(); }

Tokens remove_stopwords(std::span<const std::string> tokens, const Stoplist& stoplist)
{
    Tokens out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (!stoplist.contains(t)) out.push_back(t);
    }
    return out;
}

std::string_view to_string(PosTag tag) noexcept
{
    switch (tag) {
    case PosTag::Noun:
        return "NOUN";
    case PosTag::Verb:
        return "VERB";
    case PosTag::Other:
        break;
    }
    return "OTHER";
}

PosLexicon::PosLexicon(std::set<std::string> nouns, std::set<std::string> verbs)
{
    for (const auto& n : nouns) nouns_.insert(normalized_lower(n));
    for (const auto& v : verbs) verbs_.insert(normalized_lower(v));
}

PosLexicon PosLexicon::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open POS lexicon: " + path);
    }
    std::set<std::string> nouns;
    std::set<std::string> verbs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty() || trim(line).front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected <word>\\t<NOUN|VERB>");
        }
        std::string word = trim(std::string_view(line).substr(0, tab));
        const std::string tag = trim(std::string_view(line).substr(tab + 1));
        if (word.empty()) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": empty word");
        }
        if (tag == "NOUN") {
            nouns.insert(std::move(word));
        } else if (tag == "VERB") {
            verbs.insert(std::move(word));
        } else {
            throw ParseError(path + ":" + std::to_string(lineno) + ": unknown tag '" + tag + "'");
        }
    }
    return PosLexicon(std::move(nouns), std::move(verbs));
}

bool PosLexicon::is_noun(std::string_view word) const
{
    if (nouns_.find(word) != nouns_.end()) return true;
    return nouns_.find(normalized_lower(word)) != nouns_.end();
}

bool PosLexicon::is_verb(std::string_view word) const
{
    if (verbs_.find(word) != verbs_.end()) return true;
    return verbs_.find(normalized_lower(word)) != verbs_.end();
}

std::vector<PosTag> PosLexicon::tag(std::span<const std::string> tokens) const
{
    std::vector<PosTag> tags;
    tags.reserve(tokens.size());
    for (const auto& t : tokens) {
        if (is_noun(t)) {
            tags.push_back(PosTag::Noun);
        } else if (is_verb(t)) {
            tags.push_back(PosTag::Verb);
        } else {
            tags.push_back(PosTag::Other);
        }
    }
    return tags;
}

std::vector<PosTag> tag_pos(std::span<const std::string> tokens, const PosTagger& tagger) { return tagger.tag(tokens); }

NormalizedText preprocess(std::string_view text, const Stoplist& stoplist, const PosTagger& tagger)
{
    NormalizedText out;
    out.raw = std::string(text);
    out.tokens = tokenize(text);
    out.tags = tagger.tag(out.tokens);
    for (const auto& t : out.tokens) {
        if (!stoplist.contains(t)) out.content_stems.push_back(porter_stem(t));
    }
    for (std::size_t i = 0; i < out.tokens.size(); ++i) {
        if (i > 0) out.char_form.push_back(' ');
        out.char_form += out.tokens[i];
    }
    return out;
}

Tokens content_stems(std::string_view text, const Stoplist& stoplist)
{
    Tokens stems;
    for (const auto& t : tokenize(text)) {
        if (!stoplist.contains(t)) stems.push_back(porter_stem(t));
    }
    return stems;
}

}  // namespace rqe::text
