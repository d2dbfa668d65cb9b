#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rqe {

enum class Category { Disease, Drug, Other };

std::string_view to_string(Category c) noexcept;
/// Accepts DISEASE, DRUG, OTHER (case-insensitive).
std::optional<Category> parse_category(std::string_view s);

/**
 * A question type: category plus type name. Values outside the closed
 * taxonomy can be represented (e.g. when read from a file) and are reported
 * by `in_taxonomy` and collection validation.
 */
struct QuestionType {
    Category category = Category::Other;
    std::string name;

    auto operator<=>(const QuestionType&) const = default;
    bool operator==(const QuestionType&) const = default;
};

using TypeSet = std::set<QuestionType>;

/// `DISEASE/Treatment` style label.
std::string to_string(const QuestionType& t);

/// The closed taxonomy: 16 disease types, 21 drug types, 1 other-entity type.
std::span<const QuestionType> taxonomy();

bool in_taxonomy(const QuestionType& t);

/// Looks up a taxonomy entry by category and exact name. Throws InvalidInput if absent.
QuestionType make_type(Category category, std::string_view name);

/**
 * Maps free-text labels found in distributed data ("exams and tests",
 * "outlook", "side effects") onto taxonomy names for a category. Also accepts
 * taxonomy names themselves, case- and space-insensitively.
 */
std::optional<QuestionType> resolve_type_alias(Category category, std::string_view label);

/// Trigger phrase -> question types, loaded from `<phrase>\t<CATEGORY>\t<TypeName>` lines.
class TriggerLexicon {
public:
    TriggerLexicon() = default;

    /// Throws ParseError naming the line on malformed lines or types outside the taxonomy.
    static TriggerLexicon load(const std::string& path);

    /// Adds a phrase. The phrase is normalized with the tokenizer; throws InvalidInput if it has no tokens
    /// or if `type` is outside the taxonomy.
    void add(std::string_view phrase, const QuestionType& type);

    /// Normalized phrases (tokens joined by single spaces) and their types.
    const std::map<std::string, TypeSet>& entries() const noexcept { return entries_; }

    std::size_t max_phrase_tokens() const noexcept { return max_tokens_; }

private:
    std::map<std::string, TypeSet> entries_;
    std::size_t max_tokens_ = 0;
};

struct TriggerMatch {
    std::string phrase;
    std::size_t first_token = 0;
    std::size_t token_count = 0;
};

struct TypeDetection {
    TypeSet types;
    /// Maximal matches only: a match lying inside a longer match is not listed.
    std::vector<TriggerMatch> matches;
};

/**
 * Types of every trigger phrase occurring in the question as a contiguous run
 * of tokens. All matches contribute their types, so adding a trigger never
 * removes a detected type.
 */
TypeDetection detect_types_detailed(std::string_view question, const TriggerLexicon& lexicon);
TypeSet detect_types(std::string_view question, const TriggerLexicon& lexicon);

/// 2: equal nonempty sets, 1: overlapping but different, 0: disjoint or either side empty.
int type_match_feature(const TypeSet& pq_types, const TypeSet& hq_types);

/// Phrases mapping to `type`, sorted. Throws InvalidInput if `type` is outside the taxonomy.
std::vector<std::string> expand_triggers(const QuestionType& type, const TriggerLexicon& lexicon);

struct FocusAnnotation {
    std::string focus;
    std::vector<std::string> synonyms;
    std::optional<std::string> cui;
    std::optional<std::string> semantic_type;
    std::optional<std::string> semantic_group;

    bool operator==(const FocusAnnotation&) const = default;
};

/// Drops empty and case-insensitively duplicate synonyms, keeping first occurrences.
std::vector<std::string> dedup_synonyms(std::span<const std::string> synonyms);

}  // namespace rqe
