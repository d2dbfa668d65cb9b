#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rqe/question_types.hpp"
#include "rqe/rqe_classifier.hpp"

namespace rqe {

/// One answered question: the unit of the collection and of indexing.
struct QAPair {
    std::string id;
    std::string question;
    std::string answer;
    FocusAnnotation focus;
    QuestionType question_type;
    std::string source;
    std::optional<std::string> url;

    bool operator==(const QAPair&) const = default;
};

struct Collection {
    std::vector<QAPair> pairs;

    const QAPair* find(const std::string& id) const;
    bool operator==(const Collection&) const = default;
};

enum class CollectionFormat { Json, Xml };

struct LoadOptions {
    /// Disables the alias table: type labels must be exact taxonomy names.
    bool strict = false;
};

/**
 * Reads a collection file.
 *
 * JSON is the canonical form (see docs/collection_format.md). The XML reader
 * accepts the MedQuAD layout: one or more `<Document>` elements, either as the
 * root or under a wrapper element.
 *
 * Throws ParseError (with position) on malformed input, on duplicate ids, on
 * question types that cannot be resolved, and on an empty collection.
 */
Collection load_collection(const std::string& path, CollectionFormat format, const LoadOptions& options = {});

/// Chooses the format from the file extension (`.xml` or JSON otherwise).
Collection load_collection(const std::string& path, const LoadOptions& options = {});

Collection parse_collection_json(const std::string& text, const LoadOptions& options = {});
Collection parse_collection_xml(const std::string& text, const LoadOptions& options = {});

nlohmann::json to_json(const QAPair& pair);
nlohmann::json to_json(const Collection& collection);
/// Canonical serialization (two-space indent, trailing newline).
std::string serialize_collection(const Collection& collection);
void save_collection(const Collection& collection, const std::string& path);

/// Digest of the canonical serialization; embedded in index files.
std::string collection_checksum(const Collection& collection);

struct Violation {
    std::string pair_id;
    std::string message;
};

struct ValidationOptions {
    /// Type names must be exact taxonomy members (otherwise an alias counts as valid).
    bool strict = false;
};

/// Checks every QAPair invariant. Returns one record per violation; never throws.
std::vector<Violation> validate_collection(const Collection& collection, const ValidationOptions& options = {});

// --- pattern-based generation ---------------------------------------------------

struct Section {
    std::string title;
    std::string body;
};

/// One structured source article about a single topic.
struct ArticleRecord {
    std::string topic;
    std::vector<std::string> synonyms;
    Category category = Category::Disease;
    std::vector<Section> sections;
    std::string source;
    std::optional<std::string> url;
};

enum class TitleMatch { Exact, Prefix };

struct PatternRule {
    TitleMatch match = TitleMatch::Exact;
    /// Compared case-insensitively after whitespace normalization.
    std::string section_title;
    QuestionType type;
    /// Contains exactly one `TOPIC` placeholder.
    std::string question_template;
};

struct PatternConfig {
    std::string name;
    std::vector<PatternRule> rules;

    /// Throws InvalidInput on a type outside the taxonomy or a template without exactly one TOPIC.
    void validate() const;
};

/// Throws ParseError on malformed JSON or rules.
PatternConfig load_pattern_config(const std::string& path);
PatternConfig parse_pattern_config(const std::string& text);

/// Accepts a single article object or an array of articles.
std::vector<ArticleRecord> load_articles(const std::string& path);
std::vector<ArticleRecord> parse_articles(const std::string& text);

struct SkippedSection {
    std::string topic;
    std::string title;
};

struct GenerationResult {
    std::vector<QAPair> pairs;
    std::vector<SkippedSection> skipped;
};

/**
 * One QAPair per section whose title matches a rule (first matching rule
 * wins): the templated question, the section body as answer, focus = topic
 * plus synonyms. Ids are `<source>_<topic-slug>_<section index>`.
 */
GenerationResult generate_qa_pairs(const ArticleRecord& article, const PatternConfig& config);

// --- labeled pair datasets ---------------------------------------------------------

/// `<premise>\t<hypothesis>\t<0|1>` per line. Throws ParseError with the line number; empty file is an error.
std::vector<LabeledPair> load_pair_dataset(const std::string& path);
std::vector<LabeledPair> parse_pair_dataset(const std::string& text, const std::string& origin = "<input>");

}  // namespace rqe
