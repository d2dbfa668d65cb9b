#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rqe/qa_collection.hpp"
#include "rqe/resources.hpp"

namespace rqe {

using DocId = std::uint32_t;

struct Posting {
    DocId doc = 0;
    std::uint32_t tf = 0;

    bool operator==(const Posting&) const = default;
};

struct TermStats {
    /// Number of documents containing the term (n).
    std::uint32_t document_frequency = 0;
    /// Total occurrences over the collection (F).
    std::uint64_t collection_frequency = 0;

    bool operator==(const TermStats&) const = default;
};

/// Indexed form of one QAPair: stems of the question, focus synonyms and type triggers.
struct QuestionDocument {
    std::string pair_id;
    std::vector<std::string> indexed_terms;
};

/// Expands and stems a pair's question text. The answer is never indexed.
QuestionDocument expand_document(const QAPair& pair, const Resources& resources);

/// Digest binding an index to the collection and resources it was built from.
std::string index_checksum(const Collection& collection, const Resources& resources);

class InvertedIndex {
public:
    /// Throws InvalidInput on an empty collection.
    static InvertedIndex build(const Collection& collection, const Resources& resources);

    /// Builds from already expanded documents. Documents are renumbered in ascending pair id order.
    static InvertedIndex from_documents(std::vector<QuestionDocument> documents, std::string checksum = {});

    std::size_t doc_count() const noexcept { return pair_ids_.size(); }
    std::size_t vocabulary_size() const noexcept { return terms_.size(); }
    double avg_doc_length() const noexcept { return avg_doc_length_; }
    const std::string& checksum() const noexcept { return checksum_; }

    const std::string& pair_id(DocId doc) const { return pair_ids_.at(doc); }
    std::uint32_t doc_length(DocId doc) const { return doc_lengths_.at(doc); }
    std::optional<DocId> find_doc(std::string_view pair_id) const;

    /// Sorted term dictionary.
    const std::vector<std::string>& terms() const noexcept { return terms_; }
    /// Postings sorted by doc id; empty span for unknown terms.
    std::span<const Posting> postings(std::string_view term) const;
    TermStats stats(std::string_view term) const;
    /// Distinct indexed terms of one document, sorted.
    std::vector<std::string> document_terms(DocId doc) const;

    /// Versioned little-endian binary layout, documented in docs/index_format.md.
    void save(const std::string& path) const;
    static InvertedIndex load(const std::string& path);
    std::string serialize() const;
    static InvertedIndex deserialize(std::string_view bytes);

    bool operator==(const InvertedIndex&) const = default;

private:
    void finalize();
    std::ptrdiff_t term_index(std::string_view term) const;

    std::vector<std::string> pair_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    std::vector<std::string> terms_;
    std::vector<std::vector<Posting>> postings_;
    std::vector<TermStats> stats_;
    double avg_doc_length_ = 0.0;
    std::string checksum_;
};

/// Throws StaleIndexError when the index was built from different inputs, unless `force`.
void check_index_fresh(const InvertedIndex& index, const Collection& collection, const Resources& resources,
                       bool force = false);

struct ScoredDoc {
    std::string pair_id;
    double score = 0.0;

    bool operator==(const ScoredDoc&) const = default;
};

/// Scores non-increasing, ties by ascending pair id, pair ids distinct.
using RetrievalResult = std::vector<ScoredDoc>;

/// Sorts into RetrievalResult order.
void sort_result(RetrievalResult& result);

/// tf * ln(1 + N/n)
double tfidf_term_weight(double tf, double doc_count, double document_frequency);

/// In_expB2 weight of one term in one document with hyperparameter c.
double inexpb2_term_weight(double tf, double doc_length, double avg_doc_length, double doc_count,
                           double document_frequency, double collection_frequency, double c);

/// Sum over query stems (with multiplicity) of the TF-IDF weights; zero-score documents omitted.
RetrievalResult score_tfidf(std::span<const std::string> query_stems, const InvertedIndex& index);
RetrievalResult score_tfidf(const text::NormalizedText& query, const InvertedIndex& index);

/// Same for In_expB2. Throws InvalidInput unless c > 0.
RetrievalResult score_inexpb2(std::span<const std::string> query_stems, const InvertedIndex& index, double c = 1.0);
RetrievalResult score_inexpb2(const text::NormalizedText& query, const InvertedIndex& index, double c = 1.0);

/// Union of both lists with summed scores.
RetrievalResult fuse(const RetrievalResult& a, const RetrievalResult& b);

enum class RetrievalModel { Fused, TfIdf, InExpB2 };

struct RetrievalConfig {
    std::size_t n_max = 100;
    double c = 1.0;
    RetrievalModel model = RetrievalModel::Fused;
};

/// Preprocesses the question, scores it with the configured model(s) and keeps the top n_max.
RetrievalResult retrieve_candidates(std::string_view question, const InvertedIndex& index, const Resources& resources,
                                    const RetrievalConfig& config = {});

}  // namespace rqe
