#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rqe/ir_engine.hpp"
#include "rqe/qa_collection.hpp"
#include "rqe/rqe_classifier.hpp"
#include "rqe/similarity_features.hpp"

namespace rqe {

struct PipelineConfig {
    double alpha = 0.5;
    double beta = 0.5;
    std::size_t n_max = 100;
    std::size_t top_k = 10;
    double entailment_threshold = 0.5;
    /// In_expB2 length-normalization parameter.
    double c = 1.0;
    /// Return the unfiltered IR top-k when no candidate is entailed.
    bool fallback_to_ir = false;
    /// Normalize over the entailed candidates only instead of all N retrieved.
    bool filter_before_normalization = false;

    /// Throws InvalidInput unless alpha, beta in [0,1] with alpha + beta = 1, n_max and top_k positive, threshold in (0,1), c > 0.
    void validate() const;
};

struct AnswerCandidate {
    std::string pair_id;
    std::string hq_text;
    std::string answer_text;
    std::string source;
    std::optional<std::string> url;

    double ir_score = 0.0;
    double rqe_score = 0.0;
    bool entailed = false;
    /// Set only for entailed candidates (and for IR fallback answers).
    std::optional<double> hybrid_score;

    double ir_norm = 0.0;
    double rqe_norm = 0.0;
    double alpha = 0.5;
    double beta = 0.5;
    double threshold = 0.5;

    FeatureVector features;
    TypeSet pq_types;
    TypeSet hq_types;
    /// Query stems that hit this candidate's indexed terms.
    std::vector<std::string> matched_terms;
};

struct AnswerResult {
    /// Ranked, at most top_k.
    std::vector<AnswerCandidate> answers;
    /// Every retrieved candidate in retrieval order, including filtered ones.
    std::vector<AnswerCandidate> candidates;
    double ir_max = 0.0;
    double rqe_max = 0.0;
    bool used_fallback = false;
    /// Empty when answers are present.
    std::string diagnostic;
};

/// Everything answer() needs, loaded once and shared read-only.
struct QAContext {
    const Collection& collection;
    const InvertedIndex& index;
    const EntailmentModel& model;
    const Resources& resources;
};

/**
 * Retrieve, score entailment, drop non-entailed candidates, then rank by
 * alpha * IR / max(IR) + beta * RQE / max(RQE). Maxima are taken over all
 * retrieved candidates unless config.filter_before_normalization is set; a
 * zero maximum makes that term 0.
 */
AnswerResult answer(std::string_view pq, const QAContext& context, const PipelineConfig& config = {});

/// Normalization and ranking step alone, over already scored candidates. Exposed for testing.
AnswerResult rank_candidates(std::vector<AnswerCandidate> candidates, const PipelineConfig& config);

struct Explanation {
    std::string pair_id;
    FeatureVector features;
    double ir_score = 0.0;
    double ir_norm = 0.0;
    double rqe_score = 0.0;
    double rqe_norm = 0.0;
    double threshold = 0.5;
    bool entailed = false;
    /// alpha * ir_norm + beta * rqe_norm, recomputed.
    double hybrid_score = 0.0;
    TypeSet pq_types;
    TypeSet hq_types;
    std::vector<std::string> matched_terms;
};

Explanation explain(const AnswerCandidate& candidate);
nlohmann::json to_json(const Explanation& explanation);
std::string format_explanation(const Explanation& explanation);

struct RerankedCandidate {
    std::size_t index = 0;
    double lr_score = 0.0;
    int ir_rank = 0;
    double score = 0.0;
};

/// score = lr + w / rank, descending, ties by ascending IR rank. Throws InvalidInput on rank < 1 or size mismatch.
std::vector<RerankedCandidate> hybrid_rerank_cqa(const std::vector<double>& lr_scores, const std::vector<int>& ir_ranks,
                                                 double w = 8.9);

/// One JSON object per answer (single line, no trailing newline).
nlohmann::json to_json(const AnswerCandidate& candidate, int rank);
std::string to_json_line(const AnswerCandidate& candidate, int rank);

/// `<qid> Q0 <pair_id> <rank> <score> <tag>` lines, ranks from 1.
std::string to_trec_run(std::string_view qid, const std::vector<AnswerCandidate>& answers, std::string_view tag);

}  // namespace rqe
