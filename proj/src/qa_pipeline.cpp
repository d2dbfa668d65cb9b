#include "rqe/qa_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rqe/error.hpp"
#include "rqe/numeric_format.hpp"

namespace rqe {
namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

double safe_norm(double score, double max)
{
    if (!(max > 0.0)) return 0.0;
    return score / max;
}

nlohmann::json types_json(const TypeSet& types)
{
    auto out = nlohmann::json::array();
    for (const auto& t : types) out.push_back(to_string(t));
    return out;
}

}  // namespace

void PipelineConfig::validate() const
{
    if (!in_unit(alpha) || !in_unit(beta)) throw InvalidInput("alpha and beta must lie in [0,1]");
    if (std::abs(alpha + beta - 1.0) > 1e-9) throw InvalidInput("alpha + beta must equal 1");
    if (n_max == 0) throw InvalidInput("n_max must be positive");
    if (top_k == 0) throw InvalidInput("top_k must be positive");
    if (!(entailment_threshold > 0.0 && entailment_threshold < 1.0)) {
        throw InvalidInput("entailment_threshold must lie in (0,1)");
    }
    if (!(c > 0.0)) throw InvalidInput("c must be positive");
}

AnswerResult rank_candidates(std::vector<AnswerCandidate> candidates, const PipelineConfig& config)
{
    config.validate();
    AnswerResult result;
    for (auto& c : candidates) {
        c.entailed = c.rqe_score >= config.entailment_threshold;
        c.alpha = config.alpha;
        c.beta = config.beta;
        c.threshold = config.entailment_threshold;
        c.hybrid_score.reset();
        if (config.filter_before_normalization && !c.entailed) continue;
        result.ir_max = std::max(result.ir_max, c.ir_score);
        result.rqe_max = std::max(result.rqe_max, c.rqe_score);
    }
    for (auto& c : candidates) {
        c.ir_norm = safe_norm(c.ir_score, result.ir_max);
        c.rqe_norm = safe_norm(c.rqe_score, result.rqe_max);
        if (c.entailed) {
            c.hybrid_score = config.alpha * c.ir_norm + config.beta * c.rqe_norm;
            result.answers.push_back(c);
        }
    }
    std::stable_sort(result.answers.begin(), result.answers.end(), [](const AnswerCandidate& a, const AnswerCandidate& b) {
        if (*a.hybrid_score != *b.hybrid_score) return *a.hybrid_score > *b.hybrid_score;
        return a.pair_id < b.pair_id;
    });

    if (result.answers.empty() && !candidates.empty()) {
        if (config.fallback_to_ir) {
            result.used_fallback = true;
            for (const auto& c : candidates) {
                result.answers.push_back(c);
                result.answers.back().hybrid_score = config.alpha * c.ir_norm + config.beta * c.rqe_norm;
            }
            std::stable_sort(result.answers.begin(), result.answers.end(),
                             [](const AnswerCandidate& a, const AnswerCandidate& b) {
                                 if (a.ir_score != b.ir_score) return a.ir_score > b.ir_score;
                                 return a.pair_id < b.pair_id;
                             });
            result.diagnostic = "no entailed candidate; returning IR ranking";
        } else {
            result.diagnostic = "all " + std::to_string(candidates.size()) + " retrieved candidates were filtered as not entailed";
        }
    } else if (candidates.empty()) {
        result.diagnostic = "no candidate questions retrieved";
    }
    if (result.answers.size() > config.top_k) result.answers.resize(config.top_k);
    result.candidates = std::move(candidates);
    return result;
}

AnswerResult answer(std::string_view pq, const QAContext& context, const PipelineConfig& config)
{
    config.validate();
    RetrievalConfig rc;
    rc.n_max = config.n_max;
    rc.c = config.c;
    const RetrievalResult retrieved = retrieve_candidates(pq, context.index, context.resources, rc);

    const auto pq_stems = text::content_stems(pq, context.resources.stoplist);
    const std::set<std::string> pq_stem_set(pq_stems.begin(), pq_stems.end());

    std::vector<AnswerCandidate> candidates;
    candidates.reserve(retrieved.size());
    for (const auto& hit : retrieved) {
        const QAPair* pair = context.collection.find(hit.pair_id);
        if (pair == nullptr) {
            throw StaleIndexError("index refers to pair '" + hit.pair_id + "' missing from the collection");
        }
        AnswerCandidate c;
        c.pair_id = pair->id;
        c.hq_text = pair->question;
        c.answer_text = pair->answer;
        c.source = pair->source;
        c.url = pair->url;
        c.ir_score = hit.score;

        const AnalyzedPair analyzed = analyze_pair(pq, pair->question, context.resources);
        c.pq_types = analyzed.pq_types;
        c.hq_types = analyzed.hq_types;
        if (!analyzed.hq.tokens.empty()) {
            c.features = compute_features(analyzed);
            c.rqe_score = predict_proba(context.model, c.features);
        }

        if (const auto doc = context.index.find_doc(hit.pair_id)) {
            for (auto& term : context.index.document_terms(*doc)) {
                if (pq_stem_set.contains(term)) c.matched_terms.push_back(std::move(term));
            }
        }
        candidates.push_back(std::move(c));
    }
    return rank_candidates(std::move(candidates), config);
}

Explanation explain(const AnswerCandidate& candidate)
{
    Explanation e;
    e.pair_id = candidate.pair_id;
    e.features = candidate.features;
    e.ir_score = candidate.ir_score;
    e.ir_norm = candidate.ir_norm;
    e.rqe_score = candidate.rqe_score;
    e.rqe_norm = candidate.rqe_norm;
    e.threshold = candidate.threshold;
    e.entailed = candidate.entailed;
    e.hybrid_score = candidate.alpha * candidate.ir_norm + candidate.beta * candidate.rqe_norm;
    e.pq_types = candidate.pq_types;
    e.hq_types = candidate.hq_types;
    e.matched_terms = candidate.matched_terms;
    return e;
}

nlohmann::json to_json(const Explanation& e)
{
    nlohmann::json features = nlohmann::json::object();
    const auto values = e.features.as_array();
    for (int i = 0; i < kFeatureCount; ++i) features[std::string(kFeatureNames[static_cast<std::size_t>(i)])] = values(i);
    return {
        {"pair_id", e.pair_id},
        {"features", features},
        {"ir_score", e.ir_score},
        {"ir_norm", e.ir_norm},
        {"rqe_score", e.rqe_score},
        {"rqe_norm", e.rqe_norm},
        {"threshold", e.threshold},
        {"entailed", e.entailed},
        {"hybrid_score", e.hybrid_score},
        {"pq_types", types_json(e.pq_types)},
        {"hq_types", types_json(e.hq_types)},
        {"matched_terms", e.matched_terms},
    };
}

std::string format_explanation(const Explanation& e)
{
    std::ostringstream out;
    const auto values = e.features.as_array();
    for (int i = 0; i < kFeatureCount; ++i) {
        out << "    " << kFeatureNames[static_cast<std::size_t>(i)] << " = " << format_double(values(i)) << '\n';
    }
    out << "    ir " << format_double(e.ir_score) << " (norm " << format_double(e.ir_norm) << ")\n";
    out << "    rqe " << format_double(e.rqe_score) << " (norm " << format_double(e.rqe_norm) << ", threshold "
        << format_double(e.threshold) << ", " << (e.entailed ? "entailed" : "not entailed") << ")\n";
    out << "    hscore " << format_double(e.hybrid_score) << '\n';
    auto join_types = [](const TypeSet& types) {
        std::string s;
        for (const auto& t : types) s += (s.empty() ? "" : ", ") + to_string(t);
        return s.empty() ? std::string("-") : s;
    };
    out << "    pq types: " << join_types(e.pq_types) << '\n';
    out << "    hq types: " << join_types(e.hq_types) << '\n';
    std::string terms;
    for (const auto& t : e.matched_terms) terms += (terms.empty() ? "" : " ") + t;
    out << "    matched: " << (terms.empty() ? "-" : terms) << '\n';
    return out.str();
}

std::vector<RerankedCandidate> hybrid_rerank_cqa(const std::vector<double>& lr_scores, const std::vector<int>& ir_ranks,
                                                 double w)
{
    if (lr_scores.size() != ir_ranks.size()) throw InvalidInput("one IR rank is required per LR score");
    std::vector<RerankedCandidate> out;
    out.reserve(lr_scores.size());
    for (std::size_t i = 0; i < lr_scores.size(); ++i) {
        if (ir_ranks[i] < 1) throw InvalidInput("IR ranks start at 1 (got " + std::to_string(ir_ranks[i]) + ")");
        out.push_back({i, lr_scores[i], ir_ranks[i], lr_scores[i] + w / ir_ranks[i]});
    }
    std::stable_sort(out.begin(), out.end(), [](const RerankedCandidate& a, const RerankedCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.ir_rank < b.ir_rank;
    });
    return out;
}

nlohmann::json to_json(const AnswerCandidate& c, int rank)
{
    nlohmann::json j = {
        {"rank", rank},
        {"pair_id", c.pair_id},
        {"question", c.hq_text},
        {"answer", c.answer_text},
        {"source", c.source},
        {"url", c.url ? nlohmann::json(*c.url) : nlohmann::json(nullptr)},
        {"ir_score", c.ir_score},
        {"ir_norm", c.ir_norm},
        {"rqe_score", c.rqe_score},
        {"rqe_norm", c.rqe_norm},
        {"entailed", c.entailed},
        {"hybrid_score", c.hybrid_score ? nlohmann::json(*c.hybrid_score) : nlohmann::json(nullptr)},
    };
    return j;
}

std::string to_json_line(const AnswerCandidate& candidate, int rank) { return to_json(candidate, rank).dump(); }

std::string to_trec_run(std::string_view qid, const std::vector<AnswerCandidate>& answers, std::string_view tag)
{
    std::string out;
    int rank = 0;
    for (const auto& a : answers) {
        ++rank;
        out.append(qid).append(" Q0 ").append(a.pair_id).append(" ").append(std::to_string(rank)).append(" ");
        out.append(format_double(a.hybrid_score.value_or(a.ir_score))).append(" ").append(tag).append("\n");
    }
    return out;
}

}  // namespace rqe
