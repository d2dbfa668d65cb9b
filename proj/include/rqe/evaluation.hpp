#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace rqe {

/// Judgment grades: 4 correct and complete, 3 correct but incomplete, 2 incorrect but related, 1 incorrect.
inline constexpr int kMinGrade = 1;
inline constexpr int kMaxGrade = 4;
/// Grade at or above which an answer counts as correct for MAP and MRR.
inline constexpr int kCorrectGrade = 3;

struct JudgedQuestion {
    std::string qid;
    /// Grades of the returned answers in rank order; empty when unanswered.
    std::vector<int> grades;
};

struct JudgedRun {
    std::vector<JudgedQuestion> questions;

    std::size_t answered() const;
    /// Throws InvalidInput on an out-of-range grade or a duplicate qid.
    void validate() const;
};

/// Mean of (first grade - 1) over all questions, 0 for unanswered. Throws InvalidInput on an empty run.
double avg_score(const JudgedRun& run);
/// Fraction of all questions whose first answer has grade >= i, i in {2,3,4}.
double succ_at(const JudgedRun& run, int i);
/// Same numerator over answered questions. Throws InvalidInput when nothing was answered.
double prec_at(const JudgedRun& run, int i);

/// (1/K) sum n / rank_n over the K correct answers within the cutoff; 0 when K = 0.
double average_precision(std::span<const int> grades, std::size_t cutoff = 10);
double map_at_10(const JudgedRun& run);
double mrr_at_10(const JudgedRun& run);

struct MetricReport {
    std::size_t questions = 0;
    std::size_t answered = 0;
    std::size_t unjudged = 0;
    double avg_score_0_3 = 0.0;
    std::map<int, double> succ_at;
    /// Absent when no question was answered.
    std::map<int, double> prec_at;
    double map_at_10 = 0.0;
    double mrr_at_10 = 0.0;
};

MetricReport evaluate_run(const JudgedRun& run);
nlohmann::json to_json(const MetricReport& report);
std::string format_report(const MetricReport& report);

struct AgreementResult {
    double precision = 0.0;
    double f1 = 0.0;
    double partial_precision = 0.0;
    double partial_f1 = 0.0;
};

/**
 * Agreement of `other` with `reference` taken as truth. Every item is rated by
 * both, so recall is 1 and F1 = 2P / (1 + P). The partial variant merges
 * grades {4,3} and {2,1}. Throws InvalidInput on a length mismatch or empty lists.
 */
AgreementResult agreement_f1(std::span<const int> reference, std::span<const int> other);

// --- file formats ---------------------------------------------------------------

struct RunEntry {
    std::string qid;
    std::string pair_id;
    int rank = 0;
    double score = 0.0;
    std::string tag;
};

/// TREC run lines `<qid> Q0 <pair_id> <rank> <score> <tag>`. Throws ParseError with the line number.
std::vector<RunEntry> parse_trec_run(const std::string& text, const std::string& origin = "<input>");

struct Judgments {
    std::map<std::pair<std::string, std::string>, int> by_pair;
    std::map<std::pair<std::string, int>, int> by_rank;

    /// Pair-keyed grade wins over a rank-keyed one.
    std::optional<int> lookup(const std::string& qid, const std::string& pair_id, int rank) const;
};

/**
 * `<qid>\t<pair_id>\t<grade>` lines, whitespace-separated fields also accepted.
 * A second field of the form `rank:<n>` judges whatever answer sits at that rank.
 */
Judgments parse_judgments(const std::string& text, const std::string& origin = "<input>");
Judgments load_judgments(const std::string& path);

/// `<qid>\t<question>` lines in file order. Throws ParseError on a malformed line or an empty file.
std::vector<std::pair<std::string, std::string>> load_questions(const std::string& path);
std::vector<std::pair<std::string, std::string>> parse_questions(const std::string& text,
                                                                 const std::string& origin = "<input>");

/// One grade per line.
std::vector<int> load_grades(const std::string& path);

/**
 * Joins a run with judgments. Every qid in `qids` appears, in that order;
 * unjudged answers get grade 1 and are counted in `unjudged`.
 */
JudgedRun judge_run(std::span<const std::string> qids, std::span<const RunEntry> run, const Judgments& judgments,
                    std::size_t* unjudged = nullptr);

}  // namespace rqe
