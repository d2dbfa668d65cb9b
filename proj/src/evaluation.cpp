#include "rqe/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rqe/error.hpp"
#include "rqe/numeric_format.hpp"

namespace rqe {
namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string f;
    while (in >> f) out.push_back(f);
    return out;
}

void require_nonempty(const JudgedRun& run)
{
    if (run.questions.empty()) throw InvalidInput("run contains no questions");
}

void require_threshold(int i)
{
    if (i < 2 || i > kMaxGrade) throw InvalidInput("grade threshold must be 2, 3 or 4");
}

std::size_t first_at_least(const JudgedRun& run, int i)
{
    std::size_t n = 0;
    for (const auto& q : run.questions) {
        if (!q.grades.empty() && q.grades.front() >= i) ++n;
    }
    return n;
}

int parse_grade(const std::string& s, const std::string& where)
{
    const auto g = parse_int(s);
    if (!g || *g < kMinGrade || *g > kMaxGrade) throw ParseError(where + "grade must be 1-4, got '" + s + "'");
    return static_cast<int>(*g);
}

}  // namespace

std::size_t JudgedRun::answered() const
{
    return static_cast<std::size_t>(
        std::count_if(questions.begin(), questions.end(), [](const JudgedQuestion& q) { return !q.grades.empty(); }));
}

void JudgedRun::validate() const
{
    std::set<std::string> seen;
    for (const auto& q : questions) {
        if (!seen.insert(q.qid).second) throw InvalidInput("duplicate question id: " + q.qid);
        for (int g : q.grades) {
            if (g < kMinGrade || g > kMaxGrade) {
                throw InvalidInput("question " + q.qid + ": grade out of range: " + std::to_string(g));
            }
        }
    }
}

double avg_score(const JudgedRun& run)
{
    require_nonempty(run);
    double total = 0.0;
    for (const auto& q : run.questions) {
        if (!q.grades.empty()) total += q.grades.front() - 1;
    }
    return total / static_cast<double>(run.questions.size());
}

double succ_at(const JudgedRun& run, int i)
{
    require_nonempty(run);
    require_threshold(i);
    return static_cast<double>(first_at_least(run, i)) / static_cast<double>(run.questions.size());
}

double prec_at(const JudgedRun& run, int i)
{
    require_nonempty(run);
    require_threshold(i);
    const std::size_t answered = run.answered();
    if (answered == 0) throw InvalidInput("prec@i+ is undefined when no question was answered");
    return static_cast<double>(first_at_least(run, i)) / static_cast<double>(answered);
}

double average_precision(std::span<const int> grades, std::size_t cutoff)
{
    const std::size_t limit = std::min(cutoff, grades.size());
    double sum = 0.0;
    std::size_t k = 0;
    for (std::size_t r = 0; r < limit; ++r) {
        if (grades[r] >= kCorrectGrade) {
            ++k;
            sum += static_cast<double>(k) / static_cast<double>(r + 1);
        }
    }
    return k == 0 ? 0.0 : sum / static_cast<double>(k);
}

double map_at_10(const JudgedRun& run)
{
    require_nonempty(run);
    double total = 0.0;
    for (const auto& q : run.questions) total += average_precision(q.grades, 10);
    return total / static_cast<double>(run.questions.size());
}

double mrr_at_10(const JudgedRun& run)
{
    require_nonempty(run);
    double total = 0.0;
    for (const auto& q : run.questions) {
        const std::size_t limit = std::min<std::size_t>(10, q.grades.size());
        for (std::size_t r = 0; r < limit; ++r) {
            if (q.grades[r] >= kCorrectGrade) {
                total += 1.0 / static_cast<double>(r + 1);
                break;
            }
        }
    }
    return total / static_cast<double>(run.questions.size());
}

MetricReport evaluate_run(const JudgedRun& run)
{
    run.validate();
    MetricReport r;
    r.questions = run.questions.size();
    r.answered = run.answered();
    r.avg_score_0_3 = avg_score(run);
    for (int i = 2; i <= kMaxGrade; ++i) {
        r.succ_at[i] = succ_at(run, i);
        if (r.answered > 0) r.prec_at[i] = prec_at(run, i);
    }
    r.map_at_10 = map_at_10(run);
    r.mrr_at_10 = mrr_at_10(run);
    return r;
}

nlohmann::json to_json(const MetricReport& r)
{
    nlohmann::json succ = nlohmann::json::object();
    nlohmann::json prec = nlohmann::json::object();
    for (const auto& [i, v] : r.succ_at) succ[std::to_string(i)] = v;
    for (const auto& [i, v] : r.prec_at) prec[std::to_string(i)] = v;
    return {
        {"questions", r.questions},
        {"answered", r.answered},
        {"unjudged_answers", r.unjudged},
        {"avg_score_0_3", r.avg_score_0_3},
        {"succ_at", succ},
        {"prec_at", prec},
        {"map_at_10", r.map_at_10},
        {"mrr_at_10", r.mrr_at_10},
    };
}

std::string format_report(const MetricReport& r)
{
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << "questions         " << r.questions << '\n';
    out << "answered          " << r.answered << '\n';
    out << "unjudged answers  " << r.unjudged << '\n';
    out << "avgScore(0-3)     " << r.avg_score_0_3 << '\n';
    for (const auto& [i, v] : r.succ_at) out << "succ@" << i << "+           " << v << '\n';
    for (const auto& [i, v] : r.prec_at) out << "prec@" << i << "+           " << v << '\n';
    out << "MAP@10            " << r.map_at_10 << '\n';
    out << "MRR@10            " << r.mrr_at_10 << '\n';
    return out.str();
}

AgreementResult agreement_f1(std::span<const int> reference, std::span<const int> other)
{
    if (reference.size() != other.size()) {
        throw InvalidInput("grade lists differ in length: " + std::to_string(reference.size()) + " vs " +
                           std::to_string(other.size()));
    }
    if (reference.empty()) throw InvalidInput("grade lists are empty");
    std::size_t same = 0;
    std::size_t same_partial = 0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        for (int g : {reference[i], other[i]}) {
            if (g < kMinGrade || g > kMaxGrade) throw InvalidInput("grade out of range: " + std::to_string(g));
        }
        if (reference[i] == other[i]) ++same;
        if ((reference[i] >= kCorrectGrade) == (other[i] >= kCorrectGrade)) ++same_partial;
    }
    const auto n = static_cast<double>(reference.size());
    AgreementResult r;
    r.precision = static_cast<double>(same) / n;
    r.f1 = 2.0 * r.precision / (1.0 + r.precision);
    r.partial_precision = static_cast<double>(same_partial) / n;
    r.partial_f1 = 2.0 * r.partial_precision / (1.0 + r.partial_precision);
    return r;
}

std::vector<RunEntry> parse_trec_run(const std::string& text, const std::string& origin)
{
    std::vector<RunEntry> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto f = split_fields(line);
        if (f.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        if (f.size() != 6) throw ParseError(where + "expected <qid> Q0 <pair_id> <rank> <score> <tag>");
        const auto rank = parse_int(f[3]);
        const auto score = parse_double(f[4]);
        if (!rank || *rank < 1) throw ParseError(where + "bad rank '" + f[3] + "'");
        if (!score) throw ParseError(where + "bad score '" + f[4] + "'");
        out.push_back({f[0], f[2], static_cast<int>(*rank), *score, f[5]});
    }
    return out;
}

std::optional<int> Judgments::lookup(const std::string& qid, const std::string& pair_id, int rank) const
{
    if (const auto it = by_pair.find({qid, pair_id}); it != by_pair.end()) return it->second;
    if (const auto it = by_rank.find({qid, rank}); it != by_rank.end()) return it->second;
    return std::nullopt;
}

Judgments parse_judgments(const std::string& text, const std::string& origin)
{
    Judgments j;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto f = split_fields(line);
        if (f.empty() || f[0].front() == '#') continue;
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        if (f.size() != 3) throw ParseError(where + "expected <qid>\\t<pair_id>\\t<grade>");
        const int grade = parse_grade(f[2], where);
        if (f[1].rfind("rank:", 0) == 0) {
            const auto rank = parse_int(std::string_view(f[1]).substr(5));
            if (!rank || *rank < 1) throw ParseError(where + "bad rank key '" + f[1] + "'");
            j.by_rank[{f[0], static_cast<int>(*rank)}] = grade;
        } else {
            j.by_pair[{f[0], f[1]}] = grade;
        }
    }
    return j;
}

Judgments load_judgments(const std::string& path) { return parse_judgments(read_file(path), path); }

std::vector<std::pair<std::string, std::string>> parse_questions(const std::string& text, const std::string& origin)
{
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
            throw ParseError(where + "expected <qid>\\t<question>");
        }
        std::string qid = line.substr(0, tab);
        if (!seen.insert(qid).second) throw ParseError(where + "duplicate question id " + qid);
        out.emplace_back(std::move(qid), line.substr(tab + 1));
    }
    if (out.empty()) throw ParseError(origin + ": no questions");
    return out;
}

std::vector<std::pair<std::string, std::string>> load_questions(const std::string& path)
{
    return parse_questions(read_file(path), path);
}

std::vector<int> load_grades(const std::string& path)
{
    std::istringstream in(read_file(path));
    std::vector<int> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto f = split_fields(line);
        if (f.empty() || f[0].front() == '#') continue;
        out.push_back(parse_grade(f[0], path + ":" + std::to_string(lineno) + ": "));
    }
    return out;
}

JudgedRun judge_run(std::span<const std::string> qids, std::span<const RunEntry> run, const Judgments& judgments,
                    std::size_t* unjudged)
{
    std::map<std::string, std::vector<const RunEntry*>> by_qid;
    for (const auto& e : run) by_qid[e.qid].push_back(&e);
    std::size_t missing = 0;
    JudgedRun out;
    for (const auto& qid : qids) {
        JudgedQuestion q;
        q.qid = qid;
        if (auto it = by_qid.find(qid); it != by_qid.end()) {
            auto& entries = it->second;
            std::stable_sort(entries.begin(), entries.end(),
                             [](const RunEntry* a, const RunEntry* b) { return a->rank < b->rank; });
            for (const RunEntry* e : entries) {
                const auto grade = judgments.lookup(qid, e->pair_id, e->rank);
                if (!grade) ++missing;
                q.grades.push_back(grade.value_or(kMinGrade));
            }
        }
        out.questions.push_back(std::move(q));
    }
    if (unjudged != nullptr) *unjudged = missing;
    return out;
}

}  // namespace rqe
