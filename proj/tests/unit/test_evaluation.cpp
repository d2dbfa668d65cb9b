#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "rqe/error.hpp"
#include "rqe/evaluation.hpp"
#include "test_support.hpp"

using namespace rqe;

namespace {

JudgedRun run_of(std::vector<std::vector<int>> grades)
{
    JudgedRun r;
    int i = 0;
    for (auto& g : grades) r.questions.push_back({"q" + std::to_string(++i), std::move(g)});
    return r;
}

}  // namespace

TEST_CASE("avg_score")
{
    CHECK(avg_score(run_of({{4}, {1}})) == 1.5);
    CHECK(avg_score(run_of({{}, {}})) == 0.0);
    CHECK_THROWS_AS(avg_score(JudgedRun{}), InvalidInput);
}

TEST_CASE("succ_at and prec_at")
{
    const auto all4 = run_of({{4}, {4, 1}});
    for (int i = 2; i <= 4; ++i) CHECK(succ_at(all4, i) == 1.0);
    const auto r31 = run_of({{3}, {1}});
    CHECK(succ_at(r31, 3) == 0.5);
    CHECK(succ_at(r31, 4) == 0.0);
    for (int i = 2; i <= 4; ++i) CHECK(prec_at(r31, i) == succ_at(r31, i));

    const auto half = run_of({{4}, {}});
    CHECK(prec_at(half, 4) == 1.0);
    CHECK(succ_at(half, 4) == 0.5);
    CHECK_THROWS_AS(prec_at(run_of({{}}), 2), InvalidInput);
    CHECK_THROWS_AS(succ_at(half, 1), InvalidInput);
}

TEST_CASE("average precision, MAP, MRR")
{
    CHECK(average_precision(std::vector{4}) == 1.0);
    CHECK(average_precision(std::vector{3, 1, 4}) == doctest::Approx(5.0 / 6.0));
    CHECK(average_precision(std::vector{2, 1}) == 0.0);
    CHECK(average_precision(std::vector{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 4}) == 0.0);

    const auto all_first = run_of({{4, 1}, {3}, {3, 4}});
    CHECK(mrr_at_10(all_first) == 1.0);
    CHECK(map_at_10(run_of({{4, 1}, {3}})) == 1.0);
    CHECK(mrr_at_10(run_of({{1, 3}, {}})) == 0.25);
    CHECK_THROWS_AS(map_at_10(JudgedRun{}), InvalidInput);
}

TEST_CASE("metric properties on random runs")
{
    std::mt19937_64 rng(17);
    for (int iter = 0; iter < 300; ++iter) {
        JudgedRun r;
        const int q = 1 + static_cast<int>(rng() % 30);
        bool any_unanswered = false;
        bool single_correct = true;
        for (int i = 0; i < q; ++i) {
            JudgedQuestion jq{"q" + std::to_string(i), {}};
            const int n = static_cast<int>(rng() % 12);
            for (int k = 0; k < n; ++k) jq.grades.push_back(1 + static_cast<int>(rng() % 4));
            any_unanswered = any_unanswered || n == 0;
            int correct = 0;
            for (std::size_t k = 0; k < jq.grades.size() && k < 10; ++k) correct += jq.grades[k] >= 3;
            single_correct = single_correct && correct <= 1;
            r.questions.push_back(std::move(jq));
        }
        CHECK(succ_at(r, 3) <= succ_at(r, 2));
        CHECK(succ_at(r, 4) <= succ_at(r, 3));
        CHECK(avg_score(r) == doctest::Approx(succ_at(r, 2) + succ_at(r, 3) + succ_at(r, 4)).epsilon(1e-12));
        if (r.answered() > 0) {
            for (int i = 2; i <= 4; ++i) {
                if (any_unanswered) CHECK(prec_at(r, i) >= succ_at(r, i));
                else CHECK(prec_at(r, i) == succ_at(r, i));
            }
        }
        const double map = map_at_10(r), mrr = mrr_at_10(r);
        CHECK(map >= 0.0);
        CHECK(map <= 1.0);
        CHECK(mrr >= 0.0);
        CHECK(mrr <= 1.0);
        if (single_correct) CHECK(map == doctest::Approx(mrr).epsilon(1e-12));

        const auto report = evaluate_run(r);
        CHECK(report.avg_score_0_3 >= 0.0);
        CHECK(report.avg_score_0_3 <= 3.0);
    }
}

TEST_CASE("agreement")
{
    const std::vector<int> a{4, 3, 2, 1};
    auto r = agreement_f1(a, a);
    CHECK(r.precision == 1.0);
    CHECK(r.f1 == 1.0);
    CHECK(r.partial_f1 == 1.0);

    r = agreement_f1(a, std::vector<int>{3, 4, 2, 1});
    CHECK(r.partial_f1 == 1.0);
    CHECK(r.f1 < 1.0);
    CHECK(r.f1 == doctest::Approx(2 * 0.5 / 1.5));

    CHECK_THROWS_AS(agreement_f1(a, std::vector<int>{1}), InvalidInput);
}

TEST_CASE("agreement on the shipped assessor lists")
{
    const auto a = load_grades(rqe::testing::data_path("agreement/assessor_a.txt"));
    const auto b = load_grades(rqe::testing::data_path("agreement/assessor_b.txt"));
    REQUIRE(a.size() == b.size());
    const auto r = agreement_f1(a, b);
    CHECK(std::round(r.f1 * 10000) / 100 == doctest::Approx(89.38));
    CHECK(std::round(r.partial_f1 * 10000) / 100 == doctest::Approx(94.81));
}

TEST_CASE("run and judgment files")
{
    const auto run = parse_trec_run("q1 Q0 p1 1 0.9 t\n\nq1 Q0 p2 2 0.5 t\nq2 Q0 p3 1 0.7 t\n");
    REQUIRE(run.size() == 3);
    CHECK_THROWS_AS(parse_trec_run("q1 Q0 p1 one 0.9 t\n"), ParseError);
    CHECK_THROWS_AS(parse_trec_run("q1 Q0 p1 1\n"), ParseError);

    const auto j = parse_judgments("# header\nq1\tp1\t4\nq1\trank:2\t3\nq2\tp3\t2\n");
    CHECK(j.lookup("q1", "p1", 1) == 4);
    CHECK(j.lookup("q1", "whatever", 2) == 3);
    CHECK(!j.lookup("q9", "p1", 1));
    CHECK_THROWS_AS(parse_judgments("q1\tp1\t5\n"), ParseError);
    CHECK_THROWS_AS(parse_judgments("q1\tp1\n"), ParseError);

    std::size_t unjudged = 0;
    const std::vector<std::string> qids{"q1", "q2", "q3"};
    const auto judged = judge_run(qids, run, j, &unjudged);
    REQUIRE(judged.questions.size() == 3);
    CHECK(judged.questions[0].grades == std::vector<int>{4, 3});
    CHECK(judged.questions[1].grades == std::vector<int>{2});
    CHECK(judged.questions[2].grades.empty());
    CHECK(unjudged == 0);

    const auto partial = judge_run(qids, parse_trec_run("q3 Q0 px 1 1 t\n"), j, &unjudged);
    CHECK(partial.questions[2].grades == std::vector<int>{1});
    CHECK(unjudged == 1);
}

TEST_CASE("question files")
{
    const auto q = parse_questions("q1\tWhat is acne?\n\nq2\tWhat is gout?\n");
    REQUIRE(q.size() == 2);
    CHECK(q[1].second == "What is gout?");
    CHECK_THROWS_AS(parse_questions(""), ParseError);
    CHECK_THROWS_AS(parse_questions("q1\ta\nq1\tb\n"), ParseError);
    CHECK_THROWS_AS(parse_questions("no tab here\n"), ParseError);
}

TEST_CASE("report output")
{
    const auto r = evaluate_run(run_of({{4, 3}, {}}));
    CHECK(r.questions == 2);
    CHECK(r.answered == 1);
    const auto j = to_json(r);
    CHECK(j["map_at_10"] == 0.5);
    CHECK(j["succ_at"]["4"] == 0.5);
    CHECK(nlohmann::json::parse(j.dump()) == j);
    CHECK(format_report(r).find("MAP@10            0.5000") != std::string::npos);
    CHECK(evaluate_run(run_of({{}})).prec_at.empty());

    JudgedRun bad = run_of({{7}});
    CHECK_THROWS_AS(evaluate_run(bad), InvalidInput);
}
