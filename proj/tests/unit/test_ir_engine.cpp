#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <random>

#include "rqe/error.hpp"
#include "rqe/ir_engine.hpp"
#include "rqe/numeric_format.hpp"
#include "test_support.hpp"

using namespace rqe;
using rqe::testing::data_path;
using rqe::testing::shared_resources;

namespace {

using Terms = std::vector<std::string>;

InvertedIndex toy(const std::vector<std::pair<std::string, Terms>>& docs)
{
    std::vector<QuestionDocument> d;
    for (const auto& [id, terms] : docs) d.push_back({id, terms});
    return InvertedIndex::from_documents(d);
}

const Collection& sample()
{
    static const Collection c = load_collection(data_path("sample/collection.json"));
    return c;
}

bool contains(const Terms& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

}  // namespace

TEST_CASE("document expansion of the Torticollis treatment question")
{
    const auto& r = shared_resources();
    const QAPair* p = sample().find("torticollis_treatment");
    REQUIRE(p != nullptr);
    CHECK(p->question == "What are the treatments for Torticollis ?");
    const auto doc = expand_document(*p, r);
    for (const char* synonym : {"spasmod", "wry", "neck", "loxia", "cervic", "dystonia"}) CHECK(contains(doc.indexed_terms, synonym));
    for (const char* trigger : {"reliev", "manag", "cure", "remedi", "therapi"}) CHECK(contains(doc.indexed_terms, trigger));
    CHECK(contains(doc.indexed_terms, "torticolli"));
    // answers are not indexed
    for (const auto& w : text::content_stems(p->answer, r.stoplist)) {
        if (!contains(text::content_stems(p->question, r.stoplist), w)) {
            bool elsewhere = false;
            for (const auto& s : p->focus.synonyms) elsewhere = elsewhere || contains(text::content_stems(s, r.stoplist), w);
            for (const auto& t : expand_triggers(p->question_type, r.triggers)) elsewhere = elsewhere || contains(text::content_stems(t, r.stoplist), w);
            if (!elsewhere) CHECK_MESSAGE(!contains(doc.indexed_terms, w), w);
        }
    }
}

TEST_CASE("index statistics")
{
    const auto one = toy({{"only", {"a", "b", "a"}}});
    CHECK(one.doc_count() == 1);
    for (const auto& t : one.terms()) CHECK(one.stats(t).document_frequency == 1);
    CHECK(one.stats("a").collection_frequency == 2);
    CHECK(one.avg_doc_length() == 3.0);
    CHECK(one.postings("zzz").empty());

    CHECK_THROWS_AS(InvertedIndex::build(Collection{}, shared_resources()), InvalidInput);
    CHECK_THROWS_AS(toy({{"x", {"a"}}, {"x", {"b"}}}), InvalidInput);
}

TEST_CASE("sample index matches the independent recount")
{
    const auto index = InvertedIndex::build(sample(), shared_resources());
    std::ifstream in(rqe::testing::test_data_path("golden_index_stats.tsv"));
    REQUIRE(in);
    std::string line;
    std::size_t terms = 0;
    while (std::getline(in, line)) {
        const auto f = rqe::testing::split_tabs(line);
        if (f[0] == "N") {
            CHECK(index.doc_count() == std::stoul(f[1]));
        } else if (f[0] == "avg_dl") {
            CHECK(index.avg_doc_length() == doctest::Approx(*parse_double(f[1])).epsilon(1e-15));
        } else {
            ++terms;
            const auto s = index.stats(f[0]);
            INFO(f[0]);
            CHECK(s.document_frequency == std::stoul(f[1]));
            CHECK(s.collection_frequency == std::stoul(f[2]));
        }
    }
    CHECK(index.vocabulary_size() == terms);
}

TEST_CASE("index invariants and determinism")
{
    const auto& r = shared_resources();
    const auto a = InvertedIndex::build(sample(), r);
    const auto b = InvertedIndex::build(sample(), r);
    CHECK(a == b);
    CHECK(a.serialize() == b.serialize());
    for (const auto& t : a.terms()) {
        const auto p = a.postings(t);
        const auto s = a.stats(t);
        std::uint64_t cf = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            cf += p[i].tf;
            if (i > 0) CHECK(p[i - 1].doc < p[i].doc);
        }
        CHECK(s.document_frequency == p.size());
        CHECK(s.collection_frequency == cf);
        CHECK(s.document_frequency <= a.doc_count());
        CHECK(s.collection_frequency >= s.document_frequency);
    }
    std::uint64_t total = 0;
    for (DocId d = 0; d < a.doc_count(); ++d) total += a.doc_length(d);
    CHECK(a.avg_doc_length() == doctest::Approx(static_cast<double>(total) / a.doc_count()));
}

TEST_CASE("binary persistence")
{
    const auto& r = shared_resources();
    const auto index = InvertedIndex::build(sample(), r);
    rqe::testing::TempDir dir;
    index.save(dir / "i.bin");
    const auto loaded = InvertedIndex::load(dir / "i.bin");
    CHECK(loaded == index);

    auto bytes = index.serialize();
    CHECK(bytes.rfind("RQEINDEX", 0) == 0);
    CHECK_THROWS_AS(InvertedIndex::deserialize(bytes.substr(0, bytes.size() - 3)), ParseError);
    CHECK_THROWS_AS(InvertedIndex::deserialize(bytes + "x"), ParseError);
    auto wrong_version = bytes;
    wrong_version[8] = 9;
    CHECK_THROWS_AS(InvertedIndex::deserialize(wrong_version), ParseError);
    CHECK_THROWS_AS(InvertedIndex::deserialize("NOTINDEX"), ParseError);
}

TEST_CASE("stale index detection")
{
    const auto& r = shared_resources();
    const auto index = InvertedIndex::build(sample(), r);
    CHECK_NOTHROW(check_index_fresh(index, sample(), r));
    Collection changed = sample();
    changed.pairs[0].answer += " Updated.";
    CHECK_THROWS_AS(check_index_fresh(index, changed, r), StaleIndexError);
    CHECK_NOTHROW(check_index_fresh(index, changed, r, true));
}

TEST_CASE("tf-idf")
{
    const auto index = toy({{"d1", {"x", "x", "y"}}, {"d2", {"x", "z", "y"}}, {"d3", {"w"}}});
    CHECK(score_tfidf(Terms{"absent"}, index).empty());
    const auto r = score_tfidf(Terms{"x"}, index);
    REQUIRE(r.size() == 2);
    CHECK(r[0].pair_id == "d1");
    CHECK(r[0].score == doctest::Approx(2 * std::log(1 + 3.0 / 2)));
    CHECK(tfidf_term_weight(1, 4, 2) == doctest::Approx(std::log(3.0)));
    // qtf multiplies
    CHECK(score_tfidf(Terms{"x", "x"}, index)[0].score == doctest::Approx(2 * r[0].score));
}

TEST_CASE("In_expB2 closed form")
{
    CHECK(inexpb2_term_weight(1, 1, 1, 1, 1, 1, 1.0) == doctest::Approx(std::log2(4.0 / 3.0)).epsilon(1e-15));
    const auto index = toy({{"only", {"t"}}});
    const auto r = score_inexpb2(Terms{"t"}, index);
    REQUIRE(r.size() == 1);
    CHECK(r[0].score == doctest::Approx(std::log2(4.0 / 3.0)));
    double last = 0.0;
    for (int tf = 1; tf <= 30; ++tf) {
        const double w = inexpb2_term_weight(tf, 10, 8, 50, 5, 40, 1.0);
        CHECK(w > last);
        last = w;
    }
    CHECK_THROWS_AS(score_inexpb2(Terms{"t"}, index, 0.0), InvalidInput);
}

TEST_CASE("three-document toy corpus matches the frozen oracle")
{
    std::ifstream in(rqe::testing::test_data_path("golden_toy_scores.tsv"));
    REQUIRE(in);
    std::string line;
    Terms query;
    std::vector<std::pair<std::string, Terms>> docs;
    std::map<std::string, std::pair<double, double>> expected;
    while (std::getline(in, line)) {
        if (line.rfind("# query: ", 0) == 0) {
            query = text::tokenize(line.substr(9));
            continue;
        }
        const auto f = rqe::testing::split_tabs(line);
        Terms terms;
        std::istringstream ts(f[1]);
        for (std::string t; ts >> t;) terms.push_back(t);
        docs.emplace_back(f[0], terms);
        expected[f[0]] = {*parse_double(f[2]), *parse_double(f[3])};
    }
    REQUIRE(docs.size() == 3);
    const auto index = toy(docs);
    for (const auto& s : score_tfidf(query, index)) CHECK(s.score == doctest::Approx(expected[s.pair_id].first).epsilon(1e-12));
    for (const auto& s : score_inexpb2(query, index)) CHECK(s.score == doctest::Approx(expected[s.pair_id].second).epsilon(1e-12));
    CHECK(score_tfidf(query, index).size() == 3);
}

TEST_CASE("fuse")
{
    const RetrievalResult a{{"d1", 2.0}, {"d2", 1.0}};
    const RetrievalResult b{{"d1", 3.0}};
    const auto f = fuse(a, b);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == ScoredDoc{"d1", 5.0});
    CHECK(f[1] == ScoredDoc{"d2", 1.0});
    CHECK(fuse(RetrievalResult{}, RetrievalResult{}).empty());
    CHECK(fuse(a, b) == fuse(b, a));

    RetrievalResult tied{{"b", 1.0}, {"a", 1.0}, {"c", 2.0}};
    sort_result(tied);
    CHECK(tied[0].pair_id == "c");
    CHECK(tied[1].pair_id == "a");
}

TEST_CASE("retrieve_candidates on the sample")
{
    const auto& r = shared_resources();
    const auto index = InvertedIndex::build(sample(), r);
    const auto res = retrieve_candidates("What is the outlook for Legionnaire disease?", index, r);
    REQUIRE(!res.empty());
    CHECK(res[0].pair_id == "legionnaire_prognosis");
    CHECK(res.size() <= 100);
    CHECK(RetrievalConfig{}.n_max == 100);

    CHECK(retrieve_candidates("zebra quantum xylophone", index, r).empty());

    RetrievalConfig small;
    small.n_max = 3;
    const auto top = retrieve_candidates("What is the outlook for Legionnaire disease?", index, r, small);
    REQUIRE(top.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(top[static_cast<std::size_t>(i)] == res[static_cast<std::size_t>(i)]);

    const auto q = text::preprocess("What is the outlook for Legionnaire disease?", r.stoplist, r.lexicon);
    CHECK(res == fuse(score_tfidf(q, index), score_inexpb2(q, index)));
}

TEST_CASE("scores never drop when a query term is added to a document")
{
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<std::pair<std::string, Terms>> docs;
        const int n = 2 + static_cast<int>(rng() % 6);
        for (int d = 0; d < n; ++d) {
            Terms t;
            const int len = 1 + static_cast<int>(rng() % 6);
            for (int k = 0; k < len; ++k) t.push_back(std::string(1, static_cast<char>('a' + rng() % 5)));
            docs.emplace_back("d" + std::to_string(d), t);
        }
        const Terms query{"a"};
        auto bumped = docs;
        bumped[0].second.push_back("a");
        auto score_of = [](const RetrievalResult& r, const std::string& id) {
            for (const auto& s : r) {
                if (s.pair_id == id) return s.score;
            }
            return 0.0;
        };
        const auto before = toy(docs);
        const auto after = toy(bumped);
        CHECK(score_of(score_tfidf(query, after), "d0") >= score_of(score_tfidf(query, before), "d0"));
        for (const auto& s : score_inexpb2(query, before)) CHECK(s.score >= 0.0);
    }
}
