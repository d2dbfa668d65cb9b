#include <doctest.h>

#include <cmath>
#include <fstream>

#include "rqe/error.hpp"
#include "rqe/numeric_format.hpp"
#include "rqe/rqe_classifier.hpp"
#include "rqe/similarity_features.hpp"
#include "test_support.hpp"

using namespace rqe;
using rqe::testing::shared_resources;

namespace {

text::NormalizedText stems(std::vector<std::string> s)
{
    text::NormalizedText t;
    t.content_stems = std::move(s);
    return t;
}

text::NormalizedText chars(std::string s)
{
    text::NormalizedText t;
    t.char_form = std::move(s);
    return t;
}

text::NormalizedText prep(const std::string& s)
{
    const auto& r = shared_resources();
    return text::preprocess(s, r.stoplist, r.lexicon);
}

}  // namespace

TEST_CASE("word_overlap")
{
    CHECK(features::word_overlap(stems({"tinnitus"}), stems({"tinnitus"})) == 1.0);
    CHECK(features::word_overlap(stems({"a", "b", "c"}), stems({"b", "c", "d"})) == doctest::Approx(2.0 / 3));
    CHECK(features::word_overlap(stems({}), stems({"a"})) == 0.0);
}

TEST_CASE("dice_bigram")
{
    CHECK(features::dice_bigram(stems({"x", "y"}), stems({"x", "y"})) == 1.0);
    CHECK(features::dice_bigram(stems({"x", "y"}), stems({"y", "x"})) == 0.0);
    CHECK(features::dice_bigram(stems({"a", "b", "c"}), stems({"b", "c", "d"})) == 0.5);
    CHECK(features::dice_bigram(stems({"a"}), stems({"b"})) == 0.0);
}

TEST_CASE("cosine")
{
    CHECK(features::cosine_sim(stems({"a", "b", "a"}), stems({"b", "a", "a"})) == 1.0);
    CHECK(features::cosine_sim(stems({"a"}), stems({"b"})) == 0.0);
    CHECK(features::cosine_sim(stems({"x", "y"}), stems({"x"})) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(features::cosine_sim(stems({}), stems({"x"})) == 0.0);
}

TEST_CASE("levenshtein")
{
    CHECK(features::edit_distance("kitten", "sitting") == 3);
    CHECK(features::levenshtein_sim(chars("kitten"), chars("sitting")) == doctest::Approx(1.0 - 3.0 / 7));
    CHECK(features::levenshtein_sim(chars("same"), chars("same")) == 1.0);
    CHECK(features::levenshtein_sim(chars(""), chars("abc")) == 0.0);
    CHECK(features::levenshtein_sim(chars(""), chars("")) == 1.0);
    // code points, not bytes
    CHECK(features::edit_distance("café", "cafe") == 1);
}

TEST_CASE("jaccard")
{
    CHECK(features::jaccard(stems({"a", "b"}), stems({"b", "a"})) == 1.0);
    CHECK(features::jaccard(stems({"a", "b", "c"}), stems({"b", "c", "d"})) == 0.5);
    CHECK(features::jaccard(stems({"a"}), stems({"b"})) == 0.0);
    CHECK(features::jaccard(stems({}), stems({})) == 0.0);
}

TEST_CASE("morpho_overlap")
{
    const text::PosLexicon lex({"treatment", "fever", "cough", "rash"}, {"treat"});
    const text::Stoplist none;
    auto p = [&](const char* s) { return text::preprocess(s, none, lex); };
    CHECK(features::morpho_overlap(p("fever"), p("rash")) == 0);
    CHECK(features::morpho_overlap(p("treatment to treat"), p("treat with treatment")) == 2);
    CHECK(features::morpho_overlap(p("fever cough rash treat"), p("fever cough rash treat")) == 4);
}

TEST_CASE("length_ratio")
{
    CHECK(features::length_ratio(prep("one two three four five six seven eight nine ten"), prep("a b c d e")) == 2.0);
    CHECK(features::length_ratio(prep("a b"), prep("c d")) == 1.0);
    CHECK_THROWS_AS(features::length_ratio(prep("a b"), prep("?!")), InvalidInput);
}

TEST_CASE("extract_features identity and disjoint pairs")
{
    const auto& r = shared_resources();
    const auto same = extract_features("What are the treatments for Torticollis?", "What are the treatments for Torticollis?", r);
    CHECK(same.word_overlap == 1.0);
    CHECK(same.dice_bigram == 1.0);
    CHECK(same.cosine == 1.0);
    CHECK(same.levenshtein_sim == 1.0);
    CHECK(same.jaccard == 1.0);
    CHECK(same.sim_max == 1.0);
    CHECK(same.sim_avg == 1.0);
    CHECK(same.length_ratio == 1.0);
    CHECK(same.type_match == 2);

    const auto diff = extract_features("How is glaucoma diagnosed?", "What causes tinnitus?", r);
    CHECK(diff.word_overlap == 0.0);
    CHECK(diff.dice_bigram == 0.0);
    CHECK(diff.cosine == 0.0);
    CHECK(diff.jaccard == 0.0);
    CHECK(diff.type_match == 0);
    CHECK(diff.levenshtein_sim >= 0.0);

    CHECK_THROWS_AS(extract_features("What?", "...", r), InvalidInput);
}

TEST_CASE("feature vectors match the frozen oracle")
{
    const auto& r = shared_resources();
    auto model = load_model(rqe::testing::data_path("sample/reference_model.txt"));
    std::ifstream in(rqe::testing::test_data_path("golden_features.tsv"));
    REQUIRE(in);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        const auto f = rqe::testing::split_tabs(line);
        REQUIRE(f.size() == 13);
        const auto fv = extract_features(f[0], f[1], r);
        const auto got = fv.as_array();
        INFO(f[0] << " | " << f[1]);
        for (int i = 0; i < kFeatureCount; ++i) {
            CHECK(got(i) == doctest::Approx(*parse_double(f[static_cast<std::size_t>(i) + 2])).epsilon(1e-12));
        }
        CHECK(predict_proba(model, fv) == doctest::Approx(*parse_double(f[12])).epsilon(1e-12));
        ++rows;
    }
    CHECK(rows >= 20);
}

TEST_CASE("tsv record")
{
    FeatureVector fv;
    fv.word_overlap = 0.5;
    fv.type_match = 2;
    const auto tsv = to_tsv(fv);
    CHECK(tsv.rfind("0.5\t", 0) == 0);
    CHECK(std::count(tsv.begin(), tsv.end(), '\t') == kFeatureCount - 1);
    CHECK(feature_tsv_header().rfind("word_overlap\tdice_bigram", 0) == 0);
    CHECK(FeatureVector::from_array(fv.as_array()) == fv);
}
