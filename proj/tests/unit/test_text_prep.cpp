#include <doctest.h>

#include <fstream>

#include "rqe/error.hpp"
#include "rqe/text_prep.hpp"
#include "test_support.hpp"

using namespace rqe;
using namespace rqe::text;
using rqe::testing::shared_resources;

TEST_CASE("tokenize")
{
    CHECK(tokenize("").empty());
    CHECK(tokenize("What is Tinnitus?") == Tokens{"what", "is", "tinnitus"});
    CHECK(tokenize("Wolff-Parkinson-White syndrome") == Tokens{"wolff-parkinson-white", "syndrome"});
    CHECK(tokenize("don't  stop -- 'quoted' end-") == Tokens{"don't", "stop", "quoted", "end"});
    CHECK(tokenize("a, a; A") == Tokens{"a", "a", "a"});
    // curly apostrophe folds to ASCII
    CHECK(tokenize("Parkinson’s") == Tokens{"parkinson's"});
    // decomposed e + combining acute composes to one code point
    CHECK(tokenize("Café") == tokenize("Café"));
    CHECK(tokenize("\xff\xfe bad") == Tokens{"bad"});
}

TEST_CASE("remove_stopwords")
{
    const Stoplist sl({"what", "is"});
    CHECK(remove_stopwords(Tokens{"what", "is", "tinnitus"}, sl) == Tokens{"tinnitus"});
    CHECK(remove_stopwords(Tokens{}, sl).empty());
    CHECK(remove_stopwords(Tokens{"treatment", "for", "torticollis"}, Stoplist({"for"})) ==
          Tokens{"treatment", "torticollis"});
    const Tokens t{"the", "cat", "the"};
    CHECK(remove_stopwords(t, Stoplist{}) == t);
}

TEST_CASE("porter_stem examples")
{
    CHECK(porter_stem("caresses") == "caress");
    CHECK(porter_stem("ponies") == "poni");
    CHECK(porter_stem("a") == "a");
    CHECK(porter_stem("is") == "is");
    CHECK(porter_stem("treating") == "treat");
    CHECK(porter_stem("treated") == "treat");
    CHECK(porter_stem("wolff-parkinson-white") == "wolff-parkinson-white");
    CHECK(porter_stem("cafés") == "cafés");
}

TEST_CASE("porter_stem matches the reference vocabulary")
{
    std::ifstream in(rqe::testing::test_data_path("porter_oracle.tsv"));
    REQUIRE(in);
    std::string word, stem;
    int n = 0, bad = 0;
    while (in >> word >> stem) {
        ++n;
        const std::string got = porter_stem(word);
        if (got != stem) {
            ++bad;
            MESSAGE(word << ": expected " << stem << ", got " << got);
        }
        CHECK(got.size() <= word.size());
    }
    CHECK(n > 2000);
    CHECK(bad == 0);
}

TEST_CASE("tag_pos")
{
    const PosLexicon lex({"treatment"}, {"treat"});
    CHECK(tag_pos(Tokens{"treatment"}, lex) == std::vector{PosTag::Noun});
    CHECK(tag_pos(Tokens{"treat"}, lex) == std::vector{PosTag::Verb});
    CHECK(tag_pos(Tokens{"zzzz"}, PosLexicon{}) == std::vector{PosTag::Other});
    const PosLexicon both({"cure"}, {"cure"});
    CHECK(tag_pos(Tokens{"cure"}, both) == std::vector{PosTag::Noun});
    CHECK(both.is_verb("CURE"));
    CHECK(tag_pos(Tokens{"a", "b", "c"}, lex).size() == 3);
}

TEST_CASE("preprocess")
{
    const auto& r = shared_resources();
    const auto nt = preprocess("What is the treatment?", r.stoplist, r.lexicon);
    CHECK(nt.tokens == Tokens{"what", "is", "the", "treatment"});
    CHECK(nt.content_stems == Tokens{"treatment"});
    CHECK(nt.char_form == "what is the treatment");
    CHECK(nt.tags.size() == nt.tokens.size());
    CHECK(nt == preprocess("What is the treatment?", r.stoplist, r.lexicon));

    // Porter gives "treatment" for the plural; only the verb forms share "treat".
    const auto tr = preprocess("Treatments treating treated", r.stoplist, r.lexicon);
    CHECK(tr.content_stems == Tokens{"treatment", "treat", "treat"});
}

TEST_CASE("preprocess invariants on varied input")
{
    const auto& r = shared_resources();
    for (const char* s : {"", "  ", "HELLO World!!", "Isn't it Wolff-Parkinson-White?", "ÉTUDE café",
                          "Tab\tseparated\nlines"}) {
        const auto nt = preprocess(s, r.stoplist, r.lexicon);
        for (const auto& t : nt.tokens) {
            CHECK(!t.empty());
            CHECK(t.find_first_of(" \t\n") == std::string::npos);
            CHECK(t == tokenize(t).front());
        }
        const auto survivors = remove_stopwords(nt.tokens, r.stoplist);
        REQUIRE(survivors.size() == nt.content_stems.size());
        for (std::size_t i = 0; i < survivors.size(); ++i) CHECK(porter_stem(survivors[i]) == nt.content_stems[i]);
    }
}

TEST_CASE("resource loading")
{
    const auto& r = shared_resources();
    CHECK(r.stoplist.contains("what"));
    CHECK(!r.stoplist.contains("tinnitus"));
    CHECK(r.stoplist.size() > 100);
    CHECK(r.lexicon.is_noun("treatment"));
    CHECK(r.checksum.size() == 64);

    rqe::testing::TempDir dir;
    rqe::testing::write_text(dir / "bad.tsv", "word\tADJ\n");
    CHECK_THROWS_AS(PosLexicon::load(dir / "bad.tsv"), ParseError);
    CHECK_THROWS_AS(Stoplist::load(dir / "missing.txt"), Error);
}
