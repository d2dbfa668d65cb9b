#include <doctest.h>

#include <algorithm>
#include <random>

#include "rqe/error.hpp"
#include "rqe/question_types.hpp"
#include "rqe/text_prep.hpp"
#include "test_support.hpp"

using namespace rqe;
using rqe::testing::shared_resources;

namespace {

QuestionType disease(const char* name) { return make_type(Category::Disease, name); }

bool contains(const std::vector<std::string>& v, const std::string& s)
{
    return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_CASE("taxonomy inventory")
{
    const auto tax = taxonomy();
    CHECK(tax.size() == 38);
    CHECK(std::count_if(tax.begin(), tax.end(), [](auto& t) { return t.category == Category::Disease; }) == 16);
    CHECK(std::count_if(tax.begin(), tax.end(), [](auto& t) { return t.category == Category::Drug; }) == 21);
    CHECK(std::count_if(tax.begin(), tax.end(), [](auto& t) { return t.category == Category::Other; }) == 1);
    CHECK(in_taxonomy(disease("GeneticChanges")));
    CHECK(in_taxonomy(make_type(Category::Drug, "WhyGetVaccinated")));
    CHECK(!in_taxonomy({Category::Other, "Treatment"}));
    CHECK_THROWS_AS(make_type(Category::Disease, "Dose"), InvalidInput);
    CHECK(to_string(disease("Prognosis")) == "DISEASE/Prognosis");
    CHECK(parse_category("drug") == Category::Drug);
    CHECK(!parse_category("animal"));
}

TEST_CASE("alias resolution")
{
    CHECK(resolve_type_alias(Category::Disease, "exams and tests") == disease("Diagnosis"));
    CHECK(resolve_type_alias(Category::Disease, "Outlook") == disease("Prognosis"));
    CHECK(resolve_type_alias(Category::Disease, "genetic changes") == disease("GeneticChanges"));
    CHECK(resolve_type_alias(Category::Drug, "side effects") == make_type(Category::Drug, "SideEffects"));
    CHECK(!resolve_type_alias(Category::Disease, "astrology"));
}

TEST_CASE("detect_types")
{
    const auto& trig = shared_resources().triggers;
    CHECK(detect_types("What is the outlook for Legionnaire disease?", trig) == TypeSet{disease("Prognosis")});
    CHECK(detect_types("how many people are affected by DISEASE", trig) == TypeSet{disease("Frequency")});
    CHECK(detect_types("hello world", trig).empty());
    // token boundaries, not substrings
    TriggerLexicon small;
    small.add("cure", disease("Treatment"));
    CHECK(detect_types("Is it cured?", small).empty());
    CHECK(detect_types("Is there a CURE?", small) == TypeSet{disease("Treatment")});
}

TEST_CASE("nested trigger matches")
{
    TriggerLexicon lex;
    lex.add("how many people", disease("Frequency"));
    lex.add("people", disease("SupportGroups"));
    const auto d = detect_types_detailed("How many people get it?", lex);
    CHECK(d.types == TypeSet{disease("Frequency"), disease("SupportGroups")});
    REQUIRE(d.matches.size() == 1);
    CHECK(d.matches[0].phrase == "how many people");
    CHECK(d.matches[0].first_token == 0);
    CHECK(d.matches[0].token_count == 3);
}

TEST_CASE("type_match_feature")
{
    const TypeSet t{disease("Treatment")};
    const TypeSet tc{disease("Treatment"), disease("Causes")};
    CHECK(type_match_feature(t, t) == 2);
    CHECK(type_match_feature(tc, t) == 1);
    CHECK(type_match_feature(t, tc) == 1);
    CHECK(type_match_feature({disease("Causes")}, {disease("Prognosis")}) == 0);
    CHECK(type_match_feature({}, {}) == 0);
    CHECK(type_match_feature({}, t) == 0);
}

TEST_CASE("expand_triggers")
{
    const auto& trig = shared_resources().triggers;
    const auto treat = expand_triggers(disease("Treatment"), trig);
    for (const char* w : {"relieve", "manage", "cure", "remedy", "therapy"}) CHECK(contains(treat, w));
    CHECK(std::is_sorted(treat.begin(), treat.end()));
    const auto prog = expand_triggers(disease("Prognosis"), trig);
    CHECK(contains(prog, "prognosis"));
    CHECK(contains(prog, "life expectancy"));

    TriggerLexicon minimal;
    minimal.add("cure", disease("Treatment"));
    CHECK(expand_triggers(disease("Causes"), minimal).empty());
    CHECK_THROWS_AS(expand_triggers({Category::Disease, "Nope"}, minimal), InvalidInput);
}

TEST_CASE("trigger lexicon validation")
{
    TriggerLexicon lex;
    CHECK_THROWS_AS(lex.add("?!", disease("Treatment")), InvalidInput);
    CHECK_THROWS_AS(lex.add("x", {Category::Disease, "Nope"}), InvalidInput);
    lex.add("Life   Expectancy", disease("Prognosis"));
    CHECK(lex.entries().count("life expectancy") == 1);
    CHECK(lex.max_phrase_tokens() == 2);

    rqe::testing::TempDir dir;
    rqe::testing::write_text(dir / "t.tsv", "# c\ncure\tDISEASE\tTreatment\nfoo\tDISEASE\tNope\n");
    try {
        TriggerLexicon::load(dir / "t.tsv");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
}

TEST_CASE("every lexicon entry is a valid taxonomy member")
{
    for (const auto& [phrase, types] : shared_resources().triggers.entries()) {
        CHECK(!phrase.empty());
        CHECK(text::tokenize(phrase).size() >= 1);
        for (const auto& t : types) CHECK(in_taxonomy(t));
    }
}

TEST_CASE("properties: symmetry, monotonicity, round trip")
{
    const auto& full = shared_resources().triggers;
    std::vector<std::pair<std::string, TypeSet>> entries(full.entries().begin(), full.entries().end());
    std::mt19937_64 rng(7);
    const std::vector<std::string> filler{"what", "is", "the", "for", "my", "mother", "disease", "drug", "and", "of"};

    for (int iter = 0; iter < 300; ++iter) {
        std::string q;
        const int words = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < words; ++i) {
            if (rng() % 3 == 0) q += entries[rng() % entries.size()].first;
            else q += filler[rng() % filler.size()];
            q += ' ';
        }
        const TypeSet types = detect_types(q, full);

        // round trip
        const auto tokens = text::tokenize(q);
        std::string joined = " ";
        for (const auto& t : tokens) joined += t + " ";
        for (const auto& t : types) {
            bool found = false;
            for (const auto& p : expand_triggers(t, full)) found = found || joined.find(" " + p + " ") != std::string::npos;
            CHECK(found);
        }

        // a lexicon with a subset of the entries detects a subset of the types
        TriggerLexicon half;
        for (std::size_t i = 0; i < entries.size(); i += 2) {
            for (const auto& t : entries[i].second) half.add(entries[i].first, t);
        }
        const TypeSet fewer = detect_types(q, half);
        CHECK(std::includes(types.begin(), types.end(), fewer.begin(), fewer.end()));

        const TypeSet other = detect_types(filler[rng() % filler.size()] + " " + entries[rng() % entries.size()].first, full);
        CHECK(type_match_feature(types, other) == type_match_feature(other, types));
        CHECK((type_match_feature(types, other) == 2) == (!types.empty() && types == other));
    }
}

TEST_CASE("dedup_synonyms")
{
    const std::vector<std::string> in{"Wry neck", "", "wry NECK", "Loxia"};
    CHECK(dedup_synonyms(in) == std::vector<std::string>{"Wry neck", "Loxia"});
}
