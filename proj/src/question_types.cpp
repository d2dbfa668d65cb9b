#include "rqe/question_types.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>

#include "rqe/error.hpp"
#include "rqe/text_prep.hpp"

namespace rqe {
namespace {

const std::vector<QuestionType>& inventory()
{
    static const std::vector<QuestionType> types = [] {
        std::vector<QuestionType> v;
        for (const char* name :
             {"Information", "Research", "Causes", "Treatment", "Prevention", "Diagnosis", "Prognosis",
              "Complications", "Symptoms", "Inheritance", "Susceptibility", "GeneticChanges", "Frequency",
              "Considerations", "ContactProfessional", "SupportGroups"}) {
            v.push_back({Category::Disease, name});
        }
        for (const char* name :
             {"Information", "InteractionMedications", "InteractionFood", "InteractionHerbsSupplements",
              "ImportantWarning", "SpecialInstructions", "BrandNames", "HowDoesItWork", "HowEffective",
              "Indication", "Contraindication", "LearnMore", "SideEffects", "EmergencyOverdose", "SevereReaction",
              "ForgetDose", "Dietary", "WhyGetVaccinated", "StorageDisposal", "Usage", "Dose"}) {
            v.push_back({Category::Drug, name});
        }
        v.push_back({Category::Other, "Information"});
        return v;
    }();
    return types;
}

// Lowercase ASCII alphanumerics only: "Exams and Tests" -> "examsandtests".
std::string squash(std::string_view s)
{
    std::string out;
    for (char c : s) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) out.push_back(static_cast<char>(std::tolower(uc)));
    }
    return out;
}

struct Alias {
    Category category;
    const char* label;
    const char* name;
};

constexpr std::array kAliases{
    Alias{Category::Disease, "exams and tests", "Diagnosis"},
    Alias{Category::Disease, "tests", "Diagnosis"},
    Alias{Category::Disease, "outlook", "Prognosis"},
    Alias{Category::Disease, "outlook prognosis", "Prognosis"},
    Alias{Category::Disease, "when to contact a medical professional", "ContactProfessional"},
    Alias{Category::Disease, "contact a medical professional", "ContactProfessional"},
    Alias{Category::Disease, "clinical trials", "Research"},
    Alias{Category::Disease, "research or clinical trial", "Research"},
    Alias{Category::Disease, "symptom", "Symptoms"},
    Alias{Category::Disease, "signs and symptoms", "Symptoms"},
    Alias{Category::Disease, "cause", "Causes"},
    Alias{Category::Disease, "treatments", "Treatment"},
    Alias{Category::Disease, "possible complications", "Complications"},
    Alias{Category::Disease, "risk factors", "Susceptibility"},
    Alias{Category::Disease, "support", "SupportGroups"},
    Alias{Category::Drug, "interaction with medications", "InteractionMedications"},
    Alias{Category::Drug, "interactions with medications", "InteractionMedications"},
    Alias{Category::Drug, "interaction with food", "InteractionFood"},
    Alias{Category::Drug, "interactions with food", "InteractionFood"},
    Alias{Category::Drug, "interaction with herbs and supplements", "InteractionHerbsSupplements"},
    Alias{Category::Drug, "interactions with herbs and supplements", "InteractionHerbsSupplements"},
    Alias{Category::Drug, "precautions", "SpecialInstructions"},
    Alias{Category::Drug, "brand names of combination products", "BrandNames"},
    Alias{Category::Drug, "how effective is it", "HowEffective"},
    Alias{Category::Drug, "emergency or overdose", "EmergencyOverdose"},
    Alias{Category::Drug, "forget a dose", "ForgetDose"},
    Alias{Category::Drug, "storage and disposal", "StorageDisposal"},
    Alias{Category::Drug, "other information", "LearnMore"},
    Alias{Category::Drug, "side effect", "SideEffects"},
    Alias{Category::Drug, "dosage", "Dose"},
};

std::string join(std::span<const std::string> tokens)
{
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::string_view to_string(Category c) noexcept
{
    switch (c) {
    case Category::Disease:
        return "DISEASE";
    case Category::Drug:
        return "DRUG";
    case Category::Other:
        break;
    }
    return "OTHER";
}

std::optional<Category> parse_category(std::string_view s)
{
    const std::string key = squash(s);
    if (key == "disease") return Category::Disease;
    if (key == "drug") return Category::Drug;
    if (key == "other") return Category::Other;
    return std::nullopt;
}

std::string to_string(const QuestionType& t) { return std::string(to_string(t.category)) + "/" + t.name; }

std::span<const QuestionType> taxonomy() { return inventory(); }

bool in_taxonomy(const QuestionType& t)
{
    const auto& inv = inventory();
    return std::find(inv.begin(), inv.end(), t) != inv.end();
}

QuestionType make_type(Category category, std::string_view name)
{
    QuestionType t{category, std::string(name)};
    if (!in_taxonomy(t)) {
        throw InvalidInput("unknown question type: " + to_string(t));
    }
    return t;
}

std::optional<QuestionType> resolve_type_alias(Category category, std::string_view label)
{
    const std::string key = squash(label);
    if (key.empty()) return std::nullopt;
    for (const auto& t : inventory()) {
        if (t.category == category && squash(t.name) == key) return t;
    }
    for (const auto& a : kAliases) {
        if (a.category == category && squash(a.label) == key) return make_type(category, a.name);
    }
    return std::nullopt;
}

TriggerLexicon TriggerLexicon::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open trigger lexicon: " + path);
    }
    TriggerLexicon lexicon;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string trimmed = trim(line);
        if (trimmed.empty() || trimmed.front() == '#') continue;
        const auto where = path + ":" + std::to_string(lineno) + ": ";
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos) {
            throw ParseError(where + "expected <phrase>\\t<CATEGORY>\\t<TypeName>");
        }
        const auto category = parse_category(trim(std::string_view(line).substr(t1 + 1, t2 - t1 - 1)));
        if (!category) {
            throw ParseError(where + "unknown category");
        }
        QuestionType type{*category, trim(std::string_view(line).substr(t2 + 1))};
        if (!in_taxonomy(type)) {
            throw ParseError(where + "type outside taxonomy: " + to_string(type));
        }
        try {
            lexicon.add(std::string_view(line).substr(0, t1), type);
        } catch (const InvalidInput& e) {
            throw ParseError(where + e.what());
        }
    }
    return lexicon;
}

void TriggerLexicon::add(std::string_view phrase, const QuestionType& type)
{
    if (!in_taxonomy(type)) {
        throw InvalidInput("type outside taxonomy: " + to_string(type));
    }
    const auto tokens = text::tokenize(phrase);
    if (tokens.empty()) {
        throw InvalidInput("empty trigger phrase");
    }
    entries_[join(tokens)].insert(type);
    max_tokens_ = std::max(max_tokens_, tokens.size());
}

TypeDetection detect_types_detailed(std::string_view question, const TriggerLexicon& lexicon)
{
    const auto tokens = text::tokenize(question);
    const auto& entries = lexicon.entries();
    TypeDetection out;
    std::vector<TriggerMatch> all;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::size_t longest = std::min(lexicon.max_phrase_tokens(), tokens.size() - i);
        for (std::size_t len = 1; len <= longest; ++len) {
            auto phrase = join(std::span(tokens).subspan(i, len));
            const auto it = entries.find(phrase);
            if (it == entries.end()) continue;
            out.types.insert(it->second.begin(), it->second.end());
            all.push_back({std::move(phrase), i, len});
        }
    }
    for (const auto& m : all) {
        const bool nested = std::any_of(all.begin(), all.end(), [&](const TriggerMatch& o) {
            return o.token_count > m.token_count && o.first_token <= m.first_token &&
                   m.first_token + m.token_count <= o.first_token + o.token_count;
        });
        if (!nested) out.matches.push_back(m);
    }
    return out;
}

TypeSet detect_types(std::string_view question, const TriggerLexicon& lexicon)
{
    return detect_types_detailed(question, lexicon).types;
}

int type_match_feature(const TypeSet& pq_types, const TypeSet& hq_types)
{
    if (pq_types.empty() || hq_types.empty()) return 0;
    if (pq_types == hq_types) return 2;
    const bool overlap = std::any_of(pq_types.begin(), pq_types.end(),
                                     [&](const QuestionType& t) { return hq_types.count(t) > 0; });
    return overlap ? 1 : 0;
}

std::vector<std::string> expand_triggers(const QuestionType& type, const TriggerLexicon& lexicon)
{
    if (!in_taxonomy(type)) {
        throw InvalidInput("unknown question type: " + to_string(type));
    }
    std::vector<std::string> phrases;
    // std::map iteration is already lexicographic.
    for (const auto& [phrase, types] : lexicon.entries()) {
        if (types.count(type) > 0) phrases.push_back(phrase);
    }
    return phrases;
}

std::vector<std::string> dedup_synonyms(std::span<const std::string> synonyms)
{
    std::vector<std::string> out;
    std::vector<std::string> seen;
    for (const auto& s : synonyms) {
        const std::string t = trim(s);
        if (t.empty()) continue;
        const std::string key = join(text::tokenize(t));
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        out.push_back(t);
    }
    return out;
}

}  // namespace rqe
