#include "rqe/qa_collection.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "rqe/checksum.hpp"
#include "rqe/error.hpp"
#include "rqe/text_prep.hpp"

namespace rqe {
namespace {

using nlohmann::json;

constexpr std::string_view kCollectionFormat = "rqe-collection";
constexpr int kCollectionVersion = 1;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

// Lowercase, whitespace runs collapsed to one space, trimmed.
std::string normalize_title(std::string_view s)
{
    std::string out;
    bool space = false;
    for (char c : trim(s)) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::string slug(std::string_view s)
{
    std::string out;
    for (char c : s) {
        const auto uc = static_cast<unsigned char>(c);
        if (std::isalnum(uc)) {
            out.push_back(static_cast<char>(std::tolower(uc)));
        } else if (!out.empty() && out.back() != '-') {
            out.push_back('-');
        }
    }
    while (!out.empty() && out.back() == '-') out.pop_back();
    return out;
}

std::optional<QuestionType> resolve(Category category, const std::string& name, bool strict)
{
    if (strict) {
        QuestionType t{category, name};
        return in_taxonomy(t) ? std::optional(t) : std::nullopt;
    }
    return resolve_type_alias(category, name);
}

std::string field_string(const json& obj, const char* key, const std::string& where, bool required = true)
{
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        if (required) throw ParseError(where + ": missing field '" + key + "'");
        return {};
    }
    if (!it->is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& where)
{
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
    return it->get<std::string>();
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& where)
{
    std::vector<std::string> out;
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return out;
    if (!it->is_array()) throw ParseError(where + ": field '" + key + "' must be an array");
    for (const auto& v : *it) {
        if (!v.is_string()) throw ParseError(where + ": entries of '" + key + "' must be strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

Category category_field(const json& obj, const std::string& where)
{
    const std::string text = field_string(obj, "category", where);
    const auto c = parse_category(text);
    if (!c) throw ParseError(where + ": unknown category '" + text + "'");
    return *c;
}

QAPair pair_from_json(const json& j, const std::string& where, const LoadOptions& options)
{
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    QAPair p;
    p.id = field_string(j, "id", where);
    const std::string at = where + " (id " + p.id + ")";
    p.question = field_string(j, "question", at);
    p.answer = field_string(j, "answer", at);
    p.source = field_string(j, "source", at, false);
    p.url = optional_string(j, "url", at);

    const auto focus = j.find("focus");
    if (focus == j.end() || !focus->is_object()) throw ParseError(at + ": missing object 'focus'");
    p.focus.focus = field_string(*focus, "name", at);
    p.focus.synonyms = string_list(*focus, "synonyms", at);
    p.focus.cui = optional_string(*focus, "cui", at);
    p.focus.semantic_type = optional_string(*focus, "semantic_type", at);
    p.focus.semantic_group = optional_string(*focus, "semantic_group", at);

    const auto qt = j.find("question_type");
    if (qt == j.end() || !qt->is_object()) throw ParseError(at + ": missing object 'question_type'");
    const Category category = category_field(*qt, at);
    const std::string name = field_string(*qt, "name", at);
    const auto type = resolve(category, name, options.strict);
    if (!type) {
        throw ParseError(at + ": question type '" + std::string(to_string(category)) + "/" + name +
                         "' is not in the taxonomy" + (options.strict ? " (strict mode)" : ""));
    }
    p.question_type = *type;
    return p;
}

void check_loaded(const Collection& c)
{
    if (c.pairs.empty()) throw ParseError("empty collection");
    std::set<std::string> ids;
    for (const auto& p : c.pairs) {
        if (!ids.insert(p.id).second) throw ParseError("duplicate id: " + p.id);
    }
}

namespace pt = boost::property_tree;

std::string xml_text(const pt::ptree& node, const std::string& path)
{
    const auto child = node.get_child_optional(path);
    return child ? trim(child->get_value<std::string>()) : std::string{};
}

void read_xml_document(const pt::ptree& doc, Collection& out, const LoadOptions& options)
{
    const std::string doc_id = doc.get<std::string>("<xmlattr>.id", "");
    const std::string source = doc.get<std::string>("<xmlattr>.source", "");
    std::optional<std::string> url;
    if (const auto u = doc.get_optional<std::string>("<xmlattr>.url")) url = *u;
    const std::string lower_source = normalize_title(source);
    const Category category = lower_source.find("drug") != std::string::npos ||
                                      lower_source.find("herb") != std::string::npos
                                  ? Category::Drug
                                  : Category::Disease;

    FocusAnnotation focus;
    focus.focus = xml_text(doc, "Focus");
    if (const auto ann = doc.get_child_optional("FocusAnnotations")) {
        if (const auto umls = ann->get_child_optional("UMLS")) {
            if (const auto cuis = umls->get_child_optional("CUIs")) {
                for (const auto& [tag, v] : *cuis) {
                    if (tag == "CUI") {
                        focus.cui = trim(v.get_value<std::string>());
                        break;
                    }
                }
            }
            if (const auto types = umls->get_child_optional("SemanticTypes")) {
                for (const auto& [tag, v] : *types) {
                    if (tag == "SemanticType") {
                        focus.semantic_type = trim(v.get_value<std::string>());
                        break;
                    }
                }
            }
            if (const auto group = umls->get_child_optional("SemanticGroup")) {
                focus.semantic_group = trim(group->get_value<std::string>());
            }
        }
        if (const auto syns = ann->get_child_optional("Synonyms")) {
            for (const auto& [tag, v] : *syns) {
                if (tag == "Synonym") focus.synonyms.push_back(trim(v.get_value<std::string>()));
            }
        }
    }

    const auto qa_pairs = doc.get_child_optional("QAPairs");
    if (!qa_pairs) return;
    for (const auto& [tag, node] : *qa_pairs) {
        if (tag != "QAPair") continue;
        QAPair p;
        const std::string pid = node.get<std::string>("<xmlattr>.pid", "");
        p.id = node.get<std::string>("Question.<xmlattr>.qid", doc_id + "-" + pid);
        p.question = xml_text(node, "Question");
        p.answer = xml_text(node, "Answer");
        p.source = source;
        p.url = url;
        p.focus = focus;
        const std::string label = node.get<std::string>("Question.<xmlattr>.qtype", "");
        auto type = resolve(category, label, options.strict);
        if (!type && !options.strict) type = resolve_type_alias(Category::Other, label);
        if (!type) {
            throw ParseError("document " + doc_id + ", question " + p.id + ": question type '" + label +
                             "' is not in the taxonomy" + (options.strict ? " (strict mode)" : ""));
        }
        p.question_type = *type;
        out.pairs.push_back(std::move(p));
    }
}

}  // namespace

const QAPair* Collection::find(const std::string& id) const
{
    const auto it = std::find_if(pairs.begin(), pairs.end(), [&](const QAPair& p) { return p.id == id; });
    return it == pairs.end() ? nullptr : &*it;
}

Collection parse_collection_json(const std::string& text, const LoadOptions& options)
{
    if (trim(text).empty()) throw ParseError("empty collection");
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("collection JSON parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!root.is_object()) throw ParseError("collection root must be an object");
    if (const auto f = root.find("format"); f != root.end() && (!f->is_string() || *f != kCollectionFormat)) {
        throw ParseError("not an rqe collection file");
    }
    if (const auto v = root.find("version"); v != root.end() && (!v->is_number_integer() || *v != kCollectionVersion)) {
        throw ParseError("unsupported collection version");
    }
    const auto pairs = root.find("pairs");
    if (pairs == root.end() || !pairs->is_array()) throw ParseError("collection is missing the 'pairs' array");
    Collection c;
    std::size_t i = 0;
    for (const auto& j : *pairs) {
        c.pairs.push_back(pair_from_json(j, "pair #" + std::to_string(i), options));
        ++i;
    }
    check_loaded(c);
    return c;
}

Collection parse_collection_xml(const std::string& text, const LoadOptions& options)
{
    if (trim(text).empty()) throw ParseError("empty collection");
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("collection XML parse error at line " + std::to_string(e.line()) + ": " + e.message());
    }
    Collection c;
    for (const auto& [tag, node] : tree) {
        if (tag == "Document") {
            read_xml_document(node, c, options);
        } else {
            for (const auto& [inner_tag, inner] : node) {
                if (inner_tag == "Document") read_xml_document(inner, c, options);
            }
        }
    }
    check_loaded(c);
    return c;
}

Collection load_collection(const std::string& path, CollectionFormat format, const LoadOptions& options)
{
    const std::string text = read_file(path);
    try {
        return format == CollectionFormat::Xml ? parse_collection_xml(text, options) : parse_collection_json(text, options);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Collection load_collection(const std::string& path, const LoadOptions& options)
{
    const bool xml = path.size() >= 4 && normalize_title(path.substr(path.size() - 4)) == ".xml";
    return load_collection(path, xml ? CollectionFormat::Xml : CollectionFormat::Json, options);
}

json to_json(const QAPair& p)
{
    json focus = {{"name", p.focus.focus}, {"synonyms", p.focus.synonyms}};
    if (p.focus.cui) focus["cui"] = *p.focus.cui;
    if (p.focus.semantic_type) focus["semantic_type"] = *p.focus.semantic_type;
    if (p.focus.semantic_group) focus["semantic_group"] = *p.focus.semantic_group;
    json j = {{"id", p.id},
              {"question", p.question},
              {"answer", p.answer},
              {"focus", focus},
              {"question_type", {{"category", std::string(to_string(p.question_type.category))}, {"name", p.question_type.name}}},
              {"source", p.source}};
    if (p.url) j["url"] = *p.url;
    return j;
}

json to_json(const Collection& c)
{
    json pairs = json::array();
    for (const auto& p : c.pairs) pairs.push_back(to_json(p));
    return {{"format", kCollectionFormat}, {"version", kCollectionVersion}, {"pairs", pairs}};
}

std::string serialize_collection(const Collection& c) { return to_json(c).dump(2) + "\n"; }

void save_collection(const Collection& c, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write collection: " + path);
    out << serialize_collection(c);
}

std::string collection_checksum(const Collection& c) { return sha256_hex(to_json(c).dump()); }

std::vector<Violation> validate_collection(const Collection& c, const ValidationOptions& options)
{
    std::vector<Violation> out;
    if (c.pairs.empty()) out.push_back({"", "empty collection"});
    std::set<std::string> ids;
    for (const auto& p : c.pairs) {
        auto report = [&](std::string msg) { out.push_back({p.id, std::move(msg)}); };
        if (trim(p.id).empty()) report("empty id");
        if (!ids.insert(p.id).second) report("duplicate id");
        if (text::tokenize(p.question).empty()) report("empty question");
        if (trim(p.answer).empty()) report("empty answer");
        if (trim(p.focus.focus).empty()) report("empty focus");
        if (dedup_synonyms(p.focus.synonyms).size() != p.focus.synonyms.size()) {
            report("duplicate or empty focus synonyms");
        }
        if (!in_taxonomy(p.question_type)) {
            const bool aliasable = !options.strict && resolve_type_alias(p.question_type.category, p.question_type.name);
            if (!aliasable) report("question type outside taxonomy: " + to_string(p.question_type));
        }
    }
    return out;
}

// --- generation -----------------------------------------------------------------

void PatternConfig::validate() const
{
    for (const auto& r : rules) {
        if (!in_taxonomy(r.type)) throw InvalidInput("pattern rule type outside taxonomy: " + to_string(r.type));
        std::size_t count = 0;
        for (auto pos = r.question_template.find("TOPIC"); pos != std::string::npos;
             pos = r.question_template.find("TOPIC", pos + 5)) {
            ++count;
        }
        if (count != 1) {
            throw InvalidInput("pattern template must contain exactly one TOPIC: '" + r.question_template + "'");
        }
        if (normalize_title(r.section_title).empty()) throw InvalidInput("pattern rule with empty section title");
    }
}

PatternConfig parse_pattern_config(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("pattern config parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!root.is_object()) throw ParseError("pattern config root must be an object");
    PatternConfig config;
    config.name = field_string(root, "name", "pattern config", false);
    const auto rules = root.find("rules");
    if (rules == root.end() || !rules->is_array()) throw ParseError("pattern config is missing the 'rules' array");
    std::size_t i = 0;
    for (const auto& r : *rules) {
        const std::string where = "rule #" + std::to_string(i++);
        if (!r.is_object()) throw ParseError(where + ": expected an object");
        PatternRule rule;
        const std::string match = field_string(r, "match", where, false);
        if (match.empty() || match == "exact") {
            rule.match = TitleMatch::Exact;
        } else if (match == "prefix") {
            rule.match = TitleMatch::Prefix;
        } else {
            throw ParseError(where + ": match must be 'exact' or 'prefix'");
        }
        rule.section_title = field_string(r, "section", where);
        rule.type = QuestionType{category_field(r, where), field_string(r, "type", where)};
        rule.question_template = field_string(r, "template", where);
        config.rules.push_back(std::move(rule));
    }
    try {
        config.validate();
    } catch (const InvalidInput& e) {
        throw ParseError(e.what());
    }
    return config;
}

PatternConfig load_pattern_config(const std::string& path)
{
    try {
        return parse_pattern_config(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::vector<ArticleRecord> parse_articles(const std::string& text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("articles parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (root.is_object()) root = json::array({root});
    if (!root.is_array()) throw ParseError("articles file must hold an object or an array");
    std::vector<ArticleRecord> out;
    std::size_t i = 0;
    for (const auto& a : root) {
        const std::string where = "article #" + std::to_string(i++);
        if (!a.is_object()) throw ParseError(where + ": expected an object");
        ArticleRecord rec;
        rec.topic = trim(field_string(a, "topic", where));
        if (rec.topic.empty()) throw ParseError(where + ": empty topic");
        rec.synonyms = string_list(a, "synonyms", where);
        rec.category = category_field(a, where);
        rec.source = field_string(a, "source", where, false);
        rec.url = optional_string(a, "url", where);
        const auto sections = a.find("sections");
        if (sections == a.end() || !sections->is_array()) throw ParseError(where + ": missing 'sections' array");
        for (const auto& s : *sections) {
            if (!s.is_object()) throw ParseError(where + ": sections must be objects");
            rec.sections.push_back({field_string(s, "title", where), field_string(s, "body", where)});
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<ArticleRecord> load_articles(const std::string& path)
{
    try {
        return parse_articles(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

GenerationResult generate_qa_pairs(const ArticleRecord& article, const PatternConfig& config)
{
    GenerationResult out;
    const std::string source_slug = slug(article.source).empty() ? "article" : slug(article.source);
    for (std::size_t i = 0; i < article.sections.size(); ++i) {
        const auto& section = article.sections[i];
        const std::string title = normalize_title(section.title);
        const auto rule = std::find_if(config.rules.begin(), config.rules.end(), [&](const PatternRule& r) {
            const std::string want = normalize_title(r.section_title);
            return r.match == TitleMatch::Exact ? title == want : title.rfind(want, 0) == 0;
        });
        if (rule == config.rules.end() || trim(section.body).empty()) {
            out.skipped.push_back({article.topic, section.title});
            continue;
        }
        QAPair p;
        p.id = source_slug + "_" + slug(article.topic) + "_" + std::to_string(i + 1);
        p.question = rule->question_template;
        p.question.replace(p.question.find("TOPIC"), 5, article.topic);
        p.answer = trim(section.body);
        p.focus.focus = article.topic;
        p.focus.synonyms = dedup_synonyms(article.synonyms);
        p.question_type = rule->type;
        p.source = article.source;
        p.url = article.url;
        out.pairs.push_back(std::move(p));
    }
    return out;
}

// --- pair datasets ------------------------------------------------------------------

std::vector<LabeledPair> parse_pair_dataset(const std::string& text, const std::string& origin)
{
    std::vector<LabeledPair> out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
            throw ParseError(where + "expected <premise>\\t<hypothesis>\\t<0|1>");
        }
        LabeledPair p;
        p.premise = trim(std::string_view(line).substr(0, t1));
        p.hypothesis = trim(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
        const std::string label = trim(std::string_view(line).substr(t2 + 1));
        if (p.premise.empty() || p.hypothesis.empty()) throw ParseError(where + "empty question text");
        if (label == "1") {
            p.label = true;
        } else if (label == "0") {
            p.label = false;
        } else {
            throw ParseError(where + "label must be 0 or 1, got '" + label + "'");
        }
        out.push_back(std::move(p));
    }
    if (out.empty()) throw ParseError(origin + ": empty pair dataset");
    return out;
}

std::vector<LabeledPair> load_pair_dataset(const std::string& path) { return parse_pair_dataset(read_file(path), path); }

}  // namespace rqe
