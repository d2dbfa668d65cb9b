#include "rqe/similarity_features.hpp"

#include <unicode/utf8.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "rqe/error.hpp"
#include "rqe/numeric_format.hpp"

namespace rqe {
namespace {

std::set<std::string> stem_set(const text::NormalizedText& t)
{
    return {t.content_stems.begin(), t.content_stems.end()};
}

std::set<std::pair<std::string, std::string>> bigram_set(const text::NormalizedText& t)
{
    std::set<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i + 1 < t.content_stems.size(); ++i) {
        out.emplace(t.content_stems[i], t.content_stems[i + 1]);
    }
    return out;
}

template <class Set>
std::size_t intersection_size(const Set& a, const Set& b)
{
    std::size_t n = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++n;
            ++ia;
            ++ib;
        }
    }
    return n;
}

std::vector<UChar32> code_points(std::string_view s)
{
    std::vector<UChar32> out;
    out.reserve(s.size());
    const auto* p = reinterpret_cast<const uint8_t*>(s.data());
    const auto len = static_cast<int32_t>(s.size());
    for (int32_t i = 0; i < len;) {
        UChar32 c = 0;
        U8_NEXT(p, i, len, c);
        out.push_back(c);
    }
    return out;
}

std::set<std::string> tagged_stems(const text::NormalizedText& t, text::PosTag tag)
{
    std::set<std::string> out;
    for (std::size_t i = 0; i < t.tokens.size() && i < t.tags.size(); ++i) {
        if (t.tags[i] == tag) out.insert(text::porter_stem(t.tokens[i]));
    }
    return out;
}

}  // namespace

FeatureArray<double> FeatureVector::as_array() const
{
    FeatureArray<double> a;
    a << word_overlap, dice_bigram, cosine, levenshtein_sim, jaccard, sim_max, sim_avg, length_ratio,
        static_cast<double>(morpho_overlap), static_cast<double>(type_match);
    return a;
}

FeatureVector FeatureVector::from_array(const FeatureArray<double>& a)
{
    FeatureVector fv;
    fv.word_overlap = a[0];
    fv.dice_bigram = a[1];
    fv.cosine = a[2];
    fv.levenshtein_sim = a[3];
    fv.jaccard = a[4];
    fv.sim_max = a[5];
    fv.sim_avg = a[6];
    fv.length_ratio = a[7];
    fv.morpho_overlap = static_cast<int>(std::lround(a[8]));
    fv.type_match = static_cast<int>(std::lround(a[9]));
    return fv;
}

namespace features {

double word_overlap(const text::NormalizedText& a, const text::NormalizedText& b)
{
    const auto sa = stem_set(a);
    const auto sb = stem_set(b);
    if (sa.empty() || sb.empty()) return 0.0;
    return static_cast<double>(intersection_size(sa, sb)) / static_cast<double>(std::min(sa.size(), sb.size()));
}

double dice_bigram(const text::NormalizedText& a, const text::NormalizedText& b)
{
    const auto ba = bigram_set(a);
    const auto bb = bigram_set(b);
    if (ba.empty() && bb.empty()) return 0.0;
    return 2.0 * static_cast<double>(intersection_size(ba, bb)) / static_cast<double>(ba.size() + bb.size());
}

double cosine_sim(const text::NormalizedText& a, const text::NormalizedText& b)
{
    std::map<std::string, double> ta;
    std::map<std::string, double> tb;
    for (const auto& s : a.content_stems) ta[s] += 1.0;
    for (const auto& s : b.content_stems) tb[s] += 1.0;
    if (ta.empty() || tb.empty()) return 0.0;
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (const auto& [term, f] : ta) {
        na += f * f;
        if (const auto it = tb.find(term); it != tb.end()) dot += f * it->second;
    }
    for (const auto& [term, f] : tb) nb += f * f;
    // Integer counts keep na*nb exact, so identical vectors give exactly 1.
    return std::min(1.0, dot / std::sqrt(na * nb));
}

double jaccard(const text::NormalizedText& a, const text::NormalizedText& b)
{
    const auto sa = stem_set(a);
    const auto sb = stem_set(b);
    const std::size_t inter = intersection_size(sa, sb);
    const std::size_t uni = sa.size() + sb.size() - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::size_t edit_distance(std::string_view a, std::string_view b)
{
    const auto ca = code_points(a);
    const auto cb = code_points(b);
    std::vector<std::size_t> prev(cb.size() + 1);
    std::vector<std::size_t> cur(cb.size() + 1);
    for (std::size_t j = 0; j <= cb.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= ca.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= cb.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (ca[i - 1] == cb[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[cb.size()];
}

double levenshtein_sim(const text::NormalizedText& a, const text::NormalizedText& b)
{
    const std::size_t la = code_points(a.char_form).size();
    const std::size_t lb = code_points(b.char_form).size();
    const std::size_t longest = std::max(la, lb);
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(edit_distance(a.char_form, b.char_form)) / static_cast<double>(longest);
}

int morpho_overlap(const text::NormalizedText& a, const text::NormalizedText& b)
{
    const auto na = tagged_stems(a, text::PosTag::Noun);
    const auto nb = tagged_stems(b, text::PosTag::Noun);
    const auto va = tagged_stems(a, text::PosTag::Verb);
    const auto vb = tagged_stems(b, text::PosTag::Verb);
    return static_cast<int>(intersection_size(na, nb) + intersection_size(va, vb));
}

double length_ratio(const text::NormalizedText& pq, const text::NormalizedText& hq)
{
    if (hq.tokens.empty()) {
        throw InvalidInput("degenerate hypothesis: no tokens in '" + hq.raw + "'");
    }
    return static_cast<double>(pq.tokens.size()) / static_cast<double>(hq.tokens.size());
}

}  // namespace features

AnalyzedPair analyze_pair(std::string_view pq, std::string_view hq, const Resources& resources)
{
    AnalyzedPair p;
    p.pq = text::preprocess(pq, resources.stoplist, resources.lexicon);
    p.hq = text::preprocess(hq, resources.stoplist, resources.lexicon);
    p.pq_types = detect_types(pq, resources.triggers);
    p.hq_types = detect_types(hq, resources.triggers);
    return p;
}

FeatureVector compute_features(const AnalyzedPair& pair)
{
    FeatureVector fv;
    fv.length_ratio = features::length_ratio(pair.pq, pair.hq);
    fv.word_overlap = features::word_overlap(pair.pq, pair.hq);
    fv.dice_bigram = features::dice_bigram(pair.pq, pair.hq);
    fv.cosine = features::cosine_sim(pair.pq, pair.hq);
    fv.levenshtein_sim = features::levenshtein_sim(pair.pq, pair.hq);
    fv.jaccard = features::jaccard(pair.pq, pair.hq);
    const std::array sims{fv.word_overlap, fv.dice_bigram, fv.cosine, fv.levenshtein_sim, fv.jaccard};
    fv.sim_max = *std::max_element(sims.begin(), sims.end());
    double sum = 0.0;
    for (double s : sims) sum += s;
    // The mean of equal values can round one ulp above them.
    fv.sim_avg = std::min(sum / static_cast<double>(sims.size()), fv.sim_max);
    fv.morpho_overlap = features::morpho_overlap(pair.pq, pair.hq);
    fv.type_match = type_match_feature(pair.pq_types, pair.hq_types);
    return fv;
}

FeatureVector extract_features(std::string_view pq, std::string_view hq, const Resources& resources)
{
    return compute_features(analyze_pair(pq, hq, resources));
}

std::string feature_tsv_header()
{
    std::string out;
    for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
        if (i > 0) out.push_back('\t');
        out += kFeatureNames[i];
    }
    return out;
}

std::string to_tsv(const FeatureVector& fv)
{
    const auto a = fv.as_array();
    std::string out;
    for (int i = 0; i < kFeatureCount; ++i) {
        if (i > 0) out.push_back('\t');
        out += format_double(a[i]);
    }
    return out;
}

}  // namespace rqe
