#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <string_view>

#include "rqe/question_types.hpp"
#include "rqe/resources.hpp"
#include "rqe/text_prep.hpp"

namespace rqe {

inline constexpr int kFeatureCount = 10;

template <class Scalar>
using FeatureArray = Eigen::Matrix<Scalar, kFeatureCount, 1>;

/// Feature names in serialization order. The order is part of the model file format.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "word_overlap", "dice_bigram", "cosine", "levenshtein_sim", "jaccard",
    "sim_max",      "sim_avg",     "length_ratio", "morpho_overlap", "type_match"};

/// Features of a (premise, hypothesis) question pair.
struct FeatureVector {
    double word_overlap = 0.0;
    double dice_bigram = 0.0;
    double cosine = 0.0;
    double levenshtein_sim = 0.0;
    double jaccard = 0.0;
    double sim_max = 0.0;
    double sim_avg = 0.0;
    double length_ratio = 0.0;
    int morpho_overlap = 0;
    int type_match = 0;

    FeatureArray<double> as_array() const;
    static FeatureVector from_array(const FeatureArray<double>& a);

    bool operator==(const FeatureVector&) const = default;
};

namespace features {

/// |A∩B| / min(|A|,|B|) over content-stem sets; 0 if either is empty.
double word_overlap(const text::NormalizedText& a, const text::NormalizedText& b);
/// 2|A∩B| / (|A|+|B|) over sets of adjacent content-stem bigrams; 0 if both are empty.
double dice_bigram(const text::NormalizedText& a, const text::NormalizedText& b);
/// Cosine of raw content-stem term frequencies; 0 if either vector is zero.
double cosine_sim(const text::NormalizedText& a, const text::NormalizedText& b);
/// |A∩B| / |A∪B| over content-stem sets; 0 if the union is empty.
double jaccard(const text::NormalizedText& a, const text::NormalizedText& b);

/// Unit-cost edit distance between two strings, by Unicode code point.
std::size_t edit_distance(std::string_view a, std::string_view b);
/// 1 - edit_distance / max length over the space-joined token forms; 1 when both are empty.
double levenshtein_sim(const text::NormalizedText& a, const text::NormalizedText& b);

/// Shared noun stems plus shared verb stems, each stem counted once.
int morpho_overlap(const text::NormalizedText& a, const text::NormalizedText& b);

/// token count(pq) / token count(hq). Throws InvalidInput when hq has no tokens.
double length_ratio(const text::NormalizedText& pq, const text::NormalizedText& hq);

}  // namespace features

/// Premise and hypothesis after preprocessing, with detected question types.
struct AnalyzedPair {
    text::NormalizedText pq;
    text::NormalizedText hq;
    TypeSet pq_types;
    TypeSet hq_types;
};

AnalyzedPair analyze_pair(std::string_view pq, std::string_view hq, const Resources& resources);

FeatureVector compute_features(const AnalyzedPair& pair);

/// All ten features of a question pair. Throws InvalidInput if hq has no tokens.
FeatureVector extract_features(std::string_view pq, std::string_view hq, const Resources& resources);

/// Tab-separated record, columns in kFeatureNames order.
std::string to_tsv(const FeatureVector& fv);
std::string feature_tsv_header();

}  // namespace rqe
