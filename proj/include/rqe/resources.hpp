#pragma once

#include <string>

#include "rqe/question_types.hpp"
#include "rqe/text_prep.hpp"

namespace rqe {

/// Linguistic resources shared by feature extraction and indexing. Immutable once loaded.
struct Resources {
    text::Stoplist stoplist;
    text::PosLexicon lexicon;
    TriggerLexicon triggers;
    /// Digest over the three resource files; embedded in index and model files.
    std::string checksum;

    /// Loads `stopwords.txt`, `pos_lexicon.tsv` and `triggers.tsv` from `dir`.
    static Resources load(const std::string& dir);
};

}  // namespace rqe
