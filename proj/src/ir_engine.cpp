#include "rqe/ir_engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "rqe/checksum.hpp"
#include "rqe/error.hpp"

namespace rqe {
namespace {

constexpr std::string_view kMagic = "RQEINDEX";
constexpr std::uint32_t kIndexVersion = 1;

class Writer {
public:
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(std::string_view s)
    {
        u32(static_cast<std::uint32_t>(s.size()));
        out_.append(s);
    }
    void raw(std::string_view s) { out_.append(s); }
    std::string take() { return std::move(out_); }

private:
    void put(std::uint64_t v, int bytes)
    {
        for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view in) : in_(in) {}

    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str()
    {
        const std::uint32_t n = u32();
        return std::string(raw(n));
    }
    std::string_view raw(std::size_t n)
    {
        if (in_.size() - pos_ < n) throw ParseError("index file truncated at byte " + std::to_string(pos_));
        const auto out = in_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    bool at_end() const { return pos_ == in_.size(); }
    std::size_t position() const { return pos_; }

private:
    std::uint64_t get(int bytes)
    {
        const auto b = raw(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[static_cast<std::size_t>(i)])) << (8 * i);
        return v;
    }
    std::string_view in_;
    std::size_t pos_ = 0;
};

std::map<std::string, std::uint32_t> query_counts(std::span<const std::string> stems)
{
    std::map<std::string, std::uint32_t> out;
    for (const auto& s : stems) ++out[s];
    return out;
}

RetrievalResult collect(const InvertedIndex& index, const std::vector<double>& acc)
{
    RetrievalResult out;
    for (std::size_t d = 0; d < acc.size(); ++d) {
        if (acc[d] > 0.0) out.push_back({index.pair_id(static_cast<DocId>(d)), acc[d]});
    }
    sort_result(out);
    return out;
}

}  // namespace

QuestionDocument expand_document(const QAPair& pair, const Resources& resources)
{
    QuestionDocument doc;
    doc.pair_id = pair.id;
    doc.indexed_terms = text::content_stems(pair.question, resources.stoplist);
    for (const auto& synonym : pair.focus.synonyms) {
        for (auto& s : text::content_stems(synonym, resources.stoplist)) doc.indexed_terms.push_back(std::move(s));
    }
    if (in_taxonomy(pair.question_type)) {
        for (const auto& trigger : expand_triggers(pair.question_type, resources.triggers)) {
            for (auto& s : text::content_stems(trigger, resources.stoplist)) doc.indexed_terms.push_back(std::move(s));
        }
    }
    return doc;
}

std::string index_checksum(const Collection& collection, const Resources& resources)
{
    return sha256_hex(collection_checksum(collection) + ":" + resources.checksum);
}

InvertedIndex InvertedIndex::build(const Collection& collection, const Resources& resources)
{
    if (collection.pairs.empty()) {
        throw InvalidInput("cannot index an empty collection");
    }
    std::vector<QuestionDocument> docs;
    docs.reserve(collection.pairs.size());
    for (const auto& p : collection.pairs) docs.push_back(expand_document(p, resources));
    return from_documents(std::move(docs), index_checksum(collection, resources));
}

InvertedIndex InvertedIndex::from_documents(std::vector<QuestionDocument> documents, std::string checksum)
{
    if (documents.empty()) {
        throw InvalidInput("cannot index an empty collection");
    }
    std::sort(documents.begin(), documents.end(),
              [](const QuestionDocument& a, const QuestionDocument& b) { return a.pair_id < b.pair_id; });
    for (std::size_t i = 1; i < documents.size(); ++i) {
        if (documents[i].pair_id == documents[i - 1].pair_id) {
            throw InvalidInput("duplicate document id: " + documents[i].pair_id);
        }
    }

    InvertedIndex index;
    index.checksum_ = std::move(checksum);
    std::map<std::string, std::vector<Posting>> postings;
    for (std::size_t d = 0; d < documents.size(); ++d) {
        index.pair_ids_.push_back(documents[d].pair_id);
        index.doc_lengths_.push_back(static_cast<std::uint32_t>(documents[d].indexed_terms.size()));
        std::map<std::string, std::uint32_t> tf;
        for (const auto& t : documents[d].indexed_terms) ++tf[t];
        for (const auto& [term, count] : tf) postings[term].push_back({static_cast<DocId>(d), count});
    }
    for (auto& [term, list] : postings) {
        index.terms_.push_back(term);
        index.postings_.push_back(std::move(list));
    }
    index.finalize();
    return index;
}

void InvertedIndex::finalize()
{
    stats_.clear();
    stats_.reserve(postings_.size());
    for (const auto& list : postings_) {
        TermStats s;
        s.document_frequency = static_cast<std::uint32_t>(list.size());
        for (const auto& p : list) s.collection_frequency += p.tf;
        stats_.push_back(s);
    }
    std::uint64_t total = 0;
    for (auto len : doc_lengths_) total += len;
    avg_doc_length_ = pair_ids_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(pair_ids_.size());
}

std::ptrdiff_t InvertedIndex::term_index(std::string_view term) const
{
    const auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                                     [](const std::string& a, std::string_view b) { return std::string_view(a) < b; });
    if (it == terms_.end() || *it != term) return -1;
    return it - terms_.begin();
}

std::optional<DocId> InvertedIndex::find_doc(std::string_view pair_id) const
{
    const auto it = std::lower_bound(pair_ids_.begin(), pair_ids_.end(), pair_id,
                                     [](const std::string& a, std::string_view b) { return std::string_view(a) < b; });
    if (it == pair_ids_.end() || *it != pair_id) return std::nullopt;
    return static_cast<DocId>(it - pair_ids_.begin());
}

std::span<const Posting> InvertedIndex::postings(std::string_view term) const
{
    const auto i = term_index(term);
    if (i < 0) return {};
    return postings_[static_cast<std::size_t>(i)];
}

TermStats InvertedIndex::stats(std::string_view term) const
{
    const auto i = term_index(term);
    if (i < 0) return {};
    return stats_[static_cast<std::size_t>(i)];
}

std::vector<std::string> InvertedIndex::document_terms(DocId doc) const
{
    std::vector<std::string> out;
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        const auto& list = postings_[t];
        const auto it = std::lower_bound(list.begin(), list.end(), doc,
                                         [](const Posting& p, DocId d) { return p.doc < d; });
        if (it != list.end() && it->doc == doc) out.push_back(terms_[t]);
    }
    return out;
}

std::string InvertedIndex::serialize() const
{
    Writer w;
    w.raw(kMagic);
    w.u32(kIndexVersion);
    w.u64(pair_ids_.size());
    w.f64(avg_doc_length_);
    w.str(checksum_);
    w.u64(terms_.size());
    for (std::size_t d = 0; d < pair_ids_.size(); ++d) {
        w.str(pair_ids_[d]);
        w.u32(doc_lengths_[d]);
    }
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        w.str(terms_[t]);
        w.u32(stats_[t].document_frequency);
        w.u64(stats_[t].collection_frequency);
        w.u32(static_cast<std::uint32_t>(postings_[t].size()));
        for (const auto& p : postings_[t]) {
            w.u32(p.doc);
            w.u32(p.tf);
        }
    }
    return w.take();
}

InvertedIndex InvertedIndex::deserialize(std::string_view bytes)
{
    Reader r(bytes);
    if (r.raw(kMagic.size()) != kMagic) throw ParseError("not an rqe index file");
    const std::uint32_t version = r.u32();
    if (version != kIndexVersion) throw ParseError("unsupported index version " + std::to_string(version));
    const std::uint64_t n_docs = r.u64();
    const double avg_dl = r.f64();
    InvertedIndex index;
    index.checksum_ = r.str();
    const std::uint64_t n_terms = r.u64();
    if (n_docs == 0) throw ParseError("index holds no documents");
    for (std::uint64_t d = 0; d < n_docs; ++d) {
        index.pair_ids_.push_back(r.str());
        index.doc_lengths_.push_back(r.u32());
        if (d > 0 && !(index.pair_ids_[d - 1] < index.pair_ids_[d])) throw ParseError("index documents out of order");
    }
    std::vector<std::uint64_t> lengths(n_docs, 0);
    std::vector<TermStats> stored;
    for (std::uint64_t t = 0; t < n_terms; ++t) {
        index.terms_.push_back(r.str());
        if (t > 0 && !(index.terms_[t - 1] < index.terms_[t])) throw ParseError("index terms out of order");
        TermStats s;
        s.document_frequency = r.u32();
        s.collection_frequency = r.u64();
        stored.push_back(s);
        const std::uint32_t count = r.u32();
        std::vector<Posting> list;
        list.reserve(count);
        for (std::uint32_t i = 0; i < count; ++i) {
            Posting p{r.u32(), r.u32()};
            if (p.doc >= n_docs || p.tf == 0 || (!list.empty() && list.back().doc >= p.doc)) {
                throw ParseError("corrupt postings for term '" + index.terms_.back() + "'");
            }
            lengths[p.doc] += p.tf;
            list.push_back(p);
        }
        index.postings_.push_back(std::move(list));
    }
    if (!r.at_end()) throw ParseError("trailing bytes in index file");
    index.finalize();
    if (stored != index.stats_) throw ParseError("index term statistics do not match postings");
    for (std::uint64_t d = 0; d < n_docs; ++d) {
        if (lengths[d] != index.doc_lengths_[d]) throw ParseError("index document length does not match postings");
    }
    if (index.avg_doc_length_ != avg_dl) throw ParseError("index average document length does not match");
    return index;
}

void InvertedIndex::save(const std::string& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write index file: " + path);
    const std::string bytes = serialize();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing index file: " + path);
}

InvertedIndex InvertedIndex::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open index file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return deserialize(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void check_index_fresh(const InvertedIndex& index, const Collection& collection, const Resources& resources, bool force)
{
    if (force) return;
    if (index.checksum() != index_checksum(collection, resources)) {
        throw StaleIndexError("index checksum does not match the collection and resources in use (rebuild the index or force)");
    }
}

void sort_result(RetrievalResult& result)
{
    std::sort(result.begin(), result.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.pair_id < b.pair_id;
    });
}

double tfidf_term_weight(double tf, double doc_count, double document_frequency)
{
    return tf * std::log(1.0 + doc_count / document_frequency);
}

double inexpb2_term_weight(double tf, double doc_length, double avg_doc_length, double doc_count,
                           double document_frequency, double collection_frequency, double c)
{
    const double tfn = tf * std::log2(1.0 + c * avg_doc_length / doc_length);
    const double n_e = doc_count * (1.0 - std::pow(1.0 - document_frequency / doc_count, collection_frequency));
    const double after_effect = (collection_frequency + 1.0) / (document_frequency * (tfn + 1.0));
    return after_effect * tfn * std::log2((doc_count + 1.0) / (n_e + 0.5));
}

RetrievalResult score_tfidf(std::span<const std::string> query_stems, const InvertedIndex& index)
{
    std::vector<double> acc(index.doc_count(), 0.0);
    const auto n_docs = static_cast<double>(index.doc_count());
    for (const auto& [term, qtf] : query_counts(query_stems)) {
        const auto list = index.postings(term);
        if (list.empty()) continue;
        const auto df = static_cast<double>(list.size());
        for (const auto& p : list) acc[p.doc] += qtf * tfidf_term_weight(p.tf, n_docs, df);
    }
    return collect(index, acc);
}

RetrievalResult score_tfidf(const text::NormalizedText& query, const InvertedIndex& index)
{
    return score_tfidf(query.content_stems, index);
}

RetrievalResult score_inexpb2(std::span<const std::string> query_stems, const InvertedIndex& index, double c)
{
    if (!(c > 0.0)) throw InvalidInput("In_expB2 parameter c must be positive");
    std::vector<double> acc(index.doc_count(), 0.0);
    const auto n_docs = static_cast<double>(index.doc_count());
    for (const auto& [term, qtf] : query_counts(query_stems)) {
        const auto list = index.postings(term);
        if (list.empty()) continue;
        const TermStats s = index.stats(term);
        for (const auto& p : list) {
            acc[p.doc] += qtf * inexpb2_term_weight(p.tf, index.doc_length(p.doc), index.avg_doc_length(), n_docs,
                                                    s.document_frequency, static_cast<double>(s.collection_frequency), c);
        }
    }
    return collect(index, acc);
}

RetrievalResult score_inexpb2(const text::NormalizedText& query, const InvertedIndex& index, double c)
{
    return score_inexpb2(query.content_stems, index, c);
}

RetrievalResult fuse(const RetrievalResult& a, const RetrievalResult& b)
{
    std::map<std::string, double> sum;
    for (const auto& d : a) sum[d.pair_id] += d.score;
    for (const auto& d : b) sum[d.pair_id] += d.score;
    RetrievalResult out;
    out.reserve(sum.size());
    for (const auto& [id, score] : sum) out.push_back({id, score});
    sort_result(out);
    return out;
}

RetrievalResult retrieve_candidates(std::string_view question, const InvertedIndex& index, const Resources& resources,
                                    const RetrievalConfig& config)
{
    if (config.n_max == 0) throw InvalidInput("n_max must be positive");
    const auto stems = text::content_stems(question, resources.stoplist);
    RetrievalResult result;
    switch (config.model) {
    case RetrievalModel::TfIdf:
        result = score_tfidf(stems, index);
        break;
    case RetrievalModel::InExpB2:
        result = score_inexpb2(stems, index, config.c);
        break;
    case RetrievalModel::Fused:
        result = fuse(score_tfidf(stems, index), score_inexpb2(stems, index, config.c));
        break;
    }
    if (result.size() > config.n_max) result.resize(config.n_max);
    return result;
}

}  // namespace rqe
