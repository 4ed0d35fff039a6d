#include "concord/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "concord/text.hpp"

namespace concord {

using nlohmann::json;

SparseIndex SparseIndex::build(const std::vector<Chunk>& chunks, Bm25Params params) {
    SparseIndex index;
    index.params_ = params;

    std::vector<const Chunk*> ordered;
    ordered.reserve(chunks.size());
    for (const Chunk& c : chunks) ordered.push_back(&c);
    std::sort(ordered.begin(), ordered.end(),
              [](const Chunk* a, const Chunk* b) { return a->chunk_id < b->chunk_id; });

    uint64_t total_len = 0;
    for (uint32_t doc = 0; doc < ordered.size(); ++doc) {
        const Chunk& c = *ordered[doc];
        index.ids_.push_back(c.chunk_id);
        std::map<std::string, uint32_t> tf;
        auto terms = lexical_terms(c.text);
        for (const auto& t : terms) ++tf[t];
        index.lengths_.push_back(static_cast<uint32_t>(terms.size()));
        total_len += terms.size();
        for (const auto& [term, count] : tf) {
            index.postings_[term].push_back({doc, count});
        }
    }
    index.avgdl_ = index.ids_.empty() ? 0.0 : static_cast<double>(total_len) / index.ids_.size();
    return index;
}

double SparseIndex::score_doc(const std::vector<std::string>& query_terms, uint32_t doc) const {
    const double n = static_cast<double>(ids_.size());
    const double dl = lengths_[doc];
    const double norm = params_.k1 * (1.0 - params_.b + params_.b * dl / (avgdl_ > 0 ? avgdl_ : 1.0));
    double score = 0.0;
    for (const std::string& term : query_terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const auto& plist = it->second;
        auto pit = std::lower_bound(plist.begin(), plist.end(), doc,
                                    [](const Posting& p, uint32_t d) { return p.doc < d; });
        if (pit == plist.end() || pit->doc != doc) continue;
        const double tf = pit->tf;
        const double df = static_cast<double>(plist.size());
        const double idf = std::log((n - df + 0.5) / (df + 0.5));
        score += idf * tf * (params_.k1 + 1.0) / (tf + norm);
    }
    return score;
}

double SparseIndex::score(const std::vector<std::string>& query_terms,
                          const std::string& chunk_id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), chunk_id);
    if (it == ids_.end() || *it != chunk_id) {
        throw std::out_of_range("chunk not indexed: " + chunk_id);
    }
    return score_doc(query_terms, static_cast<uint32_t>(it - ids_.begin()));
}

RankedList SparseIndex::search(const std::vector<std::string>& query_terms, size_t k) const {
    std::set<uint32_t> matched;
    for (const std::string& term : query_terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        for (const Posting& p : it->second) matched.insert(p.doc);
    }
    RankedList out;
    out.tag = RetrieverTag::sparse;
    for (uint32_t doc : matched) {
        out.entries.push_back({ids_[doc], score_doc(query_terms, doc)});
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const ScoredId& a, const ScoredId& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (out.entries.size() > k) out.entries.resize(k);
    return out;
}

json SparseIndex::to_json() const {
    json terms = json::object();
    for (const auto& [term, plist] : postings_) {
        json arr = json::array();
        for (const Posting& p : plist) arr.push_back(json::array({p.doc, p.tf}));
        terms[term] = std::move(arr);
    }
    return json{{"ids", ids_},
                {"lengths", lengths_},
                {"avgdl", avgdl_},
                {"k1", params_.k1},
                {"b", params_.b},
                {"postings", std::move(terms)}};
}

SparseIndex SparseIndex::from_json(const json& j) {
    SparseIndex index;
    index.ids_ = j.at("ids").get<std::vector<std::string>>();
    index.lengths_ = j.at("lengths").get<std::vector<uint32_t>>();
    index.avgdl_ = j.at("avgdl").get<double>();
    index.params_.k1 = j.at("k1").get<double>();
    index.params_.b = j.at("b").get<double>();
    for (const auto& [term, arr] : j.at("postings").items()) {
        std::vector<Posting> plist;
        for (const auto& pair : arr) {
            plist.push_back({pair.at(0).get<uint32_t>(), pair.at(1).get<uint32_t>()});
        }
        index.postings_[term] = std::move(plist);
    }
    return index;
}

}  // namespace concord
