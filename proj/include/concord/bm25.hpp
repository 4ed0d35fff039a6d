#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "concord/chunking.hpp"
#include "concord/ranking.hpp"

namespace concord {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Okapi BM25 over an inverted index. Terms are the lowercased chunking tokens of each
/// chunk's text; no stemming. Per query term occurrence:
///   idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
/// with idf(t) = ln((N - df + 0.5) / (df + 0.5)). Duplicate query terms contribute once
/// per occurrence.
class SparseIndex {
public:
    SparseIndex() = default;

    /// Chunks are indexed in ascending chunk_id order, so postings stay sorted by id.
    static SparseIndex build(const std::vector<Chunk>& chunks, Bm25Params params = {});

    /// Score of one indexed chunk; throws std::out_of_range for an unknown id.
    double score(const std::vector<std::string>& query_terms, const std::string& chunk_id) const;

    /// Top-k among chunks containing at least one query term, score descending,
    /// ties by ascending id.
    RankedList search(const std::vector<std::string>& query_terms, size_t k) const;

    size_t doc_count() const { return ids_.size(); }
    double avg_doc_len() const { return avgdl_; }
    const Bm25Params& params() const { return params_; }

    nlohmann::json to_json() const;
    static SparseIndex from_json(const nlohmann::json& j);

private:
    struct Posting {
        uint32_t doc = 0;  // index into ids_
        uint32_t tf = 0;
    };

    double score_doc(const std::vector<std::string>& query_terms, uint32_t doc) const;

    std::map<std::string, std::vector<Posting>> postings_;
    std::vector<std::string> ids_;       // ascending
    std::vector<uint32_t> lengths_;      // tokens per doc
    double avgdl_ = 0.0;
    Bm25Params params_;
};

}  // namespace concord
