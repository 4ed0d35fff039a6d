#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "concord/bm25.hpp"
#include "concord/chunking.hpp"
#include "concord/corpus.hpp"
#include "concord/dense_index.hpp"
#include "concord/gateway.hpp"
#include "concord/ranking.hpp"

namespace concord {

struct RetrievalConfig {
    int k_rrf = 60;
    size_t candidates_per_retriever = 50;
    size_t top_k_final = 5;
    size_t rerank_depth_factor = 2;  // rerank the top factor*top_k_final fused candidates
    Bm25Params bm25;
    bool strict_rerank = false;  // raise on scorer failure instead of falling back

    void validate() const;  // throws ConfigError
};

/// One logical index per handbook: routing is always handbook-scoped, so partitioning
/// makes scope isolation structural.
struct HandbookIndex {
    std::string handbook_id;
    std::vector<Chunk> chunks;  // sorted by chunk_id
    std::map<std::string, size_t> chunk_pos;  // chunk_id -> index into chunks
    SparseIndex sparse;
    DenseIndex dense;
};

/// Chunks, embeds (via the gateway) and indexes one handbook.
HandbookIndex build_handbook_index(const Handbook& handbook, const ChunkingConfig& chunk_cfg,
                                   const Bm25Params& bm25, Gateway& gateway,
                                   WarningSink* warnings = nullptr);

/// Per-handbook directory: manifest.json + chunks.jsonl + sparse.json + dense.bin.
void save_handbook_index(const HandbookIndex& index, const std::filesystem::path& dir,
                         const std::string& config_hash);

/// nullopt when the directory is missing or its manifest is stale (config hash or
/// counts disagree), which signals the caller to rebuild.
std::optional<HandbookIndex> load_handbook_index(const std::filesystem::path& dir,
                                                 const std::string& config_hash);

/// Candidates reordered by scorer relevance, descending; the input set is preserved.
/// On scorer failure: fused order with a warning, or an exception in strict mode.
RankedList rerank(const std::string& question, const std::vector<const Chunk*>& candidates,
                  Gateway& gateway, bool strict, WarningSink* warnings);

/// sparse || dense -> rrf_fuse -> rerank -> truncate to top_k_final. Only chunks of
/// this handbook can be returned; zero indexed chunks yield an empty result.
/// `query_vec` may carry a precomputed embedding of the question text.
std::vector<Chunk> hybrid_search(const Question& question, const HandbookIndex& index,
                                 const RetrievalConfig& cfg, Gateway& gateway,
                                 WarningSink* warnings = nullptr,
                                 const std::vector<float>* query_vec = nullptr);

}  // namespace concord
