#include "concord/retrieval.hpp"

#include <algorithm>

#include <json.hpp>

#include "concord/text.hpp"

namespace concord {

using nlohmann::json;

void RetrievalConfig::validate() const {
    if (k_rrf <= 0) throw ConfigError("retrieval.k_rrf must be positive");
    if (candidates_per_retriever == 0) {
        throw ConfigError("retrieval.candidates_per_retriever must be positive");
    }
    if (top_k_final == 0) throw ConfigError("retrieval.top_k_final must be positive");
    if (top_k_final > candidates_per_retriever) {
        throw ConfigError("retrieval.top_k_final must be <= candidates_per_retriever");
    }
    if (rerank_depth_factor == 0) throw ConfigError("retrieval.rerank_depth_factor must be positive");
}

HandbookIndex build_handbook_index(const Handbook& handbook, const ChunkingConfig& chunk_cfg,
                                   const Bm25Params& bm25, Gateway& gateway,
                                   WarningSink* warnings) {
    HandbookIndex index;
    index.handbook_id = handbook.id;

    ChunkingResult chunked = chunk_handbook(handbook, chunk_cfg);
    if (warnings) {
        warnings->insert(warnings->end(), chunked.warnings.begin(), chunked.warnings.end());
    }
    index.chunks = std::move(chunked.chunks);
    std::sort(index.chunks.begin(), index.chunks.end(),
              [](const Chunk& a, const Chunk& b) { return a.chunk_id < b.chunk_id; });
    for (size_t i = 0; i < index.chunks.size(); ++i) {
        index.chunk_pos[index.chunks[i].chunk_id] = i;
    }

    index.sparse = SparseIndex::build(index.chunks, bm25);

    if (!index.chunks.empty()) {
        std::vector<std::string> ids;
        std::vector<std::string> texts;
        for (const Chunk& c : index.chunks) {
            ids.push_back(c.chunk_id);
            texts.push_back(c.text);
        }
        index.dense = DenseIndex::build(std::move(ids), gateway.embed(texts));
    }
    return index;
}

void save_handbook_index(const HandbookIndex& index, const std::filesystem::path& dir,
                         const std::string& config_hash) {
    atomic_write_file(dir / "chunks.jsonl", chunks_to_jsonl(index.chunks));
    atomic_write_file(dir / "sparse.json", index.sparse.to_json().dump());
    index.dense.save_matrix(dir / "dense.bin");
    json manifest{{"handbook_id", index.handbook_id},
                  {"config_hash", config_hash},
                  {"chunk_count", index.chunks.size()},
                  {"embedding_dim", index.dense.dim()}};
    atomic_write_file(dir / "manifest.json", manifest.dump(2));
}

std::optional<HandbookIndex> load_handbook_index(const std::filesystem::path& dir,
                                                 const std::string& config_hash) {
    namespace fs = std::filesystem;
    if (!fs::exists(dir / "manifest.json")) return std::nullopt;
    json manifest;
    try {
        manifest = json::parse(read_text_file(dir / "manifest.json"));
    } catch (const json::exception&) {
        return std::nullopt;
    }
    if (manifest.value("config_hash", "") != config_hash) return std::nullopt;

    HandbookIndex index;
    index.handbook_id = manifest.value("handbook_id", "");
    try {
        index.chunks = chunks_from_jsonl(read_text_file(dir / "chunks.jsonl"));
        index.sparse = SparseIndex::from_json(json::parse(read_text_file(dir / "sparse.json")));
        size_t dim = manifest.value("embedding_dim", size_t{0});
        std::vector<std::string> ids;
        for (const Chunk& c : index.chunks) ids.push_back(c.chunk_id);
        if (!ids.empty()) {
            index.dense = DenseIndex::load_matrix(dir / "dense.bin", ids, dim);
        }
    } catch (const std::exception&) {
        return std::nullopt;  // treat unreadable artifacts as stale
    }
    if (index.chunks.size() != manifest.value("chunk_count", size_t{0})) return std::nullopt;
    for (size_t i = 0; i < index.chunks.size(); ++i) {
        index.chunk_pos[index.chunks[i].chunk_id] = i;
    }
    return index;
}

RankedList rerank(const std::string& question, const std::vector<const Chunk*>& candidates,
                  Gateway& gateway, bool strict, WarningSink* warnings) {
    RankedList out;
    out.tag = RetrieverTag::reranked;
    if (candidates.empty()) return out;

    std::vector<std::string> texts;
    texts.reserve(candidates.size());
    for (const Chunk* c : candidates) texts.push_back(c->text);

    std::vector<double> scores;
    try {
        scores = gateway.score_pairs(question, texts);
    } catch (const GatewayError& e) {
        if (strict) throw;
        if (warnings) {
            warnings->push_back("reranker unavailable, keeping fused order: " +
                                std::string(e.what()));
        }
        // Fall back to the incoming (fused) order; scores become descending ranks.
        for (size_t i = 0; i < candidates.size(); ++i) {
            out.entries.push_back(
                {candidates[i]->chunk_id, static_cast<double>(candidates.size() - i)});
        }
        return out;
    }

    std::vector<size_t> order(candidates.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });
    for (size_t i : order) {
        out.entries.push_back({candidates[i]->chunk_id, scores[i]});
    }
    return out;
}

std::vector<Chunk> hybrid_search(const Question& question, const HandbookIndex& index,
                                 const RetrievalConfig& cfg, Gateway& gateway,
                                 WarningSink* warnings, const std::vector<float>* query_vec) {
    cfg.validate();
    if (index.chunks.empty()) return {};

    RankedList sparse = index.sparse.search(lexical_terms(question.text),
                                            cfg.candidates_per_retriever);

    std::vector<float> embedded;
    if (query_vec == nullptr) {
        embedded = gateway.embed({question.text}).front();
        query_vec = &embedded;
    }
    RankedList dense = index.dense.search(*query_vec, cfg.candidates_per_retriever);

    RankedList fused = rrf_fuse({sparse, dense}, cfg.k_rrf);

    size_t depth = std::min(fused.entries.size(), cfg.rerank_depth_factor * cfg.top_k_final);
    std::vector<const Chunk*> candidates;
    candidates.reserve(depth);
    for (size_t i = 0; i < depth; ++i) {
        candidates.push_back(&index.chunks[index.chunk_pos.at(fused.entries[i].id)]);
    }

    RankedList reranked = rerank(question.text, candidates, gateway, cfg.strict_rerank, warnings);

    std::vector<Chunk> result;
    for (size_t i = 0; i < reranked.entries.size() && result.size() < cfg.top_k_final; ++i) {
        result.push_back(index.chunks[index.chunk_pos.at(reranked.entries[i].id)]);
    }
    return result;
}

}  // namespace concord
