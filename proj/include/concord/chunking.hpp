#pragma once

#include <string>
#include <vector>

#include "concord/corpus.hpp"
#include "concord/util.hpp"

namespace concord {

struct ChunkingConfig {
    size_t max_tokens = 512;                  // per-chunk body token budget
    std::string sentence_split_rule = "default";

    void validate() const;  // throws ConfigError; max_tokens >= 32
};

/// One retrieval unit. `text` is the heading prefix ("<heading>: ") followed by a
/// contiguous slice of the section body; `token_count` counts the body slice only
/// (the heading prefix is not charged against the budget).
struct Chunk {
    std::string chunk_id;     // "<handbook_id>#<ordinal>", ordinals dense from 0
    std::string handbook_id;
    std::string heading;
    std::string text;
    size_t prefix_len = 0;    // text.substr(prefix_len) is the body slice
    size_t token_count = 0;
    std::vector<int> pages;
    size_t section_index = 0;
};

struct ChunkingResult {
    std::vector<Chunk> chunks;
    WarningSink warnings;  // hard-wrapped oversized sentences land here
};

std::string compose_chunk_id(const std::string& handbook_id, size_t ordinal);
/// Handbook id encoded in a chunk id, or empty if malformed.
std::string chunk_handbook_id(std::string_view chunk_id);

/// Sections at or under the budget become one chunk each; oversized sections split at
/// sentence boundaries, every sub-chunk inheriting the heading prefix. A single sentence
/// over the budget is hard-wrapped at a token boundary and flagged via warnings.
ChunkingResult chunk_handbook(const Handbook& handbook, const ChunkingConfig& cfg);

std::string chunks_to_jsonl(const std::vector<Chunk>& chunks);
std::vector<Chunk> chunks_from_jsonl(const std::string& jsonl);

}  // namespace concord
