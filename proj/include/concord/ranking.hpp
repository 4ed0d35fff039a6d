#pragma once

#include <string>
#include <vector>

namespace concord {

enum class RetrieverTag { sparse, dense, fused, reranked };

struct ScoredId {
    std::string id;
    double score = 0.0;
};

/// Scores non-increasing, ids distinct.
struct RankedList {
    RetrieverTag tag = RetrieverTag::sparse;
    std::vector<ScoredId> entries;
};

/// Reciprocal Rank Fusion: fused(d) = sum over lists of 1/(k_rrf + rank_d), ranks
/// starting at 1; a document absent from a list contributes nothing for it. Output is
/// ordered by fused score descending, ties broken by ascending id.
RankedList rrf_fuse(const std::vector<RankedList>& lists, int k_rrf);

}  // namespace concord
