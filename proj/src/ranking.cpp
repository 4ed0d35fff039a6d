#include "concord/ranking.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace concord {

RankedList rrf_fuse(const std::vector<RankedList>& lists, int k_rrf) {
    if (lists.empty()) {
        throw std::invalid_argument("rrf_fuse requires at least one list");
    }
    std::map<std::string, double> fused;
    for (const RankedList& list : lists) {
        for (size_t i = 0; i < list.entries.size(); ++i) {
            fused[list.entries[i].id] += 1.0 / (k_rrf + static_cast<double>(i + 1));
        }
    }
    RankedList out;
    out.tag = RetrieverTag::fused;
    out.entries.reserve(fused.size());
    for (const auto& [id, score] : fused) {
        out.entries.push_back({id, score});
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const ScoredId& a, const ScoredId& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    return out;
}

}  // namespace concord
