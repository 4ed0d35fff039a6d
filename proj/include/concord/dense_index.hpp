#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "concord/ranking.hpp"

namespace concord {

/// Exact flat index over unit-normalized embeddings: an exhaustive dot-product scan.
/// Corpus scale makes exactness affordable and removes a nondeterminism source.
class DenseIndex {
public:
    DenseIndex() = default;

    /// Validates a common dimension and unit L2 norm (1 +/- 1e-6) per vector.
    static DenseIndex build(std::vector<std::string> ids,
                            const std::vector<std::vector<float>>& vectors);

    /// Top-k by cosine similarity (dot product of unit vectors); k larger than the
    /// corpus returns everything. Throws on query dimension mismatch.
    RankedList search(std::span<const float> query, size_t k) const;

    size_t size() const { return ids_.size(); }
    size_t dim() const { return dim_; }
    const std::vector<std::string>& ids() const { return ids_; }

    /// Raw little-endian float32 matrix, row per id (ascending id order).
    void save_matrix(const std::filesystem::path& path) const;
    static DenseIndex load_matrix(const std::filesystem::path& path,
                                  std::vector<std::string> ids, size_t dim);

private:
    std::vector<std::string> ids_;  // ascending
    std::vector<float> data_;       // ids_.size() x dim_
    size_t dim_ = 0;
};

}  // namespace concord
