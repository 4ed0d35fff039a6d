#include "concord/dense_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "concord/util.hpp"

namespace concord {

DenseIndex DenseIndex::build(std::vector<std::string> ids,
                             const std::vector<std::vector<float>>& vectors) {
    if (ids.size() != vectors.size()) {
        throw std::invalid_argument("dense index: ids/vectors size mismatch");
    }
    DenseIndex index;
    if (ids.empty()) return index;

    std::vector<size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return ids[a] < ids[b]; });

    index.dim_ = vectors.front().size();
    index.data_.reserve(ids.size() * index.dim_);
    for (size_t i : order) {
        const auto& v = vectors[i];
        if (v.size() != index.dim_) {
            throw std::invalid_argument("dense index: inconsistent vector dimension");
        }
        double norm_sq = 0.0;
        for (float x : v) norm_sq += static_cast<double>(x) * x;
        if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-6) {
            throw std::invalid_argument("dense index: vector for " + ids[i] +
                                        " is not unit-normalized");
        }
        index.ids_.push_back(ids[i]);
        index.data_.insert(index.data_.end(), v.begin(), v.end());
    }
    return index;
}

RankedList DenseIndex::search(std::span<const float> query, size_t k) const {
    if (!ids_.empty() && query.size() != dim_) {
        throw std::invalid_argument("dense search: query dimension " +
                                    std::to_string(query.size()) + " != index dimension " +
                                    std::to_string(dim_));
    }
    RankedList out;
    out.tag = RetrieverTag::dense;
    out.entries.reserve(ids_.size());
    for (size_t row = 0; row < ids_.size(); ++row) {
        const float* v = data_.data() + row * dim_;
        double dot = 0.0;
        for (size_t i = 0; i < dim_; ++i) dot += static_cast<double>(v[i]) * query[i];
        out.entries.push_back({ids_[row], dot});
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const ScoredId& a, const ScoredId& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    if (out.entries.size() > k) out.entries.resize(k);
    return out;
}

void DenseIndex::save_matrix(const std::filesystem::path& path) const {
    std::string bytes(reinterpret_cast<const char*>(data_.data()),
                      data_.size() * sizeof(float));
    atomic_write_file(path, bytes);
}

DenseIndex DenseIndex::load_matrix(const std::filesystem::path& path,
                                   std::vector<std::string> ids, size_t dim) {
    std::string bytes = read_text_file(path);
    if (bytes.size() != ids.size() * dim * sizeof(float)) {
        throw std::runtime_error("dense matrix file size mismatch: " + path.string());
    }
    DenseIndex index;
    index.ids_ = std::move(ids);
    if (!std::is_sorted(index.ids_.begin(), index.ids_.end())) {
        throw std::runtime_error("dense matrix ids must be sorted: " + path.string());
    }
    index.dim_ = dim;
    index.data_.resize(index.ids_.size() * dim);
    std::memcpy(index.data_.data(), bytes.data(), bytes.size());
    return index;
}

}  // namespace concord
