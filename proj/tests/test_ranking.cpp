#include <doctest.h>

#include <algorithm>
#include <random>

#include "concord/ranking.hpp"
#include "support/oracles.hpp"

using namespace concord;

namespace {

RankedList list_of(std::vector<std::string> ids) {
    RankedList l;
    double score = static_cast<double>(ids.size());
    for (auto& id : ids) {
        l.entries.push_back({std::move(id), score});
        score -= 1.0;
    }
    return l;
}

}  // namespace

TEST_CASE("rrf analytic spot values") {
    // Rank 1 in one list, absent from the other: 1/(60+1).
    RankedList a = list_of({"x", "y"});
    RankedList b = list_of({"y", "z"});
    RankedList fused = rrf_fuse({a, b}, 60);

    double x_score = 0, y_score = 0;
    for (const auto& e : fused.entries) {
        if (e.id == "x") x_score = e.score;
        if (e.id == "y") y_score = e.score;
    }
    CHECK(x_score == doctest::Approx(1.0 / 61).epsilon(1e-15));
    // Rank 1 in one list and rank 2 in the other.
    CHECK(y_score == doctest::Approx(1.0 / 61 + 1.0 / 62).epsilon(1e-15));

    // Rank 1 in both lists: 2/61.
    RankedList c = list_of({"w"});
    RankedList d = list_of({"w"});
    RankedList both = rrf_fuse({c, d}, 60);
    REQUIRE(both.entries.size() == 1);
    CHECK(both.entries[0].score == doctest::Approx(2.0 / 61).epsilon(1e-15));
}

TEST_CASE("rrf ties break by ascending id") {
    RankedList a = list_of({"b"});
    RankedList b = list_of({"a"});
    RankedList fused = rrf_fuse({a, b}, 60);
    REQUIRE(fused.entries.size() == 2);
    CHECK(fused.entries[0].id == "a");
    CHECK(fused.entries[1].id == "b");
}

TEST_CASE("rrf equals brute-force fusion on partial overlap") {
    RankedList a = list_of({"c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9", "c10"});
    RankedList b = list_of({"c8", "c2", "c11", "c1", "c12", "c13", "c3", "c14", "c15", "c16"});
    RankedList fused = rrf_fuse({a, b}, 60);

    std::vector<std::string> ids_a, ids_b;
    for (const auto& e : a.entries) ids_a.push_back(e.id);
    for (const auto& e : b.entries) ids_b.push_back(e.id);
    auto expected = oracle::rrf({ids_a, ids_b}, 60);

    REQUIRE(fused.entries.size() == expected.size());
    for (size_t i = 0; i < expected.size(); ++i) {
        CHECK(fused.entries[i].id == expected[i].first);
        CHECK(fused.entries[i].score == doctest::Approx(expected[i].second).epsilon(1e-15));
    }
}

TEST_CASE("rrf monotonicity: improving a rank never lowers the fused score") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        size_t n = 3 + rng() % 8;
        std::vector<std::string> ids;
        for (size_t i = 0; i < n; ++i) ids.push_back("c" + std::to_string(i));
        std::vector<std::string> other = ids;
        std::shuffle(ids.begin(), ids.end(), rng);
        std::shuffle(other.begin(), other.end(), rng);

        size_t pos = 1 + rng() % (n - 1);
        std::string target = ids[pos];
        RankedList before = rrf_fuse({list_of(ids), list_of(other)}, 60);
        std::swap(ids[pos], ids[pos - 1]);  // improve target's rank by one
        RankedList after = rrf_fuse({list_of(ids), list_of(other)}, 60);

        auto score_of = [&](const RankedList& l) {
            for (const auto& e : l.entries) {
                if (e.id == target) return e.score;
            }
            return 0.0;
        };
        CHECK(score_of(after) >= score_of(before));
    }
}

TEST_CASE("rrf requires at least one list") {
    CHECK_THROWS(rrf_fuse({}, 60));
}
