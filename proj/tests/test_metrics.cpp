#include <doctest.h>

#include <algorithm>
#include <random>

#include "concord/metrics.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace concord;
using namespace concord::test;

namespace {

ComparisonMatrix matrix_from_codes(const std::string& qid,
                                   const std::vector<std::string>& ids,
                                   const std::map<std::pair<size_t, size_t>, char>& cells) {
    std::vector<PairwiseComparison> comps;
    for (const auto& [key, code] : cells) {
        PairwiseComparison c;
        c.question_id = qid;
        c.handbook_a = ids[key.first];
        c.handbook_b = ids[key.second];
        c.label = *label_from_code(code);
        if (is_divergent_kind(c.label)) c.significance = Significance::medium;
        comps.push_back(c);
    }
    return build_matrix(qid, comps, ids);
}

}  // namespace

TEST_CASE("question_rates: all pairs consistent") {
    std::vector<std::string> ids = {"a", "b", "c"};
    ComparisonMatrix m = matrix_from_codes(
        "q", ids, {{{0, 1}, 'C'}, {{0, 2}, 'C'}, {{1, 2}, 'C'}});
    QuestionHeterogeneity q = question_rates(m);
    CHECK(q.defined);
    CHECK(q.r_div == 0.0);
    CHECK(q.r_con == 1.0);
    CHECK(q.n_pairs_total == 3);
    CHECK(q.n_pairs_nonabsent == 3);
}

TEST_CASE("question_rates: {Divergent, Consistent, Absent} -> 0.5 / 0.5") {
    // Enumeration oracle over the 3 pairs: 2 non-absent, 1 divergent, 1 consistent.
    std::vector<std::string> ids = {"a", "b", "c"};
    ComparisonMatrix m = matrix_from_codes(
        "q", ids, {{{0, 1}, 'D'}, {{0, 2}, 'C'}, {{1, 2}, 'A'}});
    QuestionHeterogeneity q = question_rates(m);
    CHECK(q.r_div == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(q.r_con == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("question_rates: 27 of 31 non-absent pairs divergent gives 0.871") {
    // 102 handbooks; 31 non-absent pairs, 27 of them Divergent/Contradictory.
    std::vector<std::string> ids;
    for (int i = 0; i < 102; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "hb%03d", i);
        ids.push_back(buf);
    }
    std::map<std::pair<size_t, size_t>, char> cells;
    for (size_t j = 1; j <= 25; ++j) cells[{0, j}] = 'D';
    cells[{0, 26}] = 'X';
    cells[{0, 27}] = 'X';
    cells[{1, 2}] = 'C';
    cells[{1, 3}] = 'C';
    cells[{2, 3}] = 'P';
    cells[{4, 5}] = 'P';
    ComparisonMatrix m = matrix_from_codes("q46", ids, cells);

    QuestionHeterogeneity q = question_rates(m);
    CHECK(q.n_pairs_total == 102 * 101 / 2);
    CHECK(q.n_pairs_nonabsent == 31);
    CHECK(q.r_div == doctest::Approx(27.0 / 31.0).epsilon(1e-12));
    CHECK(std::abs(q.r_div - 0.871) < 0.001);
}

TEST_CASE("question_rates: zero non-absent pairs is undefined") {
    std::vector<std::string> ids = {"a", "b"};
    ComparisonMatrix m = matrix_from_codes("q", ids, {{{0, 1}, 'A'}});
    QuestionHeterogeneity q = question_rates(m);
    CHECK_FALSE(q.defined);
    CHECK(q.n_pairs_nonabsent == 0);
}

TEST_CASE("r_div + r_con + complementary share is exactly 1 for defined questions") {
    std::mt19937 rng(31);
    const char codes[] = {'A', 'C', 'P', 'D', 'X'};
    for (int trial = 0; trial < 50; ++trial) {
        size_t n = 2 + rng() % 7;
        std::vector<std::string> ids;
        for (size_t i = 0; i < n; ++i) ids.push_back("h" + std::to_string(i));
        std::map<std::pair<size_t, size_t>, char> cells;
        size_t complementary = 0, nonabsent = 0;
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) {
                char code = codes[rng() % 5];
                cells[{i, j}] = code;
                if (code != 'A') ++nonabsent;
                if (code == 'P') ++complementary;
            }
        }
        QuestionHeterogeneity q = question_rates(matrix_from_codes("q", ids, cells));
        if (!q.defined) continue;
        double comp_share = static_cast<double>(complementary) / nonabsent;
        CHECK(q.r_div + q.r_con + comp_share == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("group_rates: arithmetic mean and pct_div") {
    QuestionHeterogeneity a{"q1", 10, 5, 0.2, 0.5, true};
    QuestionHeterogeneity b{"q2", 10, 5, 0.4, 0.1, true};
    GroupHeterogeneity g = group_rates("general", {a, b}, AbsenceStats{});
    CHECK(g.r_div_mean == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(g.q_active == 2);

    QuestionHeterogeneity zero{"q3", 10, 5, 0.0, 1.0, true};
    QuestionHeterogeneity half{"q4", 10, 5, 0.3, 0.2, true};
    QuestionHeterogeneity more{"q5", 10, 5, 0.5, 0.1, true};
    GroupHeterogeneity g2 = group_rates("g", {zero, half, more}, AbsenceStats{});
    CHECK(g2.pct_div == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("group_rates: fully undefined group") {
    QuestionHeterogeneity u1{"q1", 3, 0, 0, 0, false};
    QuestionHeterogeneity u2{"q2", 3, 0, 0, 0, false};
    GroupHeterogeneity g = group_rates("g", {u1, u2}, AbsenceStats{});
    CHECK_FALSE(g.rates_defined);
    CHECK(g.q_total == 2);
    CHECK(g.q_active == 0);
}

TEST_CASE("absence stats arithmetic") {
    AbsenceStats all;
    all.pairs = 6;
    all.absent = 6;
    CHECK(all.rate() == 1.0);

    AbsenceStats half;
    half.pairs = 6;
    half.absent = 3;
    CHECK(half.rate() == 0.5);

    AbsenceStats none;
    CHECK_FALSE(none.defined());
}

TEST_CASE("center_profile: 4 cross-center comparisons, 1 divergent") {
    auto comp = [](const std::string& q, const std::string& a, const std::string& b,
                   char code) {
        PairwiseComparison c;
        c.question_id = q;
        c.handbook_a = a;
        c.handbook_b = b;
        c.label = *label_from_code(code);
        if (is_divergent_kind(c.label)) c.significance = Significance::low;
        return c;
    };
    std::vector<PairwiseComparison> comps = {
        comp("q1", "heart-center-001-pre", "heart-center-002-pre", 'D'),
        comp("q1", "heart-center-001-pre", "heart-center-003-pre", 'C'),
        comp("q2", "heart-center-001-post", "heart-center-002-pre", 'P'),
        comp("q3", "heart-center-001-pre", "heart-center-004-pre", 'P'),
        // Within-center pair: two handbooks of center-001; judged but never counted here.
        comp("q1", "heart-center-001-post", "heart-center-001-pre", 'X'),
        // Absent pairs never count.
        comp("q2", "heart-center-001-pre", "heart-center-005-pre", 'A'),
        // A pair not involving center-001 at all.
        comp("q1", "heart-center-002-pre", "heart-center-003-pre", 'D'),
    };
    CenterProfile p = center_profile("center-001", comps);
    CHECK(p.n_pairs == 4);
    CHECK(p.r_div == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(p.r_con == doctest::Approx(0.25).epsilon(1e-15));

    CenterProfile empty = center_profile("center-099", comps);
    CHECK_FALSE(empty.defined);
    CHECK(empty.n_pairs == 0);
}

TEST_CASE("center_profile: all consistent") {
    std::vector<PairwiseComparison> comps;
    for (int i = 0; i < 5; ++i) {
        PairwiseComparison c;
        c.question_id = "q" + std::to_string(i);
        c.handbook_a = "heart-center-001-pre";
        c.handbook_b = "heart-center-00" + std::to_string(i + 2) + "-pre";
        c.label = ComparisonLabel::consistent;
        comps.push_back(c);
    }
    CenterProfile p = center_profile("center-001", comps);
    CHECK(p.r_con == 1.0);
    CHECK(p.r_div == 0.0);
}

TEST_CASE("center profiles are permutation-invariant") {
    std::mt19937 rng(41);
    std::vector<PairwiseComparison> comps;
    const char codes[] = {'A', 'C', 'P', 'D', 'X'};
    for (int i = 0; i < 40; ++i) {
        PairwiseComparison c;
        c.question_id = "q" + std::to_string(rng() % 5);
        int ca = static_cast<int>(rng() % 4 + 1);
        int cb = static_cast<int>(rng() % 4 + 1);
        if (ca == cb) cb = (cb % 4) + 1;
        char bufa[32], bufb[32];
        std::snprintf(bufa, sizeof(bufa), "heart-center-00%d-pre", ca);
        std::snprintf(bufb, sizeof(bufb), "kidney-center-00%d-pre", cb);
        c.handbook_a = std::min(std::string(bufa), std::string(bufb));
        c.handbook_b = std::max(std::string(bufa), std::string(bufb));
        c.label = *label_from_code(codes[rng() % 5]);
        if (is_divergent_kind(c.label)) c.significance = Significance::low;
        comps.push_back(c);
    }
    CenterProfile before = center_profile("center-002", comps);
    std::shuffle(comps.begin(), comps.end(), rng);
    CenterProfile after = center_profile("center-002", comps);
    CHECK(before.n_pairs == after.n_pairs);
    CHECK(before.r_div == after.r_div);
    CHECK(before.r_con == after.r_con);
}

TEST_CASE("global_distribution reproduces the published share arithmetic") {
    // Counts as published: Complementary 44870, Divergent 14132, Consistent 8874,
    // Contradictory 143, non-absent total 68019.
    std::vector<PairwiseComparison> comps;
    auto push_n = [&](ComparisonLabel l, size_t n) {
        for (size_t i = 0; i < n; ++i) {
            PairwiseComparison c;
            c.question_id = "q";
            c.handbook_a = "a";
            c.handbook_b = "b";
            c.label = l;
            if (is_divergent_kind(l)) c.significance = Significance::low;
            comps.push_back(c);
        }
    };
    push_n(ComparisonLabel::complementary, 44870);
    push_n(ComparisonLabel::divergent, 14132);
    push_n(ComparisonLabel::consistent, 8874);
    push_n(ComparisonLabel::contradictory, 143);
    push_n(ComparisonLabel::absent, 1000);

    LabelDistribution dist = global_distribution(comps);
    CHECK(dist.non_absent_total() == 68019);
    auto shares = dist.shares();
    CHECK(format_fixed(shares["Complementary"] * 100, 1) == "66.0");
    CHECK(format_fixed(shares["Divergent"] * 100, 1) == "20.8");
    CHECK(format_fixed(shares["Consistent"] * 100, 1) == "13.0");
    CHECK(format_fixed(shares["Contradictory"] * 100, 1) == "0.2");
}

TEST_CASE("global_distribution: zero comparisons and hand-counted fixture") {
    LabelDistribution empty = global_distribution({});
    CHECK(empty.non_absent_total() == 0);
    CHECK(empty.shares().empty());
    for (const auto& [name, count] : empty.counts) CHECK(count == 0);

    std::vector<PairwiseComparison> ten;
    const char codes[] = {'C', 'C', 'C', 'P', 'P', 'D', 'D', 'D', 'X', 'A'};
    for (char code : codes) {
        PairwiseComparison c;
        c.question_id = "q";
        c.handbook_a = "a";
        c.handbook_b = "b";
        c.label = *label_from_code(code);
        if (is_divergent_kind(c.label)) c.significance = Significance::low;
        ten.push_back(c);
    }
    LabelDistribution dist = global_distribution(ten);
    CHECK(dist.non_absent_total() == 9);
    CHECK(dist.shares()["Consistent"] == doctest::Approx(3.0 / 9).epsilon(1e-15));
    CHECK(dist.shares()["Divergent"] == doctest::Approx(3.0 / 9).epsilon(1e-15));
    CHECK(dist.counts["Absent"] == 1);
}

TEST_CASE("error records are excluded from distributions") {
    PairwiseComparison err;
    err.question_id = "q";
    err.handbook_a = "a";
    err.handbook_b = "b";
    err.error = true;
    LabelDistribution dist = global_distribution({err});
    CHECK(dist.errors == 1);
    CHECK(dist.non_absent_total() == 0);
}
