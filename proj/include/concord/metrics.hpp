#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "concord/corpus.hpp"
#include "concord/generation.hpp"
#include "concord/judge.hpp"

namespace concord {

struct QuestionHeterogeneity {
    std::string question_id;
    size_t n_pairs_total = 0;      // C(N,2) off-diagonal unordered pairs
    size_t n_pairs_nonabsent = 0;
    double r_div = 0.0;            // (Divergent + Contradictory) / non-absent
    double r_con = 0.0;            // Consistent / non-absent
    bool defined = false;          // false when no non-absent pair exists
};

/// Off-diagonal unordered pairs only; the Consistent diagonal never counts.
QuestionHeterogeneity question_rates(const ComparisonMatrix& matrix);

struct AbsenceStats {
    size_t pairs = 0;       // resolved (question, handbook) answers
    size_t absent = 0;
    size_t unresolved = 0;  // excluded from numerator and denominator
    size_t missing = 0;     // not generated (incomplete run)

    bool defined() const { return pairs > 0; }
    double rate() const { return pairs ? static_cast<double>(absent) / pairs : 0.0; }
};

struct GroupHeterogeneity {
    std::string group_id;  // organ name or topic category
    size_t q_total = 0;
    size_t q_active = 0;   // questions with >= 1 non-absent pair
    double r_div_mean = 0.0;  // mean over defined questions
    double r_con_mean = 0.0;
    double pct_div = 0.0;     // share of active questions with r_div > 0
    bool rates_defined = false;
    AbsenceStats absence;
};

/// Means over DEFINED questions (q_total is also reported so the raw |Q_g| convention
/// stays recomputable); pct_div over active questions.
GroupHeterogeneity group_rates(const std::string& group_id,
                               const std::vector<QuestionHeterogeneity>& question_rates,
                               const AbsenceStats& absence);

struct CenterProfile {
    std::string center_id;
    size_t n_pairs = 0;  // non-absent cross-center comparisons involving this center
    double r_div = 0.0;
    double r_con = 0.0;
    bool defined = false;
};

/// Over all valid non-absent comparisons where exactly one side belongs to the center
/// (within-center pairs are excluded). Order of `comparisons` does not matter.
CenterProfile center_profile(const std::string& center_id,
                             const std::vector<PairwiseComparison>& comparisons);

struct LabelDistribution {
    std::map<std::string, uint64_t> counts;  // label name -> count (Absent included)
    uint64_t errors = 0;                     // label-error records, excluded from shares

    uint64_t non_absent_total() const;
    /// Shares over non-absent pairs only; Absent is reported count-only.
    std::map<std::string, double> shares() const;
};

LabelDistribution global_distribution(const std::vector<PairwiseComparison>& comparisons);

struct MetricsReport {
    LabelDistribution global;
    std::vector<QuestionHeterogeneity> questions;  // sorted by question id
    std::vector<GroupHeterogeneity> organs;        // general first, then organ order
    std::vector<GroupHeterogeneity> topics;        // sorted by topic name
    std::vector<CenterProfile> centers;            // sorted by center id
    size_t missing_answers = 0;
    size_t unresolved_answers = 0;
};

/// Full aggregation over loaded answers and comparisons. Matrices are rebuilt from the
/// comparisons with the routed handbook set of each question.
MetricsReport compute_metrics(
    const std::vector<Question>& questions, const RoutingPlan& plan,
    const std::map<std::pair<std::string, std::string>, GroundedAnswer>& answers,
    const std::map<std::string, std::vector<PairwiseComparison>>& comparisons,
    WarningSink* warnings = nullptr);

nlohmann::json metrics_to_json(const MetricsReport& report, const std::string& config_hash);

}  // namespace concord
