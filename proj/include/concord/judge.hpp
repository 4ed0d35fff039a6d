#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "concord/corpus.hpp"
#include "concord/gateway.hpp"
#include "concord/generation.hpp"
#include "concord/prompts.hpp"

namespace concord {

enum class ComparisonLabel { absent, consistent, complementary, divergent, contradictory };

std::string label_name(ComparisonLabel l);   // "Absent", "Consistent", ...
char label_code(ComparisonLabel l);          // 'A', 'C', 'P', 'D', 'X'
/// Case-insensitive, exact names only (no synonyms).
std::optional<ComparisonLabel> label_from_string(std::string_view s);
std::optional<ComparisonLabel> label_from_code(char c);

inline bool is_divergent_kind(ComparisonLabel l) {
    return l == ComparisonLabel::divergent || l == ComparisonLabel::contradictory;
}

enum class Significance { low, medium, high };
std::string significance_name(Significance s);
std::optional<Significance> significance_from_string(std::string_view s);

struct PairwiseComparison {
    std::string question_id;
    std::string handbook_a;  // always < handbook_b
    std::string handbook_b;
    ComparisonLabel label = ComparisonLabel::absent;
    std::string justification;  // empty for Absent
    std::optional<std::string> subtopic_tag;     // only for Divergent/Contradictory
    std::optional<Significance> significance;    // present <=> Divergent/Contradictory
    std::string judge_fingerprint;
    bool error = false;  // label-error record: excluded from metrics
    std::string error_reason;
};

/// Symmetric N x N label grid for one question; diagonal Consistent by convention.
struct ComparisonMatrix {
    std::string question_id;
    std::vector<std::string> handbook_ids;  // sorted, dimension N
    std::vector<ComparisonLabel> grid;      // row-major N*N

    size_t dim() const { return handbook_ids.size(); }
    ComparisonLabel at(size_t i, size_t j) const { return grid[i * dim() + j]; }
    void set(size_t i, size_t j, ComparisonLabel l) { grid[i * dim() + j] = l; }
};

/// Absent short-circuit when either answer is absent (or unresolved) needs no judge
/// call. Otherwise one structured judge call at temperature 0, with one repair retry
/// for schema violations before an error record is returned.
PairwiseComparison judge_pair(const Question& question, const GroundedAnswer& ans_a,
                              const GroundedAnswer& ans_b, Gateway& gateway,
                              const PromptSet& prompts, WarningSink* warnings = nullptr);

/// Missing pairs become Absent with a warning (strict mode throws); duplicate pairs
/// with conflicting labels throw. Error records render as Absent cells.
ComparisonMatrix build_matrix(const std::string& question_id,
                              const std::vector<PairwiseComparison>& comparisons,
                              std::vector<std::string> handbook_ids, bool strict = false,
                              WarningSink* warnings = nullptr);

/// Matrix export: handbook id list plus row-major grid of single-letter codes.
nlohmann::json matrix_to_json(const ComparisonMatrix& m, const std::string& config_hash);
ComparisonMatrix matrix_from_json(const nlohmann::json& j);

/// comparisons/<question_id>/<handbook_a>__<handbook_b>.json
class ComparisonStore {
public:
    explicit ComparisonStore(std::filesystem::path root) : root_(std::move(root)) {}

    std::filesystem::path path_for(const std::string& question_id, const std::string& a,
                                   const std::string& b) const;
    bool exists(const std::string& question_id, const std::string& a,
                const std::string& b) const;
    void save(const PairwiseComparison& c, const std::string& config_hash) const;
    PairwiseComparison load(const std::filesystem::path& path) const;
    /// All stored comparisons for one question, sorted by (handbook_a, handbook_b).
    std::vector<PairwiseComparison> load_question(const std::string& question_id) const;
    std::vector<std::string> question_ids() const;
    /// Config hash stamped in a stored pair file (empty when absent).
    std::string stored_hash(const std::filesystem::path& path) const;
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
};

struct JudgingLedger {
    uint64_t judged = 0;           // real judge calls
    uint64_t short_circuited = 0;  // absent side, no call
    uint64_t skipped = 0;          // pair file already present
    uint64_t errors = 0;           // persisted label-error records
    uint64_t failed = 0;           // transient failures, retried on re-run
    uint64_t missing_answers = 0;  // pairs whose answers were not generated
};

/// One file per unordered pair per question; resume-safe, never aborts on one pair.
JudgingLedger run_judging(const RoutingPlan& plan,
                          const std::map<std::string, Question>& questions,
                          const AnswerStore& answers, const ComparisonStore& store,
                          Gateway& gateway, const PromptSet& prompts,
                          const std::string& config_hash, int workers,
                          WarningSink* warnings = nullptr, TimestampSink* timestamps = nullptr);

}  // namespace concord
