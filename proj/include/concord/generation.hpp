#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "concord/corpus.hpp"
#include "concord/gateway.hpp"
#include "concord/prompts.hpp"
#include "concord/retrieval.hpp"

namespace concord {

/// Canonical prefix the generation model emits when a handbook lacks coverage.
inline constexpr std::string_view kAbsenceSentinel = "NOT ADDRESSED";

enum class AbsenceMethod { sentinel_prefix, llm_classifier, empty_retrieval, unresolved };
std::string absence_method_name(AbsenceMethod m);
std::optional<AbsenceMethod> absence_method_from_string(std::string_view s);

struct GroundedAnswer {
    std::string question_id;
    std::string handbook_id;
    std::string answer_text;
    std::vector<std::string> context_chunk_ids;  // <= top_k_final, all of handbook_id
    bool is_absent = false;
    AbsenceMethod absence_method = AbsenceMethod::llm_classifier;
    std::string generated_at;       // volatile; persisted to the sidecar, not the file
    std::string model_fingerprint;  // chat model + prompt template hash
};

struct AbsenceDecision {
    bool is_absent = false;
    AbsenceMethod method = AbsenceMethod::llm_classifier;
};

/// Case-insensitive sentinel prefix check, tolerant of leading whitespace/punctuation.
bool matches_absence_sentinel(std::string_view answer_text);

/// Sentinel hit needs no model call; otherwise the structured YES/NO classifier runs
/// (one semantic retry). An unparseable verdict yields method=unresolved, which
/// excludes the pair from all metrics.
AbsenceDecision detect_absence(const std::string& answer_text, Gateway& gateway,
                               const PromptSet& prompts);

std::string model_fingerprint(const Gateway& gateway, const PromptSet& prompts);

/// Empty context short-circuits to absent (method empty_retrieval) with no model call.
GroundedAnswer generate_answer(const Question& question, const std::string& handbook_id,
                               const std::vector<Chunk>& context, Gateway& gateway,
                               const PromptSet& prompts);

/// answers/<question_id>/<handbook_id>.json; doubles as the per-pair absence cache.
class AnswerStore {
public:
    explicit AnswerStore(std::filesystem::path root) : root_(std::move(root)) {}

    std::filesystem::path path_for(const std::string& question_id,
                                   const std::string& handbook_id) const;
    bool exists(const std::string& question_id, const std::string& handbook_id) const;
    GroundedAnswer load(const std::string& question_id, const std::string& handbook_id) const;
    /// Throws ValidationError when the stored config hash disagrees with `expect_hash`.
    GroundedAnswer load_checked(const std::string& question_id, const std::string& handbook_id,
                                const std::string& expect_hash) const;
    void save(const GroundedAnswer& answer, const std::string& config_hash) const;
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
};

struct GenerationLedger {
    uint64_t generated = 0;
    uint64_t skipped = 0;
    uint64_t failed = 0;
    uint64_t absent = 0;           // among newly generated
    uint64_t empty_retrieval = 0;  // subset of absent
    uint64_t unresolved = 0;
    std::vector<std::string> failures;  // "qid/hbid: reason"
};

using TimestampSink = std::vector<std::pair<std::string, std::string>>;  // (relpath, iso time)

/// One GroundedAnswer file per routed pair; existing files are skipped (resume-safe)
/// and failures leave no file so a re-run retries them.
GenerationLedger run_generation(
    const RoutingPlan& plan, const std::map<std::string, Question>& questions,
    const std::function<const HandbookIndex*(const std::string&)>& index_for,
    const AnswerStore& store, const RetrievalConfig& retrieval_cfg, Gateway& gateway,
    const PromptSet& prompts, const std::string& config_hash, int workers,
    WarningSink* warnings = nullptr, TimestampSink* timestamps = nullptr);

}  // namespace concord
