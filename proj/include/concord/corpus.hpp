#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace concord {

enum class Organ { heart, kidney, liver, lung, pancreas, general };
enum class Phase { pre, post, combined };

std::string organ_to_string(Organ o);
std::optional<Organ> organ_from_string(std::string_view s);
std::string phase_to_string(Phase p);
std::optional<Phase> phase_from_string(std::string_view s);

struct Section {
    std::string heading;  // may be empty
    std::string body;     // non-empty
    std::vector<int> pages;  // positive, ascending
};

/// One institutional document. `id` is always `<organ>-<center_id>-<phase>`.
struct Handbook {
    std::string id;
    Organ organ = Organ::heart;
    std::string center_id;  // anonymized, "center-NNN"
    Phase phase = Phase::pre;
    std::string source_path;
    std::string full_text;
    std::vector<Section> sections;
};

struct Question {
    std::string id;
    std::string text;
    Organ organ = Organ::general;        // general routes to every handbook
    std::vector<std::string> topics;     // non-empty; questions are multi-labeled
    std::vector<std::string> subtopics;
};

/// Which handbooks answer which questions: C(q) for every q.
struct RoutingPlan {
    std::vector<std::pair<std::string, std::string>> pairs;  // (question_id, handbook_id), sorted
    std::map<Organ, size_t> per_organ_pairs;

    /// pairs grouped by question id, handbook ids sorted.
    std::map<std::string, std::vector<std::string>> by_question() const;
};

struct FileError {
    std::string file;
    std::string message;
};

struct CorpusLoadResult {
    std::vector<Handbook> handbooks;   // sorted by id
    std::vector<FileError> errors;     // malformed files, reported but non-fatal
};

struct CorpusOptions {
    /// Optional JSON object mapping real center names to "center-NNN" ids.
    std::optional<std::filesystem::path> center_map;
};

std::string compose_handbook_id(Organ organ, const std::string& center_id, Phase phase);

struct HandbookIdParts {
    Organ organ = Organ::heart;
    std::string center_id;
    Phase phase = Phase::pre;
};
std::optional<HandbookIdParts> decompose_handbook_id(std::string_view id);

/// Loads every *.json handbook in `dir`. Malformed files land in `errors`; valid ones
/// still load. A duplicate id across files is a corpus-level ValidationError.
CorpusLoadResult load_corpus(const std::filesystem::path& dir, const CorpusOptions& opts = {});

/// The paper's topic taxonomy ships as data, not code; callers may pass their own list.
const std::vector<std::string>& default_topic_allowlist();

/// Loads a JSON array of questions. Throws ValidationError on duplicate ids, empty
/// topic sets, unknown organ values, or topics outside the allow-list.
std::vector<Question> load_questions(const std::filesystem::path& path,
                                     const std::vector<std::string>& topic_allowlist =
                                         default_topic_allowlist());

/// General questions route to every handbook; organ questions to matching organs only.
/// Pairs are sorted by (question id, handbook id).
RoutingPlan build_routing(const std::vector<Question>& questions,
                          const std::vector<Handbook>& handbooks);

}  // namespace concord
