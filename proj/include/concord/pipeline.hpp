#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "concord/config.hpp"

namespace concord {

/// out/<run-name>/ layout.
struct RunPaths {
    std::filesystem::path root;

    std::filesystem::path answers() const { return root / "answers"; }
    std::filesystem::path comparisons() const { return root / "comparisons"; }
    std::filesystem::path matrices() const { return root / "matrices"; }
    std::filesystem::path metrics() const { return root / "metrics"; }
    std::filesystem::path reports() const { return root / "reports"; }
    std::filesystem::path figures() const { return root / "figures"; }
    std::filesystem::path indexes() const { return root / "indexes"; }
    std::filesystem::path cache() const { return root / "cache"; }

    std::filesystem::path run_report() const { return reports() / "run_report.json"; }
    /// Volatile sidecar: wall-clock timestamps stay out of the artifact files so the
    /// output tree is byte-identical across re-runs.
    std::filesystem::path timestamps() const { return reports() / "timestamps.jsonl"; }
};

RunPaths run_paths(const RunConfig& cfg);

struct StageOutcome {
    std::string name;
    std::string status;  // "ok", "failed", "not_run"
    std::string detail;
};

struct PipelineResult {
    int exit_code = 0;  // 0 ok, 1 validation failure, 2 stage failure
    std::vector<StageOutcome> stages;
};

const std::vector<std::string>& all_stage_names();  // validate..report in order

/// Executes the selected stages in canonical order (validate always runs first).
/// Completed per-item work is detected and skipped; a stage failure halts later
/// stages but leaves finished outputs intact.
PipelineResult run_pipeline(const RunConfig& cfg, const std::vector<std::string>& stages,
                            std::ostream& log);

/// Backend wiring: deterministic mocks under cfg.mock, HTTP clients otherwise.
std::unique_ptr<Gateway> make_gateway(const RunConfig& cfg);

}  // namespace concord
