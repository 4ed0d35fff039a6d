#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "concord/chunking.hpp"
#include "concord/gateway.hpp"
#include "concord/retrieval.hpp"

namespace concord {

/// Minimal INI: [section] headers, key = value lines, '#'/';' comments, trimmed.
class IniFile {
public:
    static IniFile parse(const std::string& text);
    static IniFile load(const std::filesystem::path& path);

    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct RunConfig {
    std::filesystem::path corpus_dir;
    std::filesystem::path questions_path;
    std::filesystem::path output_dir = "out";
    std::optional<std::filesystem::path> center_map;
    std::filesystem::path prompts_dir = "assets/prompts";
    std::string run_name = "run";

    ChunkingConfig chunking;
    RetrievalConfig retrieval;
    GatewayOptions gateway;
    std::string base_url;
    std::string api_key;
    std::string rerank_mode = "api";  // api | prompt
    std::vector<std::string> topic_allowlist;  // empty -> default taxonomy

    int workers = 4;
    bool strict = false;
    bool mock = false;

    void validate() const;  // throws ConfigError

    /// Covers content-affecting settings only (chunking, retrieval, models, prompts,
    /// backend kind); paths and worker counts stay out so artifacts are portable.
    std::string config_hash(const std::string& prompts_hash) const;
};

/// Parses the INI, resolves relative paths against the file's directory, then applies
/// CONCORD_BASE_URL / CONCORD_API_KEY / CONCORD_{CHAT,EMBED,RERANK}_MODEL overrides.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace concord
