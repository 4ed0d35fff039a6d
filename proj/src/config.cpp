#include "concord/config.hpp"

#include <cstdlib>
#include <sstream>

#include <json.hpp>

namespace concord {

using nlohmann::json;

IniFile IniFile::parse(const std::string& text) {
    IniFile ini;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        }
        ini.sections_[section][key] = value;
    }
    return ini;
}

IniFile IniFile::load(const std::filesystem::path& path) {
    return parse(read_text_file(path));
}

std::optional<std::string> IniFile::get(const std::string& section,
                                        const std::string& key) const {
    auto sit = sections_.find(section);
    if (sit == sections_.end()) return std::nullopt;
    auto kit = sit->second.find(key);
    if (kit == sit->second.end()) return std::nullopt;
    return kit->second;
}

std::string IniFile::get_or(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    auto v = get(section, key);
    return v ? *v : fallback;
}

void RunConfig::validate() const {
    if (corpus_dir.empty()) throw ConfigError("paths.corpus_dir is required");
    if (questions_path.empty()) throw ConfigError("paths.questions is required");
    if (run_name.empty()) throw ConfigError("run.name must be non-empty");
    if (workers < 1) throw ConfigError("run.workers must be >= 1");
    if (rerank_mode != "api" && rerank_mode != "prompt") {
        throw ConfigError("models.rerank_mode must be \"api\" or \"prompt\"");
    }
    chunking.validate();
    retrieval.validate();
}

std::string RunConfig::config_hash(const std::string& prompts_hash) const {
    json subject{{"chunking",
                  json{{"max_tokens", chunking.max_tokens},
                       {"sentence_split_rule", chunking.sentence_split_rule}}},
                 {"retrieval",
                  json{{"k_rrf", retrieval.k_rrf},
                       {"candidates_per_retriever", retrieval.candidates_per_retriever},
                       {"top_k_final", retrieval.top_k_final},
                       {"rerank_depth_factor", retrieval.rerank_depth_factor},
                       {"bm25_k1", retrieval.bm25.k1},
                       {"bm25_b", retrieval.bm25.b}}},
                 {"models",
                  json{{"chat", gateway.chat_model},
                       {"embed", gateway.embed_model},
                       {"rerank", gateway.rerank_model},
                       {"rerank_mode", rerank_mode},
                       {"backend", mock ? "mock" : "http"}}},
                 {"prompts", prompts_hash}};
    return sha256_hex(subject.dump()).substr(0, 16);
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
}

int to_int(const std::string& section, const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(section + "." + key + ": \"" + value + "\" is not an integer");
    }
}

double to_double(const std::string& section, const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(section + "." + key + ": \"" + value + "\" is not a number");
    }
}

bool to_bool(const std::string& section, const std::string& key, const std::string& value) {
    std::string v = to_lower(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(section + "." + key + ": \"" + value + "\" is not a boolean");
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    IniFile ini = IniFile::load(path);
    std::filesystem::path base = path.has_parent_path() ? path.parent_path()
                                                        : std::filesystem::path(".");
    RunConfig cfg;

    if (auto v = ini.get("paths", "corpus_dir")) cfg.corpus_dir = resolve(base, *v);
    if (auto v = ini.get("paths", "questions")) cfg.questions_path = resolve(base, *v);
    if (auto v = ini.get("paths", "output_dir")) cfg.output_dir = resolve(base, *v);
    if (auto v = ini.get("paths", "center_map")) cfg.center_map = resolve(base, *v);
    if (auto v = ini.get("paths", "prompts_dir")) cfg.prompts_dir = resolve(base, *v);

    if (auto v = ini.get("run", "name")) cfg.run_name = *v;
    if (auto v = ini.get("run", "workers")) cfg.workers = to_int("run", "workers", *v);
    if (auto v = ini.get("run", "strict")) cfg.strict = to_bool("run", "strict", *v);

    if (auto v = ini.get("chunking", "max_tokens")) {
        cfg.chunking.max_tokens = static_cast<size_t>(to_int("chunking", "max_tokens", *v));
    }
    if (auto v = ini.get("chunking", "sentence_split_rule")) cfg.chunking.sentence_split_rule = *v;

    if (auto v = ini.get("retrieval", "k_rrf")) cfg.retrieval.k_rrf = to_int("retrieval", "k_rrf", *v);
    if (auto v = ini.get("retrieval", "candidates_per_retriever")) {
        cfg.retrieval.candidates_per_retriever =
            static_cast<size_t>(to_int("retrieval", "candidates_per_retriever", *v));
    }
    if (auto v = ini.get("retrieval", "top_k_final")) {
        cfg.retrieval.top_k_final = static_cast<size_t>(to_int("retrieval", "top_k_final", *v));
    }
    if (auto v = ini.get("retrieval", "rerank_depth_factor")) {
        cfg.retrieval.rerank_depth_factor =
            static_cast<size_t>(to_int("retrieval", "rerank_depth_factor", *v));
    }
    if (auto v = ini.get("retrieval", "bm25_k1")) cfg.retrieval.bm25.k1 = to_double("retrieval", "bm25_k1", *v);
    if (auto v = ini.get("retrieval", "bm25_b")) cfg.retrieval.bm25.b = to_double("retrieval", "bm25_b", *v);

    if (auto v = ini.get("models", "base_url")) cfg.base_url = *v;
    if (auto v = ini.get("models", "api_key")) cfg.api_key = *v;
    if (auto v = ini.get("models", "chat_model")) cfg.gateway.chat_model = *v;
    if (auto v = ini.get("models", "embed_model")) cfg.gateway.embed_model = *v;
    if (auto v = ini.get("models", "rerank_model")) cfg.gateway.rerank_model = *v;
    if (auto v = ini.get("models", "rerank_mode")) cfg.rerank_mode = *v;
    if (auto v = ini.get("models", "max_attempts")) {
        cfg.gateway.max_attempts = to_int("models", "max_attempts", *v);
    }
    if (auto v = ini.get("models", "backoff_ms")) {
        cfg.gateway.backoff_ms = to_int("models", "backoff_ms", *v);
    }
    if (auto v = ini.get("models", "in_flight_cap")) {
        cfg.gateway.in_flight_cap = to_int("models", "in_flight_cap", *v);
    }
    if (auto v = ini.get("models", "embed_batch")) {
        cfg.gateway.embed_batch = static_cast<size_t>(to_int("models", "embed_batch", *v));
    }
    if (auto v = ini.get("models", "cache_dir")) cfg.gateway.cache_dir = resolve(base, *v);

    if (auto v = ini.get("topics", "allowlist")) {
        std::istringstream items(*v);
        std::string item;
        while (std::getline(items, item, ',')) {
            std::string topic = trim(item);
            if (!topic.empty()) cfg.topic_allowlist.push_back(topic);
        }
    }

    // Secrets and deployment knobs come from the environment when present.
    if (const char* v = std::getenv("CONCORD_BASE_URL")) cfg.base_url = v;
    if (const char* v = std::getenv("CONCORD_API_KEY")) cfg.api_key = v;
    if (const char* v = std::getenv("CONCORD_CHAT_MODEL")) cfg.gateway.chat_model = v;
    if (const char* v = std::getenv("CONCORD_EMBED_MODEL")) cfg.gateway.embed_model = v;
    if (const char* v = std::getenv("CONCORD_RERANK_MODEL")) cfg.gateway.rerank_model = v;

    return cfg;
}

}  // namespace concord
