#pragma once

#include <array>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "concord/util.hpp"

namespace concord {

enum class ChatTask { generate, absence, judge, rerank_prompt, other };
enum class ResponseFormat { free_text, json_object };

std::string chat_task_name(ChatTask t);

struct ChatRequest {
    ChatTask task = ChatTask::other;
    std::string system_prompt;
    std::string user_prompt;
    double temperature = 0.0;  // pipeline always uses greedy decoding
    int max_output_tokens = 1024;
    ResponseFormat response_format = ResponseFormat::free_text;
};

/// Transport or protocol failure after the configured retries.
class GatewayError : public std::runtime_error {
public:
    GatewayError(std::string kind, std::string digest, int attempts, const std::string& what)
        : std::runtime_error(what), kind(std::move(kind)), request_digest(std::move(digest)),
          attempts(attempts) {}
    std::string kind;
    std::string request_digest;
    int attempts = 0;
};

/// json_object mode produced unparseable output even after the retry.
class MalformedResponseError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

struct EndpointStats {
    uint64_t calls = 0;       // logical requests
    uint64_t cache_hits = 0;
    uint64_t retries = 0;     // attempts beyond the first
    uint64_t failures = 0;    // logical requests that ultimately failed
};

struct GatewayStatsSnapshot {
    EndpointStats chat;
    EndpointStats embed;
    EndpointStats rerank;
    uint64_t network_calls = 0;  // incremented by HTTP backends only
    std::map<std::string, uint64_t> chat_calls_by_task;

    uint64_t total_backend_calls() const {
        return chat.calls + embed.calls + rerank.calls - chat.cache_hits - embed.cache_hits -
               rerank.cache_hits;
    }
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const ChatRequest& req) = 0;
    /// Wire-level call count; non-network backends report 0.
    virtual uint64_t wire_calls() const { return 0; }
};

class EmbedBackend {
public:
    virtual ~EmbedBackend() = default;
    virtual std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) = 0;
    virtual uint64_t wire_calls() const { return 0; }
};

class RerankBackend {
public:
    virtual ~RerankBackend() = default;
    virtual std::vector<double> score(const std::string& query,
                                      const std::vector<std::string>& passages) = 0;
    virtual uint64_t wire_calls() const { return 0; }
};

struct GatewayOptions {
    std::string chat_model = "qwen3-14b";
    std::string embed_model = "bge-large-en-v1.5";
    std::string rerank_model = "ms-marco-minilm";
    int max_attempts = 3;
    int backoff_ms = 250;          // doubles per retry; 0 disables sleeping
    int in_flight_cap = 4;
    size_t embed_batch = 32;
    std::optional<std::filesystem::path> cache_dir;  // cache/<kind>/<sha256>.json
};

/// Uniform client over the three endpoint kinds: retry with exponential backoff,
/// bounded in-flight admission, persistent response cache, call accounting, and
/// embedding normalization regardless of endpoint behavior.
class Gateway {
public:
    Gateway(GatewayOptions opts, std::unique_ptr<ChatBackend> chat,
            std::unique_ptr<EmbedBackend> embed, std::unique_ptr<RerankBackend> rerank);

    /// Raw model text. json_object mode validates parseability and retries once more
    /// on parse failure before throwing MalformedResponseError.
    std::string chat(const ChatRequest& req);

    /// One unit vector per input text; batched. Empty input or a dimension change
    /// across the run is a hard error.
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts);

    /// One relevance score per passage, higher = more relevant.
    std::vector<double> score_pairs(const std::string& question,
                                    const std::vector<std::string>& passages);

    GatewayStatsSnapshot stats() const;
    const GatewayOptions& options() const { return opts_; }

private:
    struct Counters {
        std::atomic<uint64_t> calls{0}, cache_hits{0}, retries{0}, failures{0};
    };

    std::string run_attempts(const std::string& kind, Counters& counters,
                             const std::string& cache_key,
                             const std::function<std::string()>& attempt_once);
    std::optional<std::string> cache_lookup(const std::string& kind, const std::string& key);
    void cache_store(const std::string& kind, const std::string& key, const std::string& value);
    void admit_begin();
    void admit_end();

    GatewayOptions opts_;
    std::unique_ptr<ChatBackend> chat_;
    std::unique_ptr<EmbedBackend> embed_;
    std::unique_ptr<RerankBackend> rerank_;

    Counters chat_stats_, embed_stats_, rerank_stats_;
    std::array<std::atomic<uint64_t>, 5> chat_by_task_{};
    std::atomic<int> expected_dim_{0};

    std::mutex admit_mutex_;
    std::condition_variable admit_cv_;
    int in_flight_ = 0;
};

}  // namespace concord
