#pragma once

#include <atomic>
#include <memory>
#include <string>

#include "concord/gateway.hpp"

namespace concord {

struct HttpEndpointConfig {
    std::string base_url;  // e.g. http://localhost:8000/v1
    std::string api_key;   // empty -> no Authorization header
    std::string model;
    int timeout_seconds = 120;
};

/// POST {base}/chat/completions with the widely used chat-completions JSON shape.
class HttpChatBackend : public ChatBackend {
public:
    explicit HttpChatBackend(HttpEndpointConfig cfg) : cfg_(std::move(cfg)) {}
    std::string complete(const ChatRequest& req) override;
    uint64_t wire_calls() const override { return wire_calls_.load(); }

private:
    HttpEndpointConfig cfg_;
    std::atomic<uint64_t> wire_calls_{0};
};

/// POST {base}/embeddings.
class HttpEmbedBackend : public EmbedBackend {
public:
    explicit HttpEmbedBackend(HttpEndpointConfig cfg) : cfg_(std::move(cfg)) {}
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;
    uint64_t wire_calls() const override { return wire_calls_.load(); }

private:
    HttpEndpointConfig cfg_;
    std::atomic<uint64_t> wire_calls_{0};
};

/// POST {base}/rerank (dedicated cross-encoder API shape).
class HttpRerankBackend : public RerankBackend {
public:
    explicit HttpRerankBackend(HttpEndpointConfig cfg) : cfg_(std::move(cfg)) {}
    std::vector<double> score(const std::string& query,
                              const std::vector<std::string>& passages) override;
    uint64_t wire_calls() const override { return wire_calls_.load(); }

private:
    HttpEndpointConfig cfg_;
    std::atomic<uint64_t> wire_calls_{0};
};

/// Cross-encoders without a rerank API: one structured scoring prompt over a chat
/// backend, returning {"scores": [...]}.
class PromptRerankBackend : public RerankBackend {
public:
    explicit PromptRerankBackend(std::shared_ptr<ChatBackend> chat) : chat_(std::move(chat)) {}
    std::vector<double> score(const std::string& query,
                              const std::vector<std::string>& passages) override;
    uint64_t wire_calls() const override { return chat_->wire_calls(); }

private:
    std::shared_ptr<ChatBackend> chat_;
};

}  // namespace concord
