#include "concord/backends_http.hpp"

#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace concord {

using nlohmann::json;

namespace {

struct SplitUrl {
    std::string host;       // scheme://host[:port]
    std::string path_base;  // optional path prefix, no trailing slash
};

SplitUrl split_base_url(const std::string& base_url) {
    size_t scheme = base_url.find("://");
    if (scheme == std::string::npos) {
        throw GatewayError("http", "", 0, "base_url must include a scheme: " + base_url);
    }
    size_t path = base_url.find('/', scheme + 3);
    SplitUrl out;
    if (path == std::string::npos) {
        out.host = base_url;
    } else {
        out.host = base_url.substr(0, path);
        out.path_base = base_url.substr(path);
        while (!out.path_base.empty() && out.path_base.back() == '/') out.path_base.pop_back();
    }
    return out;
}

json post_json(const HttpEndpointConfig& cfg, const std::string& route, const json& body,
               std::atomic<uint64_t>& wire_calls) {
    SplitUrl url = split_base_url(cfg.base_url);
    httplib::Client client(url.host);
    client.set_connection_timeout(cfg.timeout_seconds);
    client.set_read_timeout(cfg.timeout_seconds);

    httplib::Headers headers;
    if (!cfg.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + cfg.api_key);
    }

    wire_calls.fetch_add(1);
    auto res = client.Post(url.path_base + route, headers, body.dump(), "application/json");
    if (!res) {
        throw GatewayError("http", "", 1,
                           "connection to " + cfg.base_url + route + " failed: " +
                               httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw GatewayError("http", "", 1,
                           cfg.base_url + route + " returned HTTP " +
                               std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }
    try {
        return json::parse(res->body);
    } catch (const json::exception& e) {
        throw GatewayError("http", "", 1,
                           std::string("response is not JSON: ") + e.what());
    }
}

}  // namespace

std::string HttpChatBackend::complete(const ChatRequest& req) {
    json body{{"model", cfg_.model},
              {"messages",
               json::array({json{{"role", "system"}, {"content", req.system_prompt}},
                            json{{"role", "user"}, {"content", req.user_prompt}}})},
              {"temperature", req.temperature},
              {"max_tokens", req.max_output_tokens}};
    if (req.response_format == ResponseFormat::json_object) {
        body["response_format"] = json{{"type", "json_object"}};
    }
    json res = post_json(cfg_, "/chat/completions", body, wire_calls_);
    try {
        return res.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw GatewayError("chat", "", 1,
                           std::string("unexpected chat completion shape: ") + e.what());
    }
}

std::vector<std::vector<float>> HttpEmbedBackend::embed(const std::vector<std::string>& texts) {
    json body{{"model", cfg_.model}, {"input", texts}};
    json res = post_json(cfg_, "/embeddings", body, wire_calls_);
    try {
        std::vector<std::vector<float>> out(texts.size());
        for (const json& item : res.at("data")) {
            size_t index = item.at("index").get<size_t>();
            if (index >= out.size()) {
                throw GatewayError("embed", "", 1, "embedding index out of range");
            }
            out[index] = item.at("embedding").get<std::vector<float>>();
        }
        return out;
    } catch (const json::exception& e) {
        throw GatewayError("embed", "", 1,
                           std::string("unexpected embeddings shape: ") + e.what());
    }
}

std::vector<double> HttpRerankBackend::score(const std::string& query,
                                             const std::vector<std::string>& passages) {
    json body{{"model", cfg_.model}, {"query", query}, {"documents", passages}};
    json res = post_json(cfg_, "/rerank", body, wire_calls_);
    try {
        std::vector<double> scores(passages.size(), 0.0);
        for (const json& item : res.at("results")) {
            size_t index = item.at("index").get<size_t>();
            if (index >= scores.size()) {
                throw GatewayError("rerank", "", 1, "rerank index out of range");
            }
            scores[index] = item.at("relevance_score").get<double>();
        }
        return scores;
    } catch (const json::exception& e) {
        throw GatewayError("rerank", "", 1,
                           std::string("unexpected rerank shape: ") + e.what());
    }
}

std::vector<double> PromptRerankBackend::score(const std::string& query,
                                               const std::vector<std::string>& passages) {
    std::ostringstream prompt;
    prompt << "Rate how relevant each passage is to the question on a 0-10 scale.\n\n"
           << "Question: " << query << "\n\n";
    for (size_t i = 0; i < passages.size(); ++i) {
        prompt << "Passage " << (i + 1) << ":\n" << passages[i] << "\n\n";
    }
    prompt << "Return a JSON object {\"scores\": [s1, s2, ...]} with exactly "
           << passages.size() << " numbers, in passage order.";

    ChatRequest req;
    req.task = ChatTask::rerank_prompt;
    req.system_prompt = "You are a relevance scoring engine. Respond only with JSON.";
    req.user_prompt = prompt.str();
    req.response_format = ResponseFormat::json_object;
    std::string response = chat_->complete(req);

    try {
        json obj = json::parse(response);
        auto scores = obj.at("scores").get<std::vector<double>>();
        if (scores.size() != passages.size()) {
            throw GatewayError("rerank", "", 1, "prompt reranker returned wrong score count");
        }
        return scores;
    } catch (const json::exception& e) {
        throw GatewayError("rerank", "", 1,
                           std::string("prompt reranker returned malformed JSON: ") + e.what());
    }
}

}  // namespace concord
