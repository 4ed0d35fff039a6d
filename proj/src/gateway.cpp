#include "concord/gateway.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include <json.hpp>

namespace concord {

using nlohmann::json;

std::string chat_task_name(ChatTask t) {
    switch (t) {
        case ChatTask::generate: return "generate";
        case ChatTask::absence: return "absence";
        case ChatTask::judge: return "judge";
        case ChatTask::rerank_prompt: return "rerank_prompt";
        case ChatTask::other: return "other";
    }
    return "?";
}

Gateway::Gateway(GatewayOptions opts, std::unique_ptr<ChatBackend> chat,
                 std::unique_ptr<EmbedBackend> embed, std::unique_ptr<RerankBackend> rerank)
    : opts_(std::move(opts)), chat_(std::move(chat)), embed_(std::move(embed)),
      rerank_(std::move(rerank)) {
    if (opts_.max_attempts < 1) opts_.max_attempts = 1;
    if (opts_.in_flight_cap < 1) opts_.in_flight_cap = 1;
}

void Gateway::admit_begin() {
    std::unique_lock lock(admit_mutex_);
    admit_cv_.wait(lock, [this] { return in_flight_ < opts_.in_flight_cap; });
    ++in_flight_;
}

void Gateway::admit_end() {
    {
        std::lock_guard lock(admit_mutex_);
        --in_flight_;
    }
    admit_cv_.notify_one();
}

std::optional<std::string> Gateway::cache_lookup(const std::string& kind,
                                                 const std::string& key) {
    if (!opts_.cache_dir) return std::nullopt;
    auto path = *opts_.cache_dir / kind / (key + ".json");
    if (!std::filesystem::exists(path)) return std::nullopt;
    json doc = json::parse(read_text_file(path));
    return doc.at("response").get<std::string>();
}

void Gateway::cache_store(const std::string& kind, const std::string& key,
                          const std::string& value) {
    if (!opts_.cache_dir) return;
    json doc{{"response", value}};
    atomic_write_file(*opts_.cache_dir / kind / (key + ".json"), doc.dump());
}

std::string Gateway::run_attempts(const std::string& kind, Counters& counters,
                                  const std::string& cache_key,
                                  const std::function<std::string()>& attempt_once) {
    counters.calls.fetch_add(1);
    if (auto cached = cache_lookup(kind, cache_key)) {
        counters.cache_hits.fetch_add(1);
        return *cached;
    }

    std::string last_error;
    for (int attempt = 1; attempt <= opts_.max_attempts; ++attempt) {
        if (attempt > 1) {
            counters.retries.fetch_add(1);
            if (opts_.backoff_ms > 0) {
                auto delay = std::chrono::milliseconds(opts_.backoff_ms << (attempt - 2));
                std::this_thread::sleep_for(delay);
            }
        }
        try {
            admit_begin();
            std::string response;
            try {
                response = attempt_once();
            } catch (...) {
                admit_end();
                throw;
            }
            admit_end();
            cache_store(kind, cache_key, response);
            return response;
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    counters.failures.fetch_add(1);
    throw GatewayError(kind, cache_key, opts_.max_attempts,
                       kind + " request failed after " + std::to_string(opts_.max_attempts) +
                           " attempts: " + last_error);
}

std::string Gateway::chat(const ChatRequest& req) {
    chat_by_task_[static_cast<size_t>(req.task)].fetch_add(1);

    json body{{"task", chat_task_name(req.task)},
              {"model", opts_.chat_model},
              {"system", req.system_prompt},
              {"user", req.user_prompt},
              {"temperature", req.temperature},
              {"max_output_tokens", req.max_output_tokens},
              {"format", req.response_format == ResponseFormat::json_object ? "json_object"
                                                                            : "free_text"}};
    std::string key = sha256_hex("chat\n" + opts_.chat_model + "\n" + body.dump());

    std::string response =
        run_attempts("chat", chat_stats_, key, [&] { return chat_->complete(req); });

    if (req.response_format == ResponseFormat::json_object) {
        auto parse_ok = [](const std::string& s) {
            return json::accept(s);
        };
        if (!parse_ok(response)) {
            // One dedicated retry for unparseable structured output.
            chat_stats_.retries.fetch_add(1);
            admit_begin();
            try {
                response = chat_->complete(req);
            } catch (...) {
                admit_end();
                chat_stats_.failures.fetch_add(1);
                throw MalformedResponseError("chat", key, opts_.max_attempts + 1,
                                             "structured response retry failed");
            }
            admit_end();
            if (!parse_ok(response)) {
                chat_stats_.failures.fetch_add(1);
                throw MalformedResponseError("chat", key, opts_.max_attempts + 1,
                                             "model returned malformed JSON after retry");
            }
            cache_store("chat", key, response);
        }
    }
    return response;
}

std::vector<std::vector<float>> Gateway::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) {
        throw GatewayError("embed", "", 0, "embed requires a non-empty text list");
    }
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());

    for (size_t begin = 0; begin < texts.size(); begin += opts_.embed_batch) {
        size_t end = std::min(texts.size(), begin + opts_.embed_batch);
        std::vector<std::string> batch(texts.begin() + begin, texts.begin() + end);

        json body{{"model", opts_.embed_model}, {"input", batch}};
        std::string key = sha256_hex("embed\n" + opts_.embed_model + "\n" + body.dump());

        std::string response = run_attempts("embed", embed_stats_, key, [&] {
            json vecs = json::array();
            for (auto& v : embed_->embed(batch)) vecs.push_back(v);
            return vecs.dump();
        });

        json vecs = json::parse(response);
        if (!vecs.is_array() || vecs.size() != batch.size()) {
            throw GatewayError("embed", key, 1, "embedding count mismatch");
        }
        for (const json& jv : vecs) {
            std::vector<float> v = jv.get<std::vector<float>>();
            int expected = expected_dim_.load();
            if (expected == 0) {
                expected_dim_.compare_exchange_strong(expected, static_cast<int>(v.size()));
                expected = expected_dim_.load();
            }
            if (static_cast<int>(v.size()) != expected) {
                throw GatewayError("embed", key, 1,
                                   "embedding dimension drift: got " +
                                       std::to_string(v.size()) + ", expected " +
                                       std::to_string(expected));
            }
            double norm_sq = 0.0;
            for (float x : v) norm_sq += static_cast<double>(x) * x;
            if (norm_sq <= 0.0) {
                throw GatewayError("embed", key, 1, "embedding has zero norm");
            }
            float inv = static_cast<float>(1.0 / std::sqrt(norm_sq));
            for (float& x : v) x *= inv;
            out.push_back(std::move(v));
        }
    }
    return out;
}

std::vector<double> Gateway::score_pairs(const std::string& question,
                                         const std::vector<std::string>& passages) {
    if (passages.empty()) {
        throw GatewayError("rerank", "", 0, "score_pairs requires non-empty passages");
    }
    json body{{"model", opts_.rerank_model}, {"query", question}, {"documents", passages}};
    std::string key = sha256_hex("rerank\n" + opts_.rerank_model + "\n" + body.dump());

    std::string response = run_attempts("rerank", rerank_stats_, key, [&] {
        json scores = rerank_->score(question, passages);
        return scores.dump();
    });

    json scores = json::parse(response);
    if (!scores.is_array() || scores.size() != passages.size()) {
        throw GatewayError("rerank", key, 1,
                           "reranker returned " + std::to_string(scores.size()) +
                               " scores for " + std::to_string(passages.size()) + " passages");
    }
    return scores.get<std::vector<double>>();
}

GatewayStatsSnapshot Gateway::stats() const {
    GatewayStatsSnapshot s;
    auto load = [](const Counters& c) {
        EndpointStats e;
        e.calls = c.calls.load();
        e.cache_hits = c.cache_hits.load();
        e.retries = c.retries.load();
        e.failures = c.failures.load();
        return e;
    };
    s.chat = load(chat_stats_);
    s.embed = load(embed_stats_);
    s.rerank = load(rerank_stats_);
    s.network_calls = chat_->wire_calls() + embed_->wire_calls() + rerank_->wire_calls();
    for (size_t i = 0; i < chat_by_task_.size(); ++i) {
        uint64_t n = chat_by_task_[i].load();
        if (n) s.chat_calls_by_task[chat_task_name(static_cast<ChatTask>(i))] = n;
    }
    return s;
}

}  // namespace concord
