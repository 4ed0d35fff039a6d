#pragma once

#include <atomic>
#include <chrono>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "concord/corpus.hpp"
#include "concord/gateway.hpp"

namespace concord::test {

/// Unique temp directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<uint64_t> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("concord-test-" + std::to_string(rd()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Chat backend driven by a queue of scripted responses (front first). An entry equal
/// to "<THROW>" raises a transport-style error instead.
class ScriptedChatBackend : public ChatBackend {
public:
    explicit ScriptedChatBackend(std::vector<std::string> responses)
        : queue_(responses.begin(), responses.end()) {}

    std::string complete(const ChatRequest&) override {
        std::lock_guard lock(mutex_);
        ++calls_;
        if (queue_.empty()) throw std::runtime_error("scripted backend exhausted");
        std::string next = queue_.front();
        queue_.pop_front();
        if (next == "<THROW>") throw std::runtime_error("scripted transport failure");
        return next;
    }
    int calls() const { return calls_; }

private:
    std::mutex mutex_;
    std::deque<std::string> queue_;
    int calls_ = 0;
};

/// Chat backend computed from the request; handy for judge/classifier rules.
class FnChatBackend : public ChatBackend {
public:
    explicit FnChatBackend(std::function<std::string(const ChatRequest&)> fn)
        : fn_(std::move(fn)) {}
    std::string complete(const ChatRequest& req) override { return fn_(req); }

private:
    std::function<std::string(const ChatRequest&)> fn_;
};

class FnEmbedBackend : public EmbedBackend {
public:
    explicit FnEmbedBackend(std::function<std::vector<float>(const std::string&)> fn)
        : fn_(std::move(fn)) {}
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override {
        std::vector<std::vector<float>> out;
        for (const auto& t : texts) out.push_back(fn_(t));
        return out;
    }

private:
    std::function<std::vector<float>(const std::string&)> fn_;
};

class FnRerankBackend : public RerankBackend {
public:
    explicit FnRerankBackend(
        std::function<std::vector<double>(const std::string&, const std::vector<std::string>&)> fn)
        : fn_(std::move(fn)) {}
    std::vector<double> score(const std::string& q,
                              const std::vector<std::string>& p) override {
        return fn_(q, p);
    }

private:
    std::function<std::vector<double>(const std::string&, const std::vector<std::string>&)> fn_;
};

class ThrowingRerankBackend : public RerankBackend {
public:
    std::vector<double> score(const std::string&, const std::vector<std::string>&) override {
        throw std::runtime_error("reranker down");
    }
};

/// Tracks concurrent complete() calls so tests can assert the in-flight cap.
class ConcurrencyProbeChatBackend : public ChatBackend {
public:
    std::string complete(const ChatRequest&) override {
        int now = current_.fetch_add(1) + 1;
        int seen = max_seen_.load();
        while (now > seen && !max_seen_.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        current_.fetch_sub(1);
        return "ok";
    }
    int max_seen() const { return max_seen_.load(); }

private:
    std::atomic<int> current_{0};
    std::atomic<int> max_seen_{0};
};

inline GatewayOptions fast_options() {
    GatewayOptions opts;
    opts.backoff_ms = 0;
    return opts;
}

inline Section make_section(std::string heading, std::string body, std::vector<int> pages = {1}) {
    return Section{std::move(heading), std::move(body), std::move(pages)};
}

inline Handbook make_handbook(Organ organ, const std::string& center, Phase phase,
                              std::vector<Section> sections) {
    Handbook hb;
    hb.organ = organ;
    hb.center_id = center;
    hb.phase = phase;
    hb.id = compose_handbook_id(organ, center, phase);
    hb.source_path = hb.id + ".pdf";
    hb.sections = std::move(sections);
    for (const Section& s : hb.sections) {
        if (!hb.full_text.empty()) hb.full_text += "\n";
        hb.full_text += s.body;
    }
    return hb;
}

inline Question make_question(const std::string& id, const std::string& text, Organ organ,
                              std::vector<std::string> topics = {"Medications"}) {
    Question q;
    q.id = id;
    q.text = text;
    q.organ = organ;
    q.topics = std::move(topics);
    return q;
}

}  // namespace concord::test
