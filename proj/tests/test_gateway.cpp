#include <doctest.h>

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "concord/backends_http.hpp"
#include "concord/backends_mock.hpp"
#include "concord/gateway.hpp"
#include "support/helpers.hpp"

using namespace concord;
using namespace concord::test;
using nlohmann::json;

namespace {

std::unique_ptr<Gateway> gateway_of(std::unique_ptr<ChatBackend> chat,
                                    GatewayOptions opts = fast_options()) {
    return std::make_unique<Gateway>(std::move(opts), std::move(chat),
                                     std::make_unique<MockEmbedBackend>(),
                                     std::make_unique<MockRerankBackend>());
}

ChatRequest basic_request() {
    ChatRequest req;
    req.task = ChatTask::other;
    req.user_prompt = "hello";
    return req;
}

}  // namespace

TEST_CASE("chat returns the mock's canned string") {
    auto gw = gateway_of(std::make_unique<ScriptedChatBackend>(
        std::vector<std::string>{"canned response"}));
    CHECK(gw->chat(basic_request()) == "canned response");
    auto stats = gw->stats();
    CHECK(stats.chat.calls == 1);
    CHECK(stats.chat.failures == 0);
    CHECK(stats.network_calls == 0);
}

TEST_CASE("json_object mode retries once on unparseable output") {
    auto gw = gateway_of(std::make_unique<ScriptedChatBackend>(
        std::vector<std::string>{"this is not json", R"({"label":"Consistent"})"}));
    ChatRequest req = basic_request();
    req.response_format = ResponseFormat::json_object;
    CHECK(gw->chat(req) == R"({"label":"Consistent"})");
    CHECK(gw->stats().chat.retries == 1);
}

TEST_CASE("json_object mode fails typed after the retry") {
    auto gw = gateway_of(std::make_unique<ScriptedChatBackend>(
        std::vector<std::string>{"garbage", "still garbage"}));
    ChatRequest req = basic_request();
    req.response_format = ResponseFormat::json_object;
    CHECK_THROWS_AS(gw->chat(req), MalformedResponseError);
}

TEST_CASE("transport errors retry with backoff then fail typed") {
    auto backend = std::make_unique<ScriptedChatBackend>(
        std::vector<std::string>{"<THROW>", "<THROW>", "<THROW>"});
    auto* raw = backend.get();
    auto gw = gateway_of(std::move(backend));
    try {
        gw->chat(basic_request());
        FAIL("expected GatewayError");
    } catch (const GatewayError& e) {
        CHECK(e.kind == "chat");
        CHECK(e.attempts == 3);
        CHECK_FALSE(e.request_digest.empty());
    }
    CHECK(raw->calls() == 3);
    auto stats = gw->stats();
    CHECK(stats.chat.retries == 2);
    CHECK(stats.chat.failures == 1);
}

TEST_CASE("transient transport error recovers within the retry budget") {
    auto gw = gateway_of(std::make_unique<ScriptedChatBackend>(
        std::vector<std::string>{"<THROW>", "recovered"}));
    CHECK(gw->chat(basic_request()) == "recovered");
    CHECK(gw->stats().chat.retries == 1);
}

TEST_CASE("embed: identical texts produce identical unit vectors") {
    auto gw = gateway_of(std::make_unique<MockChatBackend>());
    auto a = gw->embed({"the same text", "the same text", "different"});
    REQUIRE(a.size() == 3);
    CHECK(a[0] == a[1]);
    CHECK(a[0] != a[2]);
    for (const auto& v : a) {
        double norm = 0;
        for (float x : v) norm += double(x) * x;
        CHECK(std::abs(std::sqrt(norm) - 1.0) <= 1e-6);
    }
}

TEST_CASE("embed: empty input is an error") {
    auto gw = gateway_of(std::make_unique<MockChatBackend>());
    CHECK_THROWS_AS(gw->embed({}), GatewayError);
}

TEST_CASE("embed: dimension drift across a run is a hard error") {
    int calls = 0;
    auto embed = std::make_unique<FnEmbedBackend>([&](const std::string&) {
        ++calls;
        return std::vector<float>(calls == 1 ? 4 : 8, 0.5f);
    });
    Gateway gw(fast_options(), std::make_unique<MockChatBackend>(), std::move(embed),
               std::make_unique<MockRerankBackend>());
    CHECK(gw.embed({"first"}).front().size() == 4);
    CHECK_THROWS_AS(gw.embed({"second"}), GatewayError);
}

TEST_CASE("score_pairs basics and count mismatch") {
    auto length_scorer = std::make_unique<FnRerankBackend>(
        [](const std::string&, const std::vector<std::string>& p) {
            std::vector<double> s;
            for (const auto& text : p) s.push_back(static_cast<double>(text.size()));
            return s;
        });
    Gateway gw(fast_options(), std::make_unique<MockChatBackend>(),
               std::make_unique<MockEmbedBackend>(), std::move(length_scorer));

    auto single = gw.score_pairs("q", {"only"});
    REQUIRE(single.size() == 1);

    auto scores = gw.score_pairs("q", {"short", "the longest passage of them all", "mid one"});
    CHECK(scores[1] > scores[0]);
    CHECK(scores[1] > scores[2]);

    CHECK_THROWS_AS(gw.score_pairs("q", {}), GatewayError);

    auto broken = std::make_unique<FnRerankBackend>(
        [](const std::string&, const std::vector<std::string>&) {
            return std::vector<double>{1.0};  // wrong count
        });
    Gateway gw2(fast_options(), std::make_unique<MockChatBackend>(),
                std::make_unique<MockEmbedBackend>(), std::move(broken));
    CHECK_THROWS_AS(gw2.score_pairs("q", {"a", "b"}), GatewayError);
}

TEST_CASE("disk cache serves repeats and survives process boundaries") {
    TempDir dir;
    GatewayOptions opts = fast_options();
    opts.cache_dir = dir.path();

    auto backend = std::make_unique<ScriptedChatBackend>(std::vector<std::string>{"fresh"});
    auto* raw = backend.get();
    auto gw = gateway_of(std::move(backend), opts);

    CHECK(gw->chat(basic_request()) == "fresh");
    CHECK(gw->chat(basic_request()) == "fresh");  // served from cache
    CHECK(raw->calls() == 1);
    auto stats = gw->stats();
    CHECK(stats.chat.calls == 2);
    CHECK(stats.chat.cache_hits == 1);

    // A new gateway over the same cache dir never touches its backend.
    auto gw2 = gateway_of(std::make_unique<ScriptedChatBackend>(std::vector<std::string>{}),
                          opts);
    CHECK(gw2->chat(basic_request()) == "fresh");
    CHECK(gw2->stats().chat.cache_hits == 1);

    // Layout contract: cache/<kind>/<sha256>.json
    bool found = false;
    for (const auto& entry :
         std::filesystem::recursive_directory_iterator(dir.path() / "chat")) {
        if (entry.path().extension() == ".json") found = true;
    }
    CHECK(found);
}

TEST_CASE("rate limiter never exceeds the in-flight cap") {
    GatewayOptions opts = fast_options();
    opts.in_flight_cap = 2;
    auto probe = std::make_unique<ConcurrencyProbeChatBackend>();
    auto* raw = probe.get();
    auto gw = gateway_of(std::move(probe), opts);

    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&gw, i] {
            ChatRequest req;
            req.user_prompt = "call " + std::to_string(i);
            gw->chat(req);
        });
    }
    for (auto& t : threads) t.join();
    CHECK(raw->max_seen() <= 2);
    CHECK(gw->stats().chat.calls == 8);
}

TEST_CASE("mock-backed runs make zero network calls") {
    Gateway gw(fast_options(), std::make_unique<MockChatBackend>(),
               std::make_unique<MockEmbedBackend>(), std::make_unique<MockRerankBackend>());
    ChatRequest req;
    req.task = ChatTask::generate;
    req.user_prompt = "Question:\nnothing\n\nPassages:\nnone";
    gw.chat(req);
    gw.embed({"text"});
    gw.score_pairs("q", {"p"});
    CHECK(gw.stats().network_calls == 0);
    CHECK(gw.stats().total_backend_calls() == 3);
}

TEST_CASE("per-task chat accounting") {
    auto gw = gateway_of(std::make_unique<ScriptedChatBackend>(
        std::vector<std::string>{"a", "b", "c"}));
    ChatRequest req = basic_request();
    req.task = ChatTask::judge;
    gw->chat(req);
    gw->chat(req);
    req.task = ChatTask::generate;
    gw->chat(req);
    auto by_task = gw->stats().chat_calls_by_task;
    CHECK(by_task["judge"] == 2);
    CHECK(by_task["generate"] == 1);
}

TEST_CASE("http backends speak the expected wire shapes") {
    httplib::Server server;
    std::string seen_auth;
    int chat_hits = 0;

    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        ++chat_hits;
        if (chat_hits == 1) {
            res.status = 500;  // force one retry
            res.set_content("overloaded", "text/plain");
            return;
        }
        json body = json::parse(req.body);
        CHECK(body.at("model") == "test-chat");
        CHECK(body.at("messages").size() == 2);
        json reply{{"choices",
                    json::array({json{{"message", json{{"role", "assistant"},
                                                       {"content", "pong"}}}}})}};
        res.set_content(reply.dump(), "application/json");
    });
    server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
        json body = json::parse(req.body);
        json data = json::array();
        for (size_t i = 0; i < body.at("input").size(); ++i) {
            data.push_back(json{{"index", i}, {"embedding", json::array({1.0, 0.0})}});
        }
        res.set_content(json{{"data", data}}.dump(), "application/json");
    });
    server.Post("/v1/rerank", [&](const httplib::Request& req, httplib::Response& res) {
        json body = json::parse(req.body);
        json results = json::array();
        for (size_t i = 0; i < body.at("documents").size(); ++i) {
            results.push_back(json{{"index", i}, {"relevance_score", 0.5 + i}});
        }
        res.set_content(json{{"results", results}}.dump(), "application/json");
    });

    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    std::string base = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    HttpEndpointConfig chat_cfg{base, "secret-key", "test-chat", 5};
    Gateway gw(fast_options(), std::make_unique<HttpChatBackend>(chat_cfg),
               std::make_unique<HttpEmbedBackend>(HttpEndpointConfig{base, "", "test-embed", 5}),
               std::make_unique<HttpRerankBackend>(HttpEndpointConfig{base, "", "test-rerank", 5}));

    CHECK(gw.chat(basic_request()) == "pong");
    CHECK(seen_auth == "Bearer secret-key");
    CHECK(gw.stats().chat.retries == 1);  // the scripted 500

    auto vecs = gw.embed({"alpha", "beta"});
    REQUIRE(vecs.size() == 2);
    CHECK(vecs[0][0] == doctest::Approx(1.0f));

    auto scores = gw.score_pairs("q", {"p1", "p2"});
    REQUIRE(scores.size() == 2);
    CHECK(scores[1] == doctest::Approx(1.5));

    CHECK(gw.stats().network_calls >= 4);

    server.stop();
    server_thread.join();
}
