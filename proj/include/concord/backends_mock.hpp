#pragma once

#include <memory>
#include <string>
#include <vector>

#include "concord/gateway.hpp"

namespace concord {

// Deterministic offline stand-ins for the three endpoints (the CLI --mock mode).
// The chat mock understands the stock prompt templates:
//   generate: answers with the payload of the first "key=<K>; answer=<text>" line found
//             in the passages whose key token also occurs in the question, else the
//             NOT ADDRESSED sentinel. Payloads end at the first '.' or newline.
//   absence:  YES when the quoted answer admits non-coverage ("not covered",
//             "does not cover", "no information", "not discussed"), else NO.
//   judge:    equal answers -> Consistent; one containing the other -> Complementary;
//             same first token -> Divergent (medium); otherwise Contradictory (high).

class MockChatBackend : public ChatBackend {
public:
    std::string complete(const ChatRequest& req) override;
};

/// Hash-seeded unit-direction vectors; identical texts embed identically.
class MockEmbedBackend : public EmbedBackend {
public:
    explicit MockEmbedBackend(size_t dim = 32) : dim_(dim) {}
    std::vector<std::vector<float>> embed(const std::vector<std::string>& texts) override;

private:
    size_t dim_;
};

/// Scores a passage by how many distinct query terms it shares with the question.
class MockRerankBackend : public RerankBackend {
public:
    std::vector<double> score(const std::string& query,
                              const std::vector<std::string>& passages) override;
};

}  // namespace concord
