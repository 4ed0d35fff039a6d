#include "concord/backends_mock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <regex>
#include <set>

#include <json.hpp>

#include "concord/text.hpp"
#include "concord/util.hpp"

namespace concord {

using nlohmann::json;

namespace {

std::string section_between(const std::string& text, const std::string& begin_marker,
                            const std::string& end_marker) {
    size_t begin = text.find(begin_marker);
    if (begin == std::string::npos) return text;
    begin += begin_marker.size();
    size_t end = end_marker.empty() ? std::string::npos : text.find(end_marker, begin);
    return text.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
}

bool contains_token(const std::string& haystack, const std::string& token) {
    auto terms = lexical_terms(haystack);
    std::string needle = to_lower(token);
    return std::find(terms.begin(), terms.end(), needle) != terms.end();
}

std::string mock_generate(const ChatRequest& req) {
    std::string question = section_between(req.user_prompt, "Question:", "Passages:");
    static const std::regex kDirective(R"(key=([A-Za-z0-9_]+); answer=([^.\n]*))");
    auto begin = std::sregex_iterator(req.user_prompt.begin(), req.user_prompt.end(), kDirective);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        if (contains_token(question, (*it)[1].str())) {
            return trim((*it)[2].str());
        }
    }
    return "NOT ADDRESSED - the handbook does not cover this question.";
}

std::string mock_absence(const ChatRequest& req) {
    // Inspect only the quoted answer, not the surrounding instructions.
    std::string answer =
        to_lower(section_between(req.user_prompt, "Answer to classify:", "Reply with"));
    for (const char* marker :
         {"not covered", "does not cover", "no information", "not discussed"}) {
        if (answer.find(marker) != std::string::npos) return "YES";
    }
    return "NO";
}

std::string mock_judge(const ChatRequest& req) {
    std::string a = trim(section_between(req.user_prompt, "Answer A:", "Answer B:"));
    std::string b = trim(section_between(req.user_prompt, "Answer B:", "\nReturn a JSON"));

    json verdict;
    if (a == b) {
        verdict = {{"label", "Consistent"},
                   {"justification", "Scripted judge: both answers give identical guidance."}};
    } else if (a.find(b) != std::string::npos || b.find(a) != std::string::npos) {
        verdict = {{"label", "Complementary"},
                   {"justification", "Scripted judge: one answer extends the other."}};
    } else {
        auto ta = lexical_terms(a);
        auto tb = lexical_terms(b);
        bool same_head = !ta.empty() && !tb.empty() && ta.front() == tb.front();
        if (same_head) {
            verdict = {{"label", "Divergent"},
                       {"justification",
                        "Scripted judge: same subject with different specifics."},
                       {"subtopic", "scripted"},
                       {"significance", "medium"}};
        } else {
            verdict = {{"label", "Contradictory"},
                       {"justification", "Scripted judge: opposing guidance."},
                       {"subtopic", "scripted"},
                       {"significance", "high"}};
        }
    }
    return verdict.dump();
}

uint64_t seed_from_text(const std::string& text) {
    std::string hex = sha256_hex(text).substr(0, 16);
    return std::stoull(hex, nullptr, 16);
}

uint64_t splitmix64(uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::string MockChatBackend::complete(const ChatRequest& req) {
    switch (req.task) {
        case ChatTask::generate: return mock_generate(req);
        case ChatTask::absence: return mock_absence(req);
        case ChatTask::judge: return mock_judge(req);
        default: return "ok";
    }
}

std::vector<std::vector<float>> MockEmbedBackend::embed(const std::vector<std::string>& texts) {
    std::vector<std::vector<float>> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        uint64_t state = seed_from_text(text);
        std::vector<float> v(dim_);
        for (float& x : v) {
            // Uniform in [-1, 1); the gateway normalizes.
            x = static_cast<float>(
                (static_cast<double>(splitmix64(state) >> 11) / 9007199254740992.0) * 2.0 - 1.0);
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<double> MockRerankBackend::score(const std::string& query,
                                             const std::vector<std::string>& passages) {
    auto qterms = lexical_terms(query);
    std::set<std::string> qset(qterms.begin(), qterms.end());
    std::vector<double> scores;
    scores.reserve(passages.size());
    for (const std::string& p : passages) {
        auto pterms = lexical_terms(p);
        std::set<std::string> pset(pterms.begin(), pterms.end());
        double overlap = 0;
        for (const auto& t : pset) {
            if (qset.count(t)) overlap += 1.0;
        }
        scores.push_back(overlap);
    }
    return scores;
}

}  // namespace concord
