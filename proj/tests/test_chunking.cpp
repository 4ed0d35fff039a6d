#include <doctest.h>

#include <random>
#include <sstream>

#include "concord/chunking.hpp"
#include "concord/text.hpp"
#include "support/helpers.hpp"

using namespace concord;

namespace {

std::string words(size_t n, std::mt19937& rng, bool with_sentences = true) {
    static const char* kWords[] = {"kidney", "diet",  "fluid",  "sodium", "labs",
                                   "clinic", "dose",  "daily",  "check",  "team"};
    std::ostringstream out;
    size_t since_period = 0;
    for (size_t i = 0; i < n; ++i) {
        if (i) out << " ";
        out << kWords[rng() % 10];
        ++since_period;
        // Periods count as tokens themselves, so emit words until the budget is used.
        if (with_sentences && since_period >= 5 + rng() % 10 && i + 2 < n) {
            out << ".";
            ++i;  // the period token
            since_period = 0;
        }
    }
    return out.str();
}

std::string body_of(const Chunk& c) {
    return c.text.substr(c.prefix_len);
}

}  // namespace

TEST_CASE("section under budget yields exactly one chunk with heading prefix") {
    std::mt19937 rng(1);
    std::string body = words(100, rng);
    REQUIRE(count_tokens(body) == 100);
    Handbook hb = test::make_handbook(Organ::kidney, "center-001", Phase::pre,
                                      {test::make_section("Diet", body, {4, 5})});
    ChunkingConfig cfg;
    auto result = chunk_handbook(hb, cfg);
    CHECK(result.warnings.empty());
    REQUIRE(result.chunks.size() == 1);
    const Chunk& c = result.chunks[0];
    CHECK(c.chunk_id == "kidney-center-001-pre#0");
    CHECK(c.text == "Diet: " + body);
    CHECK(c.token_count == 100);
    CHECK(c.pages == std::vector<int>{4, 5});
    CHECK(chunk_handbook_id(c.chunk_id) == "kidney-center-001-pre");
}

TEST_CASE("empty heading means no prefix") {
    Handbook hb = test::make_handbook(Organ::heart, "center-002", Phase::post,
                                      {test::make_section("", "Plain body text.")});
    auto result = chunk_handbook(hb, ChunkingConfig{});
    REQUIRE(result.chunks.size() == 1);
    CHECK(result.chunks[0].text == "Plain body text.");
    CHECK(result.chunks[0].prefix_len == 0);
}

TEST_CASE("oversized section splits at sentence boundaries with inherited heading") {
    std::mt19937 rng(2);
    // Six sentences of ~100 tokens each: ~600 tokens total, over the 512 budget.
    std::ostringstream body;
    for (int s = 0; s < 6; ++s) {
        if (s) body << " ";
        body << words(99, rng, false) << ".";
    }
    std::string text = body.str();
    REQUIRE(count_tokens(text) == 600);

    Handbook hb = test::make_handbook(Organ::kidney, "center-001", Phase::pre,
                                      {test::make_section("Monitoring", text)});
    ChunkingConfig cfg;
    auto result = chunk_handbook(hb, cfg);
    CHECK(result.warnings.empty());
    REQUIRE(result.chunks.size() >= 2);
    std::string reassembled;
    for (const Chunk& c : result.chunks) {
        CHECK(c.token_count <= cfg.max_tokens);
        CHECK(c.heading == "Monitoring");
        CHECK(c.text.rfind("Monitoring: ", 0) == 0);
        // count_tokens is the budget oracle for every sub-chunk.
        CHECK(count_tokens(body_of(c)) == c.token_count);
        reassembled += body_of(c);
    }
    CHECK(reassembled == text);
}

TEST_CASE("three small sections stay in section order") {
    Handbook hb = test::make_handbook(
        Organ::liver, "center-003", Phase::combined,
        {test::make_section("A", "First body."), test::make_section("B", "Second body."),
         test::make_section("C", "Third body.")});
    auto result = chunk_handbook(hb, ChunkingConfig{});
    REQUIRE(result.chunks.size() == 3);
    CHECK(result.chunks[0].text == "A: First body.");
    CHECK(result.chunks[1].text == "B: Second body.");
    CHECK(result.chunks[2].text == "C: Third body.");
    for (size_t i = 0; i < 3; ++i) {
        CHECK(result.chunks[i].chunk_id ==
              compose_chunk_id("liver-center-003-combined", i));
        CHECK(result.chunks[i].section_index == i);
    }
}

TEST_CASE("single oversized sentence is hard-wrapped and flagged") {
    std::mt19937 rng(3);
    std::string sentence = words(700, rng, false);  // no sentence breaks at all
    REQUIRE(count_tokens(sentence) == 700);
    Handbook hb = test::make_handbook(Organ::lung, "center-004", Phase::pre,
                                      {test::make_section("Long", sentence)});
    ChunkingConfig cfg;
    auto result = chunk_handbook(hb, cfg);
    REQUIRE(result.warnings.size() == 1);
    CHECK(result.warnings[0].find("hard-wrapped") != std::string::npos);
    REQUIRE(result.chunks.size() == 2);
    std::string reassembled;
    for (const Chunk& c : result.chunks) {
        CHECK(c.token_count <= cfg.max_tokens);  // bound still holds post-wrap
        reassembled += body_of(c);
    }
    CHECK(reassembled == sentence);
}

TEST_CASE("chunking is deterministic") {
    std::mt19937 rng(4);
    Handbook hb = test::make_handbook(Organ::heart, "center-005", Phase::post,
                                      {test::make_section("H1", words(800, rng)),
                                       test::make_section("H2", words(30, rng))});
    auto a = chunk_handbook(hb, ChunkingConfig{});
    auto b = chunk_handbook(hb, ChunkingConfig{});
    CHECK(chunks_to_jsonl(a.chunks) == chunks_to_jsonl(b.chunks));
}

TEST_CASE("chunk jsonl round-trip") {
    std::mt19937 rng(5);
    Handbook hb = test::make_handbook(Organ::heart, "center-006", Phase::pre,
                                      {test::make_section("H", words(50, rng))});
    auto chunks = chunk_handbook(hb, ChunkingConfig{}).chunks;
    auto reloaded = chunks_from_jsonl(chunks_to_jsonl(chunks));
    CHECK(chunks_to_jsonl(reloaded) == chunks_to_jsonl(chunks));
}

TEST_CASE("config validation") {
    ChunkingConfig cfg;
    cfg.max_tokens = 16;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.max_tokens = 512;
    cfg.sentence_split_rule = "fancy";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("coverage and bound hold on randomized handbooks") {
    std::mt19937 rng(6);
    ChunkingConfig cfg;
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Section> sections;
        size_t count = 1 + rng() % 6;
        for (size_t s = 0; s < count; ++s) {
            size_t tokens = 1 + rng() % 1200;
            sections.push_back(test::make_section(s % 3 ? "Heading" : "", words(tokens, rng)));
        }
        Handbook hb = test::make_handbook(Organ::pancreas, "center-009", Phase::combined,
                                          std::move(sections));
        auto result = chunk_handbook(hb, cfg);

        std::vector<std::string> reassembled(hb.sections.size());
        size_t expected_ordinal = 0;
        for (const Chunk& c : result.chunks) {
            CHECK(c.token_count <= cfg.max_tokens);
            CHECK(c.chunk_id == compose_chunk_id(hb.id, expected_ordinal));
            ++expected_ordinal;
            reassembled[c.section_index] += body_of(c);
        }
        for (size_t s = 0; s < hb.sections.size(); ++s) {
            CHECK(reassembled[s] == hb.sections[s].body);
        }
    }
}
