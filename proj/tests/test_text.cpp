#include <doctest.h>

#include <random>

#include "concord/text.hpp"
#include "concord/util.hpp"

using namespace concord;

TEST_CASE("count_tokens basic rule") {
    CHECK(count_tokens("") == 0);
    // Hand application of the whitespace-plus-punctuation rule.
    CHECK(count_tokens("hello world") == 2);
    CHECK(count_tokens("hello, world!") == 4);  // "hello" "," "world" "!"
    CHECK(count_tokens("Dr. Smith arrived.") == 5);
    CHECK(count_tokens("   \t\n ") == 0);
    CHECK(count_tokens("a") == 1);
    CHECK(count_tokens("don't") == 3);  // "don" "'" "t"
}

TEST_CASE("count_tokens concatenation") {
    // Two 10-token strings joined with a space count 20.
    std::string ten = "one two three four five six seven eight nine ten";
    REQUIRE(count_tokens(ten) == 10);
    CHECK(count_tokens(ten + " " + ten) == 20);
}

TEST_CASE("count_tokens monotone under concatenation") {
    std::mt19937 rng(7);
    const std::string alphabet = "ab .,!x9";
    auto random_text = [&](size_t len) {
        std::string s;
        for (size_t i = 0; i < len; ++i) {
            s.push_back(alphabet[rng() % alphabet.size()]);
        }
        return s;
    };
    for (int trial = 0; trial < 200; ++trial) {
        std::string a = random_text(rng() % 30);
        std::string b = random_text(rng() % 30);
        size_t joined = count_tokens(a + b);
        CHECK(joined >= std::max(count_tokens(a), count_tokens(b)));
        CHECK(joined <= count_tokens(a) + count_tokens(b));
    }
}

TEST_CASE("lexical_terms lowercases") {
    auto terms = lexical_terms("Kidney DIET plan");
    REQUIRE(terms.size() == 3);
    CHECK(terms[0] == "kidney");
    CHECK(terms[1] == "diet");
    CHECK(terms[2] == "plan");
}

TEST_CASE("split_sentences boundary rule") {
    auto s = split_sentences("A. B? C!");
    REQUIRE(s.size() == 3);
    CHECK(s[0] == "A.");
    CHECK(s[1] == "B?");
    CHECK(s[2] == "C!");
}

TEST_CASE("split_sentences no terminal punctuation") {
    auto s = split_sentences("no punctuation at all");
    REQUIRE(s.size() == 1);
    CHECK(s[0] == "no punctuation at all");
}

TEST_CASE("split_sentences abbreviation guard") {
    auto s = split_sentences("Dr. Smith arrived.");
    REQUIRE(s.size() == 1);
    CHECK(s[0] == "Dr. Smith arrived.");

    auto t = split_sentences("Ask Dr. Lee. Then rest.");
    REQUIRE(t.size() == 2);
    CHECK(t[0] == "Ask Dr. Lee.");
    CHECK(t[1] == "Then rest.");
}

TEST_CASE("split_sentences ignores internal dots") {
    auto s = split_sentences("Visit www.example.org today. Then call.");
    REQUIRE(s.size() == 2);
    CHECK(s[0] == "Visit www.example.org today.");
}

TEST_CASE("sentence_spans partition the input exactly") {
    std::mt19937 rng(11);
    const std::string alphabet = "abc d.!? D\nr";
    for (int trial = 0; trial < 300; ++trial) {
        size_t len = rng() % 80;
        std::string text;
        for (size_t i = 0; i < len; ++i) text.push_back(alphabet[rng() % alphabet.size()]);
        auto spans = sentence_spans(text);
        size_t cursor = 0;
        for (const Span& s : spans) {
            CHECK(s.begin == cursor);
            CHECK(s.end > s.begin);
            cursor = s.end;
        }
        CHECK(cursor == text.size());
        if (text.empty()) CHECK(spans.empty());
    }
}

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("format helpers") {
    CHECK(format_thousands(0) == "0");
    CHECK(format_thousands(999) == "999");
    CHECK(format_thousands(14132) == "14,132");
    CHECK(format_thousands(1704242) == "1,704,242");
    CHECK(format_fixed(0.87096, 3) == "0.871");
    CHECK(format_fixed(20.776, 1) == "20.8");
}
