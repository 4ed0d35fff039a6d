#include "concord/text.hpp"

#include <array>
#include <cctype>

#include "concord/util.hpp"

namespace concord {

namespace {

inline bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

inline bool is_word_char(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u) != 0;
}

inline bool is_terminator(char c) {
    return c == '.' || c == '!' || c == '?';
}

inline bool is_closer(char c) {
    return c == '"' || c == '\'' || c == ')' || c == ']';
}

bool is_abbreviation(std::string_view word) {
    static const std::array<std::string_view, 16> kAbbrev = {
        "dr", "mr", "mrs", "ms", "prof", "rev", "sr",   "jr",
        "st", "vs", "etc", "fig", "al",   "inc", "dept", "approx"};
    std::string lower = to_lower(word);
    for (auto a : kAbbrev) {
        if (lower == a) return true;
    }
    return false;
}

}  // namespace

std::vector<Span> token_spans(std::string_view text) {
    std::vector<Span> spans;
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        if (is_space(text[i])) {
            ++i;
            continue;
        }
        size_t begin = i;
        bool word = is_word_char(text[i]);
        while (i < n && !is_space(text[i]) && is_word_char(text[i]) == word) {
            ++i;
        }
        spans.push_back({begin, i});
    }
    return spans;
}

size_t count_tokens(std::string_view text) {
    return token_spans(text).size();
}

std::vector<std::string> lexical_terms(std::string_view text) {
    std::vector<std::string> terms;
    for (const Span& s : token_spans(text)) {
        terms.push_back(to_lower(text.substr(s.begin, s.end - s.begin)));
    }
    return terms;
}

std::vector<Span> sentence_spans(std::string_view text) {
    std::vector<Span> spans;
    const size_t n = text.size();
    size_t start = 0;
    size_t i = 0;
    while (i < n) {
        if (!is_terminator(text[i])) {
            ++i;
            continue;
        }
        size_t run_begin = i;
        while (i < n && is_terminator(text[i])) ++i;
        size_t run_end = i;
        while (i < n && is_closer(text[i])) ++i;
        size_t boundary = i;

        bool followed_ok = (i == n) || is_space(text[i]);
        bool abbrev_guard = false;
        if (run_end - run_begin == 1 && text[run_begin] == '.') {
            size_t w = run_begin;
            while (w > start && is_word_char(text[w - 1])) --w;
            abbrev_guard = is_abbreviation(text.substr(w, run_begin - w));
        }
        if (followed_ok && !abbrev_guard && boundary < n) {
            spans.push_back({start, boundary});
            start = boundary;
        }
        // A boundary at end of text falls through to the final-span handling below.
    }
    if (start < n) {
        spans.push_back({start, n});
    }
    return spans;
}

std::vector<std::string> split_sentences(std::string_view text) {
    std::vector<std::string> out;
    for (const Span& s : sentence_spans(text)) {
        std::string t = trim(text.substr(s.begin, s.end - s.begin));
        if (!t.empty()) {
            out.push_back(std::move(t));
        }
    }
    return out;
}

}  // namespace concord
