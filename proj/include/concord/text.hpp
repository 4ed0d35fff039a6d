#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace concord {

struct Span {
    size_t begin = 0;
    size_t end = 0;  // exclusive
};

// Token rule ("whitespace-plus-punctuation"): a token is either a maximal run of
// alphanumeric characters (bytes >= 0x80 count as letters so multi-byte UTF-8 stays
// inside one token) or a maximal run of other non-whitespace characters (a punctuation
// cluster). Whitespace separates tokens and is never part of one.
std::vector<Span> token_spans(std::string_view text);
size_t count_tokens(std::string_view text);

/// Lowercased token strings under the same rule; used as BM25 terms.
std::vector<std::string> lexical_terms(std::string_view text);

// Sentence rule: a boundary falls after a run of '.', '!' or '?' (plus any closing
// quotes/brackets) that is followed by whitespace, unless the run is a single '.'
// preceded by a known abbreviation (Dr, Mr, Mrs, Ms, Prof, Rev, Sr, Jr, St, vs, etc,
// fig, al, inc, dept, approx — case-insensitive). End of text always closes the final
// sentence. sentence_spans partitions [0, text.size()) exactly; whitespace after a
// boundary belongs to the next span.
std::vector<Span> sentence_spans(std::string_view text);

/// Trimmed sentence strings; never empty entries.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace concord
