#pragma once

#include <filesystem>
#include <string>

namespace concord {

struct PromptTemplate {
    std::string system;
    std::string user;  // carries {placeholders}
};

/// Prompt text is config, not code: each asset file holds the system prompt, a line
/// containing only "---", then the user template.
struct PromptSet {
    PromptTemplate generate;  // {question}, {passages}
    PromptTemplate absence;   // {answer}
    PromptTemplate judge;     // {question}, {answer_a}, {answer_b}
    std::string hash;         // sha256 over the three raw files

    static PromptSet load(const std::filesystem::path& dir);
};

std::string apply_placeholder(std::string text, std::string_view key, std::string_view value);

}  // namespace concord
