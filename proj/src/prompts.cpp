#include "concord/prompts.hpp"

#include "concord/util.hpp"

namespace concord {

namespace {

PromptTemplate parse_template(const std::string& raw, const std::string& name) {
    size_t pos = raw.find("\n---\n");
    if (pos == std::string::npos) {
        throw ConfigError("prompt asset " + name + " must contain a '---' separator line");
    }
    PromptTemplate t;
    t.system = trim(raw.substr(0, pos));
    t.user = trim(raw.substr(pos + 5));
    if (t.user.empty()) {
        throw ConfigError("prompt asset " + name + " has an empty user template");
    }
    return t;
}

}  // namespace

PromptSet PromptSet::load(const std::filesystem::path& dir) {
    std::string gen = read_text_file(dir / "generate.txt");
    std::string abs = read_text_file(dir / "absence.txt");
    std::string jud = read_text_file(dir / "judge.txt");

    PromptSet set;
    set.generate = parse_template(gen, "generate.txt");
    set.absence = parse_template(abs, "absence.txt");
    set.judge = parse_template(jud, "judge.txt");
    set.hash = sha256_hex(gen + "\x1e" + abs + "\x1e" + jud);
    return set;
}

std::string apply_placeholder(std::string text, std::string_view key, std::string_view value) {
    std::string needle = "{" + std::string(key) + "}";
    size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return text;
}

}  // namespace concord
