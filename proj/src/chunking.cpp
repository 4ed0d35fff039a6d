#include "concord/chunking.hpp"

#include <sstream>

#include <json.hpp>

#include "concord/text.hpp"

namespace concord {

using nlohmann::json;

void ChunkingConfig::validate() const {
    if (max_tokens < 32) {
        throw ConfigError("chunking.max_tokens must be >= 32 (got " +
                          std::to_string(max_tokens) + ")");
    }
    if (sentence_split_rule != "default") {
        throw ConfigError("unknown sentence_split_rule \"" + sentence_split_rule + "\"");
    }
}

std::string compose_chunk_id(const std::string& handbook_id, size_t ordinal) {
    return handbook_id + "#" + std::to_string(ordinal);
}

std::string chunk_handbook_id(std::string_view chunk_id) {
    size_t pos = chunk_id.rfind('#');
    if (pos == std::string_view::npos) return "";
    return std::string(chunk_id.substr(0, pos));
}

namespace {

Chunk make_chunk(const Handbook& hb, const Section& sec, size_t section_index, size_t ordinal,
                 std::string_view body_slice) {
    Chunk c;
    c.chunk_id = compose_chunk_id(hb.id, ordinal);
    c.handbook_id = hb.id;
    c.heading = sec.heading;
    if (!sec.heading.empty()) {
        c.text = sec.heading + ": ";
        c.prefix_len = c.text.size();
    }
    c.text.append(body_slice);
    c.token_count = count_tokens(body_slice);
    c.pages = sec.pages;
    c.section_index = section_index;
    return c;
}

}  // namespace

ChunkingResult chunk_handbook(const Handbook& handbook, const ChunkingConfig& cfg) {
    cfg.validate();
    ChunkingResult result;
    size_t ordinal = 0;

    for (size_t si = 0; si < handbook.sections.size(); ++si) {
        const Section& sec = handbook.sections[si];
        const std::string& body = sec.body;

        if (count_tokens(body) <= cfg.max_tokens) {
            result.chunks.push_back(make_chunk(handbook, sec, si, ordinal++, body));
            continue;
        }

        auto sentences = sentence_spans(body);
        size_t group_begin = sentences.empty() ? 0 : sentences.front().begin;
        bool group_open = false;

        auto flush_group = [&](size_t end) {
            result.chunks.push_back(make_chunk(
                handbook, sec, si, ordinal++,
                std::string_view(body).substr(group_begin, end - group_begin)));
            group_open = false;
        };

        for (size_t k = 0; k < sentences.size(); ++k) {
            const Span& s = sentences[k];
            std::string_view grown =
                std::string_view(body).substr(group_open ? group_begin : s.begin,
                                              s.end - (group_open ? group_begin : s.begin));
            if (count_tokens(grown) <= cfg.max_tokens) {
                if (!group_open) {
                    group_begin = s.begin;
                    group_open = true;
                }
                continue;
            }
            if (group_open) {
                flush_group(s.begin);
            }
            std::string_view sentence = std::string_view(body).substr(s.begin, s.end - s.begin);
            if (count_tokens(sentence) <= cfg.max_tokens) {
                group_begin = s.begin;
                group_open = true;
                continue;
            }
            // One sentence over budget: cut at token starts, keep exact byte coverage.
            result.warnings.push_back("hard-wrapped oversized sentence in " + handbook.id +
                                      " section " + std::to_string(si));
            auto tokens = token_spans(sentence);
            size_t piece_begin = 0;
            for (size_t t = cfg.max_tokens; t < tokens.size(); t += cfg.max_tokens) {
                result.chunks.push_back(make_chunk(
                    handbook, sec, si, ordinal++,
                    sentence.substr(piece_begin, tokens[t].begin - piece_begin)));
                piece_begin = tokens[t].begin;
            }
            result.chunks.push_back(
                make_chunk(handbook, sec, si, ordinal++, sentence.substr(piece_begin)));
        }
        if (group_open) {
            flush_group(sentences.back().end);
        }
    }
    return result;
}

namespace {

json chunk_to_json(const Chunk& c) {
    return json{{"chunk_id", c.chunk_id},     {"handbook_id", c.handbook_id},
                {"heading", c.heading},       {"text", c.text},
                {"prefix_len", c.prefix_len}, {"token_count", c.token_count},
                {"pages", c.pages},           {"section_index", c.section_index}};
}

Chunk chunk_from_json(const json& j) {
    Chunk c;
    c.chunk_id = j.at("chunk_id").get<std::string>();
    c.handbook_id = j.at("handbook_id").get<std::string>();
    c.heading = j.at("heading").get<std::string>();
    c.text = j.at("text").get<std::string>();
    c.prefix_len = j.at("prefix_len").get<size_t>();
    c.token_count = j.at("token_count").get<size_t>();
    c.pages = j.at("pages").get<std::vector<int>>();
    c.section_index = j.at("section_index").get<size_t>();
    return c;
}

}  // namespace

std::string chunks_to_jsonl(const std::vector<Chunk>& chunks) {
    std::ostringstream out;
    for (const Chunk& c : chunks) {
        out << chunk_to_json(c).dump() << "\n";
    }
    return out.str();
}

std::vector<Chunk> chunks_from_jsonl(const std::string& jsonl) {
    std::vector<Chunk> chunks;
    std::istringstream in(jsonl);
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        chunks.push_back(chunk_from_json(json::parse(line)));
    }
    return chunks;
}

}  // namespace concord
