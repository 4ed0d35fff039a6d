#include "concord/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "concord/util.hpp"

namespace concord {

using nlohmann::json;

std::string organ_to_string(Organ o) {
    switch (o) {
        case Organ::heart: return "heart";
        case Organ::kidney: return "kidney";
        case Organ::liver: return "liver";
        case Organ::lung: return "lung";
        case Organ::pancreas: return "pancreas";
        case Organ::general: return "general";
    }
    return "?";
}

std::optional<Organ> organ_from_string(std::string_view s) {
    if (s == "heart") return Organ::heart;
    if (s == "kidney") return Organ::kidney;
    if (s == "liver") return Organ::liver;
    if (s == "lung") return Organ::lung;
    if (s == "pancreas") return Organ::pancreas;
    if (s == "general") return Organ::general;
    return std::nullopt;
}

std::string phase_to_string(Phase p) {
    switch (p) {
        case Phase::pre: return "pre";
        case Phase::post: return "post";
        case Phase::combined: return "combined";
    }
    return "?";
}

std::optional<Phase> phase_from_string(std::string_view s) {
    if (s == "pre") return Phase::pre;
    if (s == "post") return Phase::post;
    if (s == "combined") return Phase::combined;
    return std::nullopt;
}

std::string compose_handbook_id(Organ organ, const std::string& center_id, Phase phase) {
    return organ_to_string(organ) + "-" + center_id + "-" + phase_to_string(phase);
}

std::optional<HandbookIdParts> decompose_handbook_id(std::string_view id) {
    size_t first = id.find('-');
    size_t last = id.rfind('-');
    if (first == std::string_view::npos || last == first) return std::nullopt;
    auto organ = organ_from_string(id.substr(0, first));
    auto phase = phase_from_string(id.substr(last + 1));
    if (!organ || *organ == Organ::general || !phase) return std::nullopt;
    std::string center(id.substr(first + 1, last - first - 1));
    if (center.empty()) return std::nullopt;
    return HandbookIdParts{*organ, center, *phase};
}

std::map<std::string, std::vector<std::string>> RoutingPlan::by_question() const {
    std::map<std::string, std::vector<std::string>> grouped;
    for (const auto& [qid, hbid] : pairs) {
        grouped[qid].push_back(hbid);
    }
    for (auto& [qid, ids] : grouped) {
        std::sort(ids.begin(), ids.end());
    }
    return grouped;
}

namespace {

bool is_anonymized_center(const std::string& s) {
    if (s.rfind("center-", 0) != 0 || s.size() <= 7) return false;
    return std::all_of(s.begin() + 7, s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

const json& require_field(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ValidationError("missing required field \"" + (path.empty() ? key : path + "." + key) +
                              "\"");
    }
    return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& path = "") {
    const json& v = require_field(obj, key, path);
    if (!v.is_string()) {
        throw ValidationError("field \"" + (path.empty() ? key : path + "." + key) +
                              "\" must be a string");
    }
    return v.get<std::string>();
}

Handbook parse_handbook(const json& doc, const std::map<std::string, std::string>& center_map,
                        bool have_map) {
    if (!doc.is_object()) throw ValidationError("handbook document must be a JSON object");
    Handbook hb;
    hb.id = require_string(doc, "id");
    std::string organ_str = require_string(doc, "organ");
    auto organ = organ_from_string(organ_str);
    if (!organ || *organ == Organ::general) {
        throw ValidationError("field \"organ\": unknown organ \"" + organ_str + "\"");
    }
    hb.organ = *organ;

    std::string center = require_string(doc, "center");
    if (have_map) {
        auto it = center_map.find(center);
        if (it == center_map.end()) {
            throw ValidationError("field \"center\": \"" + center +
                                  "\" not present in the center anonymization map");
        }
        center = it->second;
    }
    if (!is_anonymized_center(center)) {
        throw ValidationError("field \"center\": \"" + center +
                              "\" is not an anonymized id (expected center-NNN)");
    }
    hb.center_id = center;

    std::string phase_str = require_string(doc, "phase");
    auto phase = phase_from_string(phase_str);
    if (!phase) {
        throw ValidationError("field \"phase\": unknown phase \"" + phase_str + "\"");
    }
    hb.phase = *phase;
    hb.source_path = require_string(doc, "source_path");
    hb.full_text = require_string(doc, "full_text");

    const json& sections = require_field(doc, "sections", "");
    if (!sections.is_array()) throw ValidationError("field \"sections\" must be an array");
    size_t idx = 0;
    for (const json& s : sections) {
        std::string path = "sections[" + std::to_string(idx) + "]";
        Section sec;
        sec.heading = require_string(s, "heading", path);
        sec.body = require_string(s, "body", path);
        if (sec.body.empty()) {
            throw ValidationError("field \"" + path + ".body\" must be non-empty");
        }
        const json& pages = require_field(s, "pages", path);
        if (!pages.is_array()) {
            throw ValidationError("field \"" + path + ".pages\" must be an array");
        }
        int prev = 0;
        for (const json& p : pages) {
            if (!p.is_number_integer() || p.get<int>() <= 0) {
                throw ValidationError("field \"" + path + ".pages\" must hold positive integers");
            }
            int page = p.get<int>();
            if (page < prev) {
                throw ValidationError("field \"" + path + ".pages\" must be sorted ascending");
            }
            prev = page;
            sec.pages.push_back(page);
        }
        hb.sections.push_back(std::move(sec));
        ++idx;
    }

    if (!hb.full_text.empty() && hb.sections.empty()) {
        throw ValidationError("handbook with non-empty full_text must have sections");
    }

    std::string expected = compose_handbook_id(hb.organ, hb.center_id, hb.phase);
    if (hb.id != expected) {
        throw ValidationError("field \"id\": \"" + hb.id + "\" does not match \"" + expected +
                              "\" composed from (organ, center, phase)");
    }
    return hb;
}

}  // namespace

CorpusLoadResult load_corpus(const std::filesystem::path& dir, const CorpusOptions& opts) {
    namespace fs = std::filesystem;
    CorpusLoadResult result;
    if (!fs::exists(dir)) {
        throw ValidationError("corpus directory does not exist: " + dir.string());
    }

    std::map<std::string, std::string> center_map;
    bool have_map = false;
    if (opts.center_map) {
        json m = json::parse(read_text_file(*opts.center_map));
        if (!m.is_object()) throw ValidationError("center map must be a JSON object");
        for (auto& [k, v] : m.items()) {
            if (!v.is_string()) throw ValidationError("center map values must be strings");
            center_map[k] = v.get<std::string>();
        }
        have_map = true;
    }

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::map<std::string, std::string> seen;  // id -> file
    for (const auto& file : files) {
        std::optional<Handbook> hb;
        try {
            json doc = json::parse(read_text_file(file));
            hb = parse_handbook(doc, center_map, have_map);
        } catch (const ValidationError& e) {
            result.errors.push_back({file.filename().string(), e.what()});
            continue;
        } catch (const json::exception& e) {
            result.errors.push_back({file.filename().string(), std::string("invalid JSON: ") + e.what()});
            continue;
        }
        auto it = seen.find(hb->id);
        if (it != seen.end()) {
            // Corpus-level error: proceeding would silently drop a document.
            throw ValidationError("duplicate handbook id \"" + hb->id + "\" in " +
                                  file.filename().string() + " and " + it->second);
        }
        seen[hb->id] = file.filename().string();
        result.handbooks.push_back(std::move(*hb));
    }
    std::sort(result.handbooks.begin(), result.handbooks.end(),
              [](const Handbook& a, const Handbook& b) { return a.id < b.id; });
    return result;
}

const std::vector<std::string>& default_topic_allowlist() {
    static const std::vector<std::string> kTopics = {
        "Medical Complications",
        "Reproductive Health",
        "Lifestyle & Daily Living",
        "Pre-Transplant",
        "Medications",
        "Monitoring & Follow-up",
        "Mental & Emotional Health",
        "Surgery & Recovery",
        "Special Populations & Education",
        "Transplant Process & Logistics",
        "Financial & Administrative",
        "Community Support",
    };
    return kTopics;
}

std::vector<Question> load_questions(const std::filesystem::path& path,
                                     const std::vector<std::string>& topic_allowlist) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ValidationError("invalid JSON in " + path.string() + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw ValidationError("question file must be a JSON array");
    }

    std::set<std::string> allow(topic_allowlist.begin(), topic_allowlist.end());
    std::set<std::string> ids;
    std::vector<Question> questions;
    size_t idx = 0;
    for (const json& q : doc) {
        std::string where = "question[" + std::to_string(idx++) + "]";
        Question question;
        question.id = require_string(q, "id", where);
        if (!ids.insert(question.id).second) {
            throw ValidationError(where + ": duplicate question id \"" + question.id + "\"");
        }
        question.text = require_string(q, "text", where);
        if (trim(question.text).empty()) {
            throw ValidationError(where + ": text must be non-empty");
        }
        std::string organ_str = require_string(q, "organ", where);
        auto organ = organ_from_string(organ_str);
        if (!organ) {
            throw ValidationError(where + ": unknown organ \"" + organ_str + "\"");
        }
        question.organ = *organ;

        const json& topics = require_field(q, "topics", where);
        if (!topics.is_array() || topics.empty()) {
            throw ValidationError(where + ": topics must be a non-empty array");
        }
        std::set<std::string> topic_set;
        for (const json& t : topics) {
            if (!t.is_string()) throw ValidationError(where + ": topics must be strings");
            std::string topic = t.get<std::string>();
            if (!allow.empty() && !allow.count(topic)) {
                throw ValidationError(where + ": topic \"" + topic +
                                      "\" is not in the configured allow-list");
            }
            topic_set.insert(topic);
        }
        question.topics.assign(topic_set.begin(), topic_set.end());

        if (q.contains("subtopics")) {
            const json& subs = q.at("subtopics");
            if (!subs.is_array()) throw ValidationError(where + ": subtopics must be an array");
            std::set<std::string> sub_set;
            for (const json& s : subs) {
                if (!s.is_string()) throw ValidationError(where + ": subtopics must be strings");
                sub_set.insert(s.get<std::string>());
            }
            question.subtopics.assign(sub_set.begin(), sub_set.end());
        }
        questions.push_back(std::move(question));
    }
    return questions;
}

RoutingPlan build_routing(const std::vector<Question>& questions,
                          const std::vector<Handbook>& handbooks) {
    RoutingPlan plan;
    std::vector<const Question*> sorted_q;
    sorted_q.reserve(questions.size());
    for (const auto& q : questions) sorted_q.push_back(&q);
    std::sort(sorted_q.begin(), sorted_q.end(),
              [](const Question* a, const Question* b) { return a->id < b->id; });

    std::vector<std::string> all_ids;
    std::map<Organ, std::vector<std::string>> by_organ;
    for (const auto& hb : handbooks) {
        all_ids.push_back(hb.id);
        by_organ[hb.organ].push_back(hb.id);
    }
    std::sort(all_ids.begin(), all_ids.end());
    for (auto& [organ, ids] : by_organ) std::sort(ids.begin(), ids.end());

    for (const Question* q : sorted_q) {
        const std::vector<std::string>* targets = &all_ids;
        if (q->organ != Organ::general) {
            auto it = by_organ.find(q->organ);
            static const std::vector<std::string> kEmpty;
            targets = (it == by_organ.end()) ? &kEmpty : &it->second;
        }
        for (const auto& hbid : *targets) {
            plan.pairs.emplace_back(q->id, hbid);
        }
        plan.per_organ_pairs[q->organ] += targets->size();
    }
    return plan;
}

}  // namespace concord
