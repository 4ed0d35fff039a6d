#include "concord/judge.hpp"

#include <algorithm>
#include <mutex>
#include <set>

namespace concord {

using nlohmann::json;

std::string label_name(ComparisonLabel l) {
    switch (l) {
        case ComparisonLabel::absent: return "Absent";
        case ComparisonLabel::consistent: return "Consistent";
        case ComparisonLabel::complementary: return "Complementary";
        case ComparisonLabel::divergent: return "Divergent";
        case ComparisonLabel::contradictory: return "Contradictory";
    }
    return "?";
}

char label_code(ComparisonLabel l) {
    switch (l) {
        case ComparisonLabel::absent: return 'A';
        case ComparisonLabel::consistent: return 'C';
        case ComparisonLabel::complementary: return 'P';
        case ComparisonLabel::divergent: return 'D';
        case ComparisonLabel::contradictory: return 'X';
    }
    return '?';
}

std::optional<ComparisonLabel> label_from_string(std::string_view s) {
    std::string lower = to_lower(trim(s));
    if (lower == "absent") return ComparisonLabel::absent;
    if (lower == "consistent") return ComparisonLabel::consistent;
    if (lower == "complementary") return ComparisonLabel::complementary;
    if (lower == "divergent") return ComparisonLabel::divergent;
    if (lower == "contradictory") return ComparisonLabel::contradictory;
    return std::nullopt;
}

std::optional<ComparisonLabel> label_from_code(char c) {
    switch (c) {
        case 'A': return ComparisonLabel::absent;
        case 'C': return ComparisonLabel::consistent;
        case 'P': return ComparisonLabel::complementary;
        case 'D': return ComparisonLabel::divergent;
        case 'X': return ComparisonLabel::contradictory;
    }
    return std::nullopt;
}

std::string significance_name(Significance s) {
    switch (s) {
        case Significance::low: return "low";
        case Significance::medium: return "medium";
        case Significance::high: return "high";
    }
    return "?";
}

std::optional<Significance> significance_from_string(std::string_view s) {
    std::string lower = to_lower(trim(s));
    if (lower == "low") return Significance::low;
    if (lower == "medium") return Significance::medium;
    if (lower == "high") return Significance::high;
    return std::nullopt;
}

namespace {

struct ParsedVerdict {
    ComparisonLabel label;
    std::string justification;
    std::optional<std::string> subtopic;
    std::optional<Significance> significance;
};

/// nullopt plus a reason when the object violates the judge schema.
std::optional<ParsedVerdict> parse_verdict(const std::string& response, std::string& reason,
                                           WarningSink* warnings,
                                           const std::string& pair_desc) {
    json obj = json::parse(response, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
        reason = "judge response is not a JSON object";
        return std::nullopt;
    }
    if (!obj.contains("label") || !obj["label"].is_string()) {
        reason = "judge response lacks a string \"label\"";
        return std::nullopt;
    }
    auto label = label_from_string(obj["label"].get<std::string>());
    if (!label) {
        reason = "unknown label \"" + obj["label"].get<std::string>() + "\"";
        return std::nullopt;
    }
    ParsedVerdict v;
    v.label = *label;
    if (obj.contains("justification") && obj["justification"].is_string()) {
        v.justification = obj["justification"].get<std::string>();
    }
    std::optional<Significance> sig;
    if (obj.contains("significance") && obj["significance"].is_string()) {
        sig = significance_from_string(obj["significance"].get<std::string>());
    }
    if (is_divergent_kind(v.label)) {
        if (!sig) {
            reason = "missing or invalid significance for " + label_name(v.label);
            return std::nullopt;
        }
        v.significance = sig;
        if (obj.contains("subtopic") && obj["subtopic"].is_string()) {
            v.subtopic = obj["subtopic"].get<std::string>();
        }
    } else if (sig || obj.contains("significance")) {
        // Coherence rule: significance only accompanies Divergent/Contradictory.
        if (warnings) {
            warnings->push_back(pair_desc + ": significance stripped from " +
                                label_name(v.label) + " verdict");
        }
    }
    return v;
}

}  // namespace

PairwiseComparison judge_pair(const Question& question, const GroundedAnswer& ans_a,
                              const GroundedAnswer& ans_b, Gateway& gateway,
                              const PromptSet& prompts, WarningSink* warnings) {
    const GroundedAnswer* a = &ans_a;
    const GroundedAnswer* b = &ans_b;
    if (a->handbook_id > b->handbook_id) std::swap(a, b);
    if (a->handbook_id == b->handbook_id) {
        throw ValidationError("judge_pair: identical handbooks " + a->handbook_id);
    }
    if (a->question_id != question.id || b->question_id != question.id) {
        throw ValidationError("judge_pair: answers do not belong to question " + question.id);
    }

    PairwiseComparison c;
    c.question_id = question.id;
    c.handbook_a = a->handbook_id;
    c.handbook_b = b->handbook_id;
    c.judge_fingerprint = model_fingerprint(gateway, prompts);

    bool a_out = a->is_absent || a->absence_method == AbsenceMethod::unresolved;
    bool b_out = b->is_absent || b->absence_method == AbsenceMethod::unresolved;
    if (a_out || b_out) {
        c.label = ComparisonLabel::absent;
        return c;
    }

    ChatRequest req;
    req.task = ChatTask::judge;
    req.system_prompt = prompts.judge.system;
    req.user_prompt = apply_placeholder(
        apply_placeholder(apply_placeholder(prompts.judge.user, "question", question.text),
                          "answer_a", a->answer_text),
        "answer_b", b->answer_text);
    req.response_format = ResponseFormat::json_object;

    std::string pair_desc = question.id + "/" + c.handbook_a + "__" + c.handbook_b;
    std::string reason;
    try {
        auto verdict = parse_verdict(gateway.chat(req), reason, warnings, pair_desc);
        if (!verdict) {
            // One repair retry with an explicit schema reminder (distinct cache key).
            ChatRequest repair = req;
            repair.user_prompt +=
                "\n\nYour previous reply was incomplete (" + reason +
                "). Return the full JSON object with every required field.";
            verdict = parse_verdict(gateway.chat(repair), reason, warnings, pair_desc);
        }
        if (!verdict) {
            c.error = true;
            c.error_reason = reason;
            return c;
        }
        c.label = verdict->label;
        c.justification = verdict->justification;
        c.subtopic_tag = verdict->subtopic;
        c.significance = verdict->significance;
        return c;
    } catch (const MalformedResponseError& e) {
        c.error = true;
        c.error_reason = e.what();
        return c;
    }
}

ComparisonMatrix build_matrix(const std::string& question_id,
                              const std::vector<PairwiseComparison>& comparisons,
                              std::vector<std::string> handbook_ids, bool strict,
                              WarningSink* warnings) {
    std::sort(handbook_ids.begin(), handbook_ids.end());
    ComparisonMatrix m;
    m.question_id = question_id;
    m.handbook_ids = std::move(handbook_ids);
    const size_t n = m.dim();
    m.grid.assign(n * n, ComparisonLabel::absent);
    for (size_t i = 0; i < n; ++i) m.set(i, i, ComparisonLabel::consistent);

    std::map<std::string, size_t> pos;
    for (size_t i = 0; i < n; ++i) pos[m.handbook_ids[i]] = i;

    std::map<std::pair<size_t, size_t>, ComparisonLabel> seen;
    for (const PairwiseComparison& c : comparisons) {
        if (c.question_id != question_id) {
            throw ValidationError("comparison for " + c.question_id +
                                  " passed to matrix of " + question_id);
        }
        auto ia = pos.find(c.handbook_a);
        auto ib = pos.find(c.handbook_b);
        if (ia == pos.end() || ib == pos.end()) {
            throw ValidationError("comparison references handbook outside matrix: " +
                                  c.handbook_a + " / " + c.handbook_b);
        }
        ComparisonLabel label = c.error ? ComparisonLabel::absent : c.label;
        auto key = std::minmax(ia->second, ib->second);
        auto [it, inserted] = seen.emplace(key, label);
        if (!inserted && it->second != label) {
            throw ValidationError("conflicting duplicate comparison for " + c.handbook_a +
                                  "__" + c.handbook_b + " in question " + question_id);
        }
        m.set(key.first, key.second, label);
        m.set(key.second, key.first, label);
    }

    size_t expected = n < 2 ? 0 : n * (n - 1) / 2;
    if (seen.size() < expected) {
        std::string msg = "question " + question_id + ": " +
                          std::to_string(expected - seen.size()) +
                          " missing pair(s) treated as Absent";
        if (strict) throw ValidationError(msg);
        if (warnings) warnings->push_back(msg);
    }
    return m;
}

nlohmann::json matrix_to_json(const ComparisonMatrix& m, const std::string& config_hash) {
    const size_t n = m.dim();
    std::vector<std::string> rows;
    rows.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        std::string row(n, ' ');
        for (size_t j = 0; j < n; ++j) row[j] = label_code(m.at(i, j));
        rows.push_back(std::move(row));
    }
    return json{{"question_id", m.question_id},
                {"handbook_ids", m.handbook_ids},
                {"grid", rows},
                {"config_hash", config_hash}};
}

ComparisonMatrix matrix_from_json(const nlohmann::json& j) {
    ComparisonMatrix m;
    m.question_id = j.at("question_id").get<std::string>();
    m.handbook_ids = j.at("handbook_ids").get<std::vector<std::string>>();
    auto rows = j.at("grid").get<std::vector<std::string>>();
    const size_t n = m.handbook_ids.size();
    if (rows.size() != n) throw ValidationError("matrix grid row count mismatch");
    m.grid.assign(n * n, ComparisonLabel::absent);
    for (size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw ValidationError("matrix grid row length mismatch");
        for (size_t k = 0; k < n; ++k) {
            auto label = label_from_code(rows[i][k]);
            if (!label) throw ValidationError(std::string("unknown label code '") + rows[i][k] + "'");
            m.set(i, k, *label);
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (m.at(i, i) != ComparisonLabel::consistent) {
            throw ValidationError("matrix diagonal must be Consistent");
        }
        for (size_t k = i + 1; k < n; ++k) {
            if (m.at(i, k) != m.at(k, i)) throw ValidationError("matrix must be symmetric");
        }
    }
    return m;
}

std::filesystem::path ComparisonStore::path_for(const std::string& question_id,
                                                const std::string& a,
                                                const std::string& b) const {
    return root_ / question_id / (a + "__" + b + ".json");
}

bool ComparisonStore::exists(const std::string& question_id, const std::string& a,
                             const std::string& b) const {
    return std::filesystem::exists(path_for(question_id, a, b));
}

void ComparisonStore::save(const PairwiseComparison& c, const std::string& config_hash) const {
    json doc{{"question_id", c.question_id},
             {"handbook_a", c.handbook_a},
             {"handbook_b", c.handbook_b},
             {"judge_fingerprint", c.judge_fingerprint},
             {"config_hash", config_hash}};
    if (c.error) {
        doc["status"] = "error";
        doc["error_reason"] = c.error_reason;
    } else {
        doc["status"] = "ok";
        doc["label"] = label_name(c.label);
        doc["justification"] = c.justification;
        if (c.subtopic_tag) doc["subtopic_tag"] = *c.subtopic_tag;
        if (c.significance) doc["significance"] = significance_name(*c.significance);
    }
    atomic_write_file(path_for(c.question_id, c.handbook_a, c.handbook_b), doc.dump(2) + "\n");
}

PairwiseComparison ComparisonStore::load(const std::filesystem::path& path) const {
    json doc = json::parse(read_text_file(path));
    PairwiseComparison c;
    c.question_id = doc.at("question_id").get<std::string>();
    c.handbook_a = doc.at("handbook_a").get<std::string>();
    c.handbook_b = doc.at("handbook_b").get<std::string>();
    c.judge_fingerprint = doc.value("judge_fingerprint", "");
    if (doc.value("status", "ok") == "error") {
        c.error = true;
        c.error_reason = doc.value("error_reason", "");
        return c;
    }
    auto label = label_from_string(doc.at("label").get<std::string>());
    if (!label) throw ValidationError("unknown label in " + path.string());
    c.label = *label;
    c.justification = doc.value("justification", "");
    if (doc.contains("subtopic_tag")) c.subtopic_tag = doc["subtopic_tag"].get<std::string>();
    if (doc.contains("significance")) {
        auto sig = significance_from_string(doc["significance"].get<std::string>());
        if (!sig) throw ValidationError("unknown significance in " + path.string());
        c.significance = sig;
    }
    if (bool(c.significance) != is_divergent_kind(c.label)) {
        throw ValidationError("significance/label coherence violated in " + path.string());
    }
    return c;
}

std::string ComparisonStore::stored_hash(const std::filesystem::path& path) const {
    json doc = json::parse(read_text_file(path));
    return doc.value("config_hash", "");
}

std::vector<PairwiseComparison> ComparisonStore::load_question(
    const std::string& question_id) const {
    namespace fs = std::filesystem;
    std::vector<PairwiseComparison> out;
    fs::path dir = root_ / question_id;
    if (!fs::exists(dir)) return out;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back(load(f));
    return out;
}

std::vector<std::string> ComparisonStore::question_ids() const {
    namespace fs = std::filesystem;
    std::vector<std::string> ids;
    if (!fs::exists(root_)) return ids;
    for (const auto& entry : fs::directory_iterator(root_)) {
        if (entry.is_directory()) ids.push_back(entry.path().filename().string());
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

JudgingLedger run_judging(const RoutingPlan& plan,
                          const std::map<std::string, Question>& questions,
                          const AnswerStore& answers, const ComparisonStore& store,
                          Gateway& gateway, const PromptSet& prompts,
                          const std::string& config_hash, int workers, WarningSink* warnings,
                          TimestampSink* timestamps) {
    JudgingLedger ledger;
    std::mutex mutex;

    // Preload the answers once; pair workers only read.
    std::map<std::pair<std::string, std::string>, GroundedAnswer> loaded;
    std::set<std::pair<std::string, std::string>> missing;
    for (const auto& [qid, hbid] : plan.pairs) {
        if (answers.exists(qid, hbid)) {
            loaded.emplace(std::make_pair(qid, hbid), answers.load(qid, hbid));
        } else {
            missing.insert({qid, hbid});
        }
    }

    struct PairTask {
        const Question* question;
        std::string qid, a, b;
    };
    std::vector<PairTask> tasks;
    for (const auto& [qid, hbids] : plan.by_question()) {
        auto qit = questions.find(qid);
        if (qit == questions.end()) continue;
        for (size_t i = 0; i < hbids.size(); ++i) {
            for (size_t j = i + 1; j < hbids.size(); ++j) {
                tasks.push_back({&qit->second, qid, hbids[i], hbids[j]});
            }
        }
    }

    parallel_for(tasks.size(), workers, [&](size_t t) {
        const PairTask& task = tasks[t];
        if (store.exists(task.qid, task.a, task.b)) {
            std::lock_guard lock(mutex);
            ++ledger.skipped;
            return;
        }
        if (missing.count({task.qid, task.a}) || missing.count({task.qid, task.b})) {
            std::lock_guard lock(mutex);
            ++ledger.missing_answers;
            return;
        }
        const GroundedAnswer& ans_a = loaded.at({task.qid, task.a});
        const GroundedAnswer& ans_b = loaded.at({task.qid, task.b});
        bool short_circuit = ans_a.is_absent || ans_b.is_absent ||
                             ans_a.absence_method == AbsenceMethod::unresolved ||
                             ans_b.absence_method == AbsenceMethod::unresolved;
        try {
            WarningSink local_warnings;
            PairwiseComparison c =
                judge_pair(*task.question, ans_a, ans_b, gateway, prompts, &local_warnings);
            store.save(c, config_hash);
            std::lock_guard lock(mutex);
            if (c.error) {
                ++ledger.errors;
            } else if (short_circuit) {
                ++ledger.short_circuited;
            } else {
                ++ledger.judged;
            }
            if (warnings) {
                warnings->insert(warnings->end(), local_warnings.begin(), local_warnings.end());
            }
            if (timestamps) {
                timestamps->emplace_back(
                    "comparisons/" + task.qid + "/" + task.a + "__" + task.b + ".json",
                    iso8601_now());
            }
        } catch (const GatewayError& e) {
            std::lock_guard lock(mutex);
            ++ledger.failed;
            if (warnings) {
                warnings->push_back(task.qid + "/" + task.a + "__" + task.b +
                                    ": transient judge failure: " + e.what());
            }
        }
    });
    return ledger;
}

}  // namespace concord
