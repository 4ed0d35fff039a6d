#include "concord/generation.hpp"

#include <cctype>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "concord/text.hpp"

namespace concord {

using nlohmann::json;

std::string absence_method_name(AbsenceMethod m) {
    switch (m) {
        case AbsenceMethod::sentinel_prefix: return "sentinel_prefix";
        case AbsenceMethod::llm_classifier: return "llm_classifier";
        case AbsenceMethod::empty_retrieval: return "empty_retrieval";
        case AbsenceMethod::unresolved: return "unresolved";
    }
    return "?";
}

std::optional<AbsenceMethod> absence_method_from_string(std::string_view s) {
    if (s == "sentinel_prefix") return AbsenceMethod::sentinel_prefix;
    if (s == "llm_classifier") return AbsenceMethod::llm_classifier;
    if (s == "empty_retrieval") return AbsenceMethod::empty_retrieval;
    if (s == "unresolved") return AbsenceMethod::unresolved;
    return std::nullopt;
}

bool matches_absence_sentinel(std::string_view answer_text) {
    size_t i = 0;
    while (i < answer_text.size()) {
        unsigned char c = static_cast<unsigned char>(answer_text[i]);
        if (std::isspace(c) || std::ispunct(c)) {
            ++i;
        } else {
            break;
        }
    }
    return starts_with_ci(answer_text.substr(i), kAbsenceSentinel);
}

namespace {

std::optional<bool> parse_yes_no(const std::string& response) {
    for (const Span& s : token_spans(response)) {
        std::string tok = to_lower(std::string_view(response).substr(s.begin, s.end - s.begin));
        if (tok == "yes") return true;
        if (tok == "no") return false;
        if (std::isalnum(static_cast<unsigned char>(response[s.begin]))) {
            return std::nullopt;  // first word is something else
        }
    }
    return std::nullopt;
}

}  // namespace

AbsenceDecision detect_absence(const std::string& answer_text, Gateway& gateway,
                               const PromptSet& prompts) {
    if (matches_absence_sentinel(answer_text)) {
        return {true, AbsenceMethod::sentinel_prefix};
    }
    ChatRequest req;
    req.task = ChatTask::absence;
    req.system_prompt = prompts.absence.system;
    req.user_prompt = apply_placeholder(prompts.absence.user, "answer", answer_text);
    req.max_output_tokens = 8;

    auto verdict = parse_yes_no(gateway.chat(req));
    if (!verdict) {
        // Semantic retry with an explicit nudge (and a distinct cache key).
        req.user_prompt += "\n\nReply with exactly one word: YES or NO.";
        verdict = parse_yes_no(gateway.chat(req));
    }
    if (!verdict) {
        return {false, AbsenceMethod::unresolved};
    }
    return {*verdict, AbsenceMethod::llm_classifier};
}

std::string model_fingerprint(const Gateway& gateway, const PromptSet& prompts) {
    return gateway.options().chat_model + ":" + prompts.hash.substr(0, 16);
}

GroundedAnswer generate_answer(const Question& question, const std::string& handbook_id,
                               const std::vector<Chunk>& context, Gateway& gateway,
                               const PromptSet& prompts) {
    GroundedAnswer answer;
    answer.question_id = question.id;
    answer.handbook_id = handbook_id;
    answer.model_fingerprint = model_fingerprint(gateway, prompts);
    answer.generated_at = iso8601_now();
    for (const Chunk& c : context) {
        answer.context_chunk_ids.push_back(c.chunk_id);
    }

    if (context.empty()) {
        answer.is_absent = true;
        answer.absence_method = AbsenceMethod::empty_retrieval;
        return answer;
    }

    std::ostringstream passages;
    for (size_t i = 0; i < context.size(); ++i) {
        passages << "[" << (i + 1) << "] (" << context[i].chunk_id << ") " << context[i].text
                 << "\n";
    }
    ChatRequest req;
    req.task = ChatTask::generate;
    req.system_prompt = prompts.generate.system;
    req.user_prompt = apply_placeholder(
        apply_placeholder(prompts.generate.user, "question", question.text), "passages",
        passages.str());

    answer.answer_text = gateway.chat(req);
    AbsenceDecision decision = detect_absence(answer.answer_text, gateway, prompts);
    answer.is_absent = decision.is_absent;
    answer.absence_method = decision.method;
    return answer;
}

std::filesystem::path AnswerStore::path_for(const std::string& question_id,
                                            const std::string& handbook_id) const {
    return root_ / question_id / (handbook_id + ".json");
}

bool AnswerStore::exists(const std::string& question_id, const std::string& handbook_id) const {
    return std::filesystem::exists(path_for(question_id, handbook_id));
}

GroundedAnswer AnswerStore::load(const std::string& question_id,
                                 const std::string& handbook_id) const {
    json doc = json::parse(read_text_file(path_for(question_id, handbook_id)));
    GroundedAnswer a;
    a.question_id = doc.at("question_id").get<std::string>();
    a.handbook_id = doc.at("handbook_id").get<std::string>();
    a.answer_text = doc.at("answer_text").get<std::string>();
    a.context_chunk_ids = doc.at("context_chunk_ids").get<std::vector<std::string>>();
    a.is_absent = doc.at("is_absent").get<bool>();
    auto method = absence_method_from_string(doc.at("absence_method").get<std::string>());
    if (!method) {
        throw ValidationError("unknown absence_method in answer " + question_id + "/" +
                              handbook_id);
    }
    a.absence_method = *method;
    a.model_fingerprint = doc.at("model_fingerprint").get<std::string>();
    return a;
}

GroundedAnswer AnswerStore::load_checked(const std::string& question_id,
                                         const std::string& handbook_id,
                                         const std::string& expect_hash) const {
    json doc = json::parse(read_text_file(path_for(question_id, handbook_id)));
    std::string stored = doc.value("config_hash", "");
    if (stored != expect_hash) {
        throw ValidationError("answer " + question_id + "/" + handbook_id +
                              " was produced under config hash " + stored +
                              ", expected " + expect_hash);
    }
    return load(question_id, handbook_id);
}

void AnswerStore::save(const GroundedAnswer& answer, const std::string& config_hash) const {
    json doc{{"question_id", answer.question_id},
             {"handbook_id", answer.handbook_id},
             {"answer_text", answer.answer_text},
             {"context_chunk_ids", answer.context_chunk_ids},
             {"is_absent", answer.is_absent},
             {"absence_method", absence_method_name(answer.absence_method)},
             {"model_fingerprint", answer.model_fingerprint},
             {"config_hash", config_hash}};
    atomic_write_file(path_for(answer.question_id, answer.handbook_id), doc.dump(2) + "\n");
}

GenerationLedger run_generation(
    const RoutingPlan& plan, const std::map<std::string, Question>& questions,
    const std::function<const HandbookIndex*(const std::string&)>& index_for,
    const AnswerStore& store, const RetrievalConfig& retrieval_cfg, Gateway& gateway,
    const PromptSet& prompts, const std::string& config_hash, int workers,
    WarningSink* warnings, TimestampSink* timestamps) {
    GenerationLedger ledger;
    std::mutex mutex;  // guards ledger aggregates, warnings, timestamps, query memo
    std::map<std::string, std::vector<float>> query_memo;

    parallel_for(plan.pairs.size(), workers, [&](size_t i) {
        const auto& [qid, hbid] = plan.pairs[i];
        if (store.exists(qid, hbid)) {
            std::lock_guard lock(mutex);
            ++ledger.skipped;
            return;
        }
        auto qit = questions.find(qid);
        const HandbookIndex* index = qit == questions.end() ? nullptr : index_for(hbid);
        if (index == nullptr) {
            std::lock_guard lock(mutex);
            ++ledger.failed;
            ledger.failures.push_back(qid + "/" + hbid + ": missing question or index");
            return;
        }
        try {
            const std::vector<float>* qvec = nullptr;
            std::vector<float> local_vec;
            if (!index->chunks.empty()) {
                {
                    std::lock_guard lock(mutex);
                    auto it = query_memo.find(qid);
                    if (it != query_memo.end()) local_vec = it->second;
                }
                if (local_vec.empty()) {
                    local_vec = gateway.embed({qit->second.text}).front();
                    std::lock_guard lock(mutex);
                    query_memo.emplace(qid, local_vec);
                }
                qvec = &local_vec;
            }
            WarningSink local_warnings;
            std::vector<Chunk> context = hybrid_search(qit->second, *index, retrieval_cfg,
                                                       gateway, &local_warnings, qvec);
            GroundedAnswer answer =
                generate_answer(qit->second, hbid, context, gateway, prompts);
            store.save(answer, config_hash);

            std::lock_guard lock(mutex);
            ++ledger.generated;
            if (answer.is_absent) ++ledger.absent;
            if (answer.absence_method == AbsenceMethod::empty_retrieval) ++ledger.empty_retrieval;
            if (answer.absence_method == AbsenceMethod::unresolved) ++ledger.unresolved;
            if (warnings) {
                warnings->insert(warnings->end(), local_warnings.begin(), local_warnings.end());
            }
            if (timestamps) {
                timestamps->emplace_back("answers/" + qid + "/" + hbid + ".json",
                                         answer.generated_at);
            }
        } catch (const GatewayError& e) {
            std::lock_guard lock(mutex);
            ++ledger.failed;
            ledger.failures.push_back(qid + "/" + hbid + ": " + e.what());
        }
    });
    return ledger;
}

}  // namespace concord
