#include "concord/pipeline.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "concord/backends_http.hpp"
#include "concord/backends_mock.hpp"
#include "concord/generation.hpp"
#include "concord/heatmap.hpp"
#include "concord/judge.hpp"
#include "concord/metrics.hpp"
#include "concord/prompts.hpp"
#include "concord/tables.hpp"

namespace concord {

using nlohmann::json;

RunPaths run_paths(const RunConfig& cfg) {
    return RunPaths{cfg.output_dir / cfg.run_name};
}

const std::vector<std::string>& all_stage_names() {
    static const std::vector<std::string> kStages = {"validate", "index",   "generate",
                                                     "judge",    "metrics", "report"};
    return kStages;
}

std::unique_ptr<Gateway> make_gateway(const RunConfig& cfg) {
    GatewayOptions opts = cfg.gateway;
    if (!opts.cache_dir) {
        opts.cache_dir = run_paths(cfg).cache();
    }
    if (cfg.mock) {
        return std::make_unique<Gateway>(std::move(opts), std::make_unique<MockChatBackend>(),
                                         std::make_unique<MockEmbedBackend>(),
                                         std::make_unique<MockRerankBackend>());
    }
    if (cfg.base_url.empty()) {
        throw ConfigError("models.base_url (or CONCORD_BASE_URL) is required unless --mock");
    }
    auto endpoint = [&](const std::string& model) {
        return HttpEndpointConfig{cfg.base_url, cfg.api_key, model};
    };
    std::unique_ptr<RerankBackend> rerank;
    if (cfg.rerank_mode == "prompt") {
        rerank = std::make_unique<PromptRerankBackend>(
            std::make_shared<HttpChatBackend>(endpoint(cfg.gateway.rerank_model)));
    } else {
        rerank = std::make_unique<HttpRerankBackend>(endpoint(cfg.gateway.rerank_model));
    }
    return std::make_unique<Gateway>(std::move(opts),
                                     std::make_unique<HttpChatBackend>(endpoint(cfg.gateway.chat_model)),
                                     std::make_unique<HttpEmbedBackend>(endpoint(cfg.gateway.embed_model)),
                                     std::move(rerank));
}

namespace {

struct RunState {
    RunPaths paths;
    CorpusLoadResult corpus;
    std::vector<Question> questions;
    std::map<std::string, Question> question_by_id;
    RoutingPlan plan;
    PromptSet prompts;
    std::string config_hash;
    std::unique_ptr<Gateway> gateway;
    std::map<std::string, HandbookIndex> indexes;
    bool indexes_ready = false;

    WarningSink warnings;
    TimestampSink timestamps;
    json ledgers = json::object();
};

void ensure_gateway(RunState& state, const RunConfig& cfg) {
    if (!state.gateway) state.gateway = make_gateway(cfg);
}

void ensure_indexes(RunState& state, const RunConfig& cfg, std::ostream& log) {
    if (state.indexes_ready) return;
    ensure_gateway(state, cfg);
    size_t built = 0, loaded = 0;
    for (const Handbook& hb : state.corpus.handbooks) {
        auto dir = state.paths.indexes() / hb.id;
        if (auto existing = load_handbook_index(dir, state.config_hash)) {
            state.indexes.emplace(hb.id, std::move(*existing));
            ++loaded;
            continue;
        }
        HandbookIndex index = build_handbook_index(hb, cfg.chunking, cfg.retrieval.bm25,
                                                   *state.gateway, &state.warnings);
        save_handbook_index(index, dir, state.config_hash);
        state.indexes.emplace(hb.id, std::move(index));
        ++built;
    }
    state.indexes_ready = true;
    log << "  indexes: " << built << " built, " << loaded << " reused\n";
    state.ledgers["index"] = json{{"built", built}, {"reused", loaded}};
}

std::string stage_validate(RunState& state, const RunConfig& cfg, std::ostream& log) {
    CorpusOptions opts;
    opts.center_map = cfg.center_map;
    state.corpus = load_corpus(cfg.corpus_dir, opts);
    state.questions = cfg.topic_allowlist.empty()
                          ? load_questions(cfg.questions_path)
                          : load_questions(cfg.questions_path, cfg.topic_allowlist);
    for (const Question& q : state.questions) state.question_by_id[q.id] = q;
    state.plan = build_routing(state.questions, state.corpus.handbooks);

    for (const FileError& e : state.corpus.errors) {
        state.warnings.push_back("corpus file " + e.file + ": " + e.message);
    }
    if (cfg.strict && !state.corpus.errors.empty()) {
        throw ValidationError(std::to_string(state.corpus.errors.size()) +
                              " malformed corpus file(s) in strict mode");
    }
    std::ostringstream detail;
    detail << state.corpus.handbooks.size() << " handbooks, " << state.questions.size()
           << " questions, " << state.plan.pairs.size() << " routed pairs, "
           << state.corpus.errors.size() << " malformed files";
    log << "  " << detail.str() << "\n";
    state.ledgers["validate"] = json{{"handbooks", state.corpus.handbooks.size()},
                                     {"questions", state.questions.size()},
                                     {"routed_pairs", state.plan.pairs.size()},
                                     {"malformed_files", state.corpus.errors.size()}};
    return detail.str();
}

std::string stage_generate(RunState& state, const RunConfig& cfg, std::ostream& log) {
    ensure_indexes(state, cfg, log);
    AnswerStore store(state.paths.answers());
    auto index_for = [&](const std::string& hbid) -> const HandbookIndex* {
        auto it = state.indexes.find(hbid);
        return it == state.indexes.end() ? nullptr : &it->second;
    };
    GenerationLedger ledger = run_generation(
        state.plan, state.question_by_id, index_for, store, cfg.retrieval, *state.gateway,
        state.prompts, state.config_hash, cfg.workers, &state.warnings, &state.timestamps);

    std::ostringstream detail;
    detail << ledger.generated << " generated, " << ledger.skipped << " skipped, "
           << ledger.failed << " failed (" << ledger.absent << " absent, "
           << ledger.unresolved << " unresolved)";
    log << "  " << detail.str() << "\n";
    state.ledgers["generate"] = json{{"generated", ledger.generated},
                                     {"skipped", ledger.skipped},
                                     {"failed", ledger.failed},
                                     {"absent", ledger.absent},
                                     {"empty_retrieval", ledger.empty_retrieval},
                                     {"unresolved", ledger.unresolved},
                                     {"failures", ledger.failures}};
    if (ledger.failed > 0) {
        throw std::runtime_error(std::to_string(ledger.failed) +
                                 " pair(s) failed; re-run to retry them");
    }
    return detail.str();
}

std::string stage_judge(RunState& state, const RunConfig& cfg, std::ostream& log) {
    ensure_gateway(state, cfg);
    AnswerStore answers(state.paths.answers());
    ComparisonStore store(state.paths.comparisons());
    JudgingLedger ledger =
        run_judging(state.plan, state.question_by_id, answers, store, *state.gateway,
                    state.prompts, state.config_hash, cfg.workers, &state.warnings,
                    &state.timestamps);

    // Matrix export per question, rebuilt from the persisted pair files.
    size_t matrices = 0;
    for (const auto& [qid, hbids] : state.plan.by_question()) {
        ComparisonMatrix m = build_matrix(qid, store.load_question(qid), hbids, cfg.strict,
                                          &state.warnings);
        atomic_write_file(state.paths.matrices() / (qid + ".json"),
                          matrix_to_json(m, state.config_hash).dump(2) + "\n");
        ++matrices;
    }

    std::ostringstream detail;
    detail << ledger.judged << " judged, " << ledger.short_circuited << " short-circuited, "
           << ledger.skipped << " skipped, " << ledger.errors << " label-errors, "
           << ledger.failed << " failed, " << ledger.missing_answers << " missing answers, "
           << matrices << " matrices";
    log << "  " << detail.str() << "\n";
    state.ledgers["judge"] = json{{"judged", ledger.judged},
                                  {"short_circuited", ledger.short_circuited},
                                  {"skipped", ledger.skipped},
                                  {"errors", ledger.errors},
                                  {"failed", ledger.failed},
                                  {"missing_answers", ledger.missing_answers},
                                  {"matrices", matrices}};
    if (ledger.failed > 0) {
        throw std::runtime_error(std::to_string(ledger.failed) +
                                 " pair(s) failed transiently; re-run to retry them");
    }
    return detail.str();
}

std::string stage_metrics(RunState& state, const RunConfig&, std::ostream& log) {
    AnswerStore answers(state.paths.answers());
    ComparisonStore comparisons(state.paths.comparisons());

    std::map<std::pair<std::string, std::string>, GroundedAnswer> answer_map;
    for (const auto& [qid, hbid] : state.plan.pairs) {
        if (!answers.exists(qid, hbid)) continue;
        answer_map.emplace(std::make_pair(qid, hbid),
                           answers.load_checked(qid, hbid, state.config_hash));
    }

    std::map<std::string, std::vector<PairwiseComparison>> comparison_map;
    for (const auto& [qid, hbids] : state.plan.by_question()) {
        namespace fs = std::filesystem;
        fs::path dir = comparisons.root() / qid;
        if (fs::exists(dir)) {
            for (const auto& entry : fs::directory_iterator(dir)) {
                if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
                std::string stored = comparisons.stored_hash(entry.path());
                if (stored != state.config_hash) {
                    throw ValidationError("comparison " + entry.path().string() +
                                          " carries config hash " + stored + ", expected " +
                                          state.config_hash);
                }
            }
        }
        comparison_map[qid] = comparisons.load_question(qid);
    }

    MetricsReport report = compute_metrics(state.questions, state.plan, answer_map,
                                           comparison_map, &state.warnings);
    json doc = metrics_to_json(report, state.config_hash);
    atomic_write_file(state.paths.metrics() / "metrics.json", doc.dump(2) + "\n");
    for (const auto& [name, content] : render_csv_tables(doc)) {
        atomic_write_file(state.paths.metrics() / name, content);
    }

    std::ostringstream detail;
    detail << report.questions.size() << " questions, " << report.organs.size() << " organs, "
           << report.topics.size() << " topics, " << report.centers.size() << " centers";
    log << "  " << detail.str() << "\n";
    state.ledgers["metrics"] = json{{"questions", report.questions.size()},
                                    {"organs", report.organs.size()},
                                    {"topics", report.topics.size()},
                                    {"centers", report.centers.size()},
                                    {"missing_answers", report.missing_answers},
                                    {"unresolved_answers", report.unresolved_answers}};
    return detail.str();
}

std::string stage_report(RunState& state, const RunConfig&, std::ostream& log) {
    namespace fs = std::filesystem;
    fs::path metrics_path = state.paths.metrics() / "metrics.json";
    if (!fs::exists(metrics_path)) {
        throw std::runtime_error("metrics/metrics.json not found; run the metrics stage first");
    }
    json metrics = json::parse(read_text_file(metrics_path));
    std::string stored = metrics.value("config_hash", "");
    if (stored != state.config_hash) {
        throw ValidationError("metrics.json carries config hash " + stored + ", expected " +
                              state.config_hash + "; refusing to mix artifacts");
    }

    atomic_write_file(state.paths.reports() / "tables.txt", render_human_tables(metrics));

    size_t figures = 0;
    fs::path matrices_dir = state.paths.matrices();
    std::vector<fs::path> matrix_files;
    if (fs::exists(matrices_dir)) {
        for (const auto& entry : fs::directory_iterator(matrices_dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".json") {
                matrix_files.push_back(entry.path());
            }
        }
    }
    std::sort(matrix_files.begin(), matrix_files.end());
    for (const auto& file : matrix_files) {
        json doc = json::parse(read_text_file(file));
        if (doc.value("config_hash", "") != state.config_hash) {
            throw ValidationError("matrix " + file.string() +
                                  " carries a different config hash; refusing to mix artifacts");
        }
        ComparisonMatrix m = matrix_from_json(doc);
        atomic_write_file(state.paths.figures() / (m.question_id + ".svg"), render_heatmap(m));
        ++figures;
    }

    std::ostringstream detail;
    detail << "tables.txt, " << figures << " heatmap(s)";
    log << "  " << detail.str() << "\n";
    state.ledgers["report"] = json{{"figures", figures}};
    return detail.str();
}

void write_run_report(RunState& state, const RunConfig& cfg, const PipelineResult& result) {
    json stages = json::array();
    for (const StageOutcome& s : result.stages) {
        stages.push_back(json{{"name", s.name}, {"status", s.status}, {"detail", s.detail}});
    }
    json stats = json::object();
    if (state.gateway) {
        GatewayStatsSnapshot snap = state.gateway->stats();
        auto endpoint = [](const EndpointStats& e) {
            return json{{"calls", e.calls},
                        {"cache_hits", e.cache_hits},
                        {"retries", e.retries},
                        {"failures", e.failures}};
        };
        stats = json{{"chat", endpoint(snap.chat)},
                     {"embed", endpoint(snap.embed)},
                     {"rerank", endpoint(snap.rerank)},
                     {"network_calls", snap.network_calls},
                     {"chat_calls_by_task", snap.chat_calls_by_task}};
    }
    json doc{{"run_name", cfg.run_name},
             {"config_hash", state.config_hash},
             {"finished_at", iso8601_now()},
             {"exit_code", result.exit_code},
             {"stages", stages},
             {"ledgers", state.ledgers},
             {"gateway_stats", stats},
             {"warnings", state.warnings}};
    atomic_write_file(state.paths.run_report(), doc.dump(2) + "\n");

    if (!state.timestamps.empty()) {
        std::ostringstream lines;
        std::sort(state.timestamps.begin(), state.timestamps.end());
        for (const auto& [path, when] : state.timestamps) {
            lines << json{{"path", path}, {"generated_at", when}}.dump() << "\n";
        }
        std::string existing;
        if (std::filesystem::exists(state.paths.timestamps())) {
            existing = read_text_file(state.paths.timestamps());
        }
        atomic_write_file(state.paths.timestamps(), existing + lines.str());
    }
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& cfg, const std::vector<std::string>& stages,
                            std::ostream& log) {
    cfg.validate();

    std::set<std::string> selected(stages.begin(), stages.end());
    if (selected.empty()) {
        selected.insert(all_stage_names().begin(), all_stage_names().end());
    }
    for (const std::string& s : selected) {
        const auto& known = all_stage_names();
        if (std::find(known.begin(), known.end(), s) == known.end()) {
            throw ConfigError("unknown stage \"" + s + "\"");
        }
    }

    RunState state;
    state.paths = run_paths(cfg);
    std::filesystem::create_directories(state.paths.root);
    state.prompts = PromptSet::load(cfg.prompts_dir);
    state.config_hash = cfg.config_hash(state.prompts.hash);

    PipelineResult result;
    bool halted = false;

    auto run_stage = [&](const std::string& name,
                         const std::function<std::string(RunState&, const RunConfig&,
                                                         std::ostream&)>& fn,
                         int failure_code) {
        bool wanted = name == "validate" || selected.count(name) > 0;
        if (!wanted || halted) {
            if (wanted) result.stages.push_back({name, "not_run", ""});
            return;
        }
        log << "[" << name << "]\n";
        try {
            std::string detail = fn(state, cfg, log);
            result.stages.push_back({name, "ok", detail});
        } catch (const std::exception& e) {
            log << "  FAILED: " << e.what() << "\n";
            result.stages.push_back({name, "failed", e.what()});
            result.exit_code = failure_code;
            halted = true;
        }
    };

    run_stage("validate", stage_validate, 1);
    run_stage("index",
              [](RunState& s, const RunConfig& c, std::ostream& l) {
                  ensure_indexes(s, c, l);
                  return std::string("ready");
              },
              2);
    run_stage("generate", stage_generate, 2);
    run_stage("judge", stage_judge, 2);
    run_stage("metrics", stage_metrics, 2);
    run_stage("report", stage_report, 2);

    write_run_report(state, cfg, result);
    return result;
}

}  // namespace concord
