#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "concord/pipeline.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string stages_csv;
    std::string output_dir;
    std::string run_name;
    int workers = 0;
    bool strict = false;
    bool mock = false;
};

void add_common(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Run configuration file (INI)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.output_dir, "Override output directory");
    cmd->add_option("--run-name", opts.run_name, "Override run name");
    cmd->add_option("--workers", opts.workers, "Worker threads for generation/judging");
    cmd->add_flag("--strict", opts.strict, "Fail instead of warn on recoverable issues");
    cmd->add_flag("--mock", opts.mock,
                  "Swap all gateway endpoints for deterministic offline mocks");
}

int execute(const CliOptions& opts, const std::vector<std::string>& stages) {
    concord::RunConfig cfg = concord::load_run_config(opts.config_path);
    if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
    if (!opts.run_name.empty()) cfg.run_name = opts.run_name;
    if (opts.workers > 0) cfg.workers = opts.workers;
    if (opts.strict) cfg.strict = true;
    if (opts.mock) cfg.mock = true;

    concord::PipelineResult result = concord::run_pipeline(cfg, stages, std::cout);
    for (const auto& stage : result.stages) {
        std::cout << stage.name << ": " << stage.status
                  << (stage.detail.empty() ? "" : " (" + stage.detail + ")") << "\n";
    }
    return result.exit_code;
}

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(csv);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"concord: cross-document consistency analysis pipeline"};
    app.require_subcommand(1);

    CliOptions opts;
    std::map<std::string, CLI::App*> verbs;
    for (const std::string& stage : concord::all_stage_names()) {
        verbs[stage] = app.add_subcommand(stage, "Run the " + stage + " stage");
        add_common(verbs[stage], opts);
    }
    CLI::App* run = app.add_subcommand("run", "Run every stage in order");
    add_common(run, opts);
    run->add_option("--stages", opts.stages_csv,
                    "Comma-separated subset of stages (default: all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return execute(opts, split_csv(opts.stages_csv));
        }
        for (const auto& [stage, cmd] : verbs) {
            if (cmd->parsed()) return execute(opts, {stage});
        }
        return 1;
    } catch (const concord::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const concord::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
