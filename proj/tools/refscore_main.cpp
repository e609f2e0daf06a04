// refscore: batch LLM research-quality scoring and validation pipeline.
//
// Stages: ingest -> score -> analyze / structure, each resumable from the
// artifacts of the previous one. `all` runs ingest, score and analyze.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "refscore/backend_factory.hpp"
#include "refscore/pipeline.hpp"

namespace {

struct GlobalOptions {
    std::string config_path;
    std::optional<uint64_t> seed;
    bool mock = false;
};

refscore::RunConfig load_config(const GlobalOptions& opts) {
    auto cfg = refscore::load_run_config(opts.config_path);
    if (opts.seed)
        cfg.seed = *opts.seed;
    if (opts.mock)
        cfg.mock = true;
    return cfg;
}

int run_stage(const GlobalOptions& opts, const std::string& stage) {
    try {
        auto cfg = load_config(opts);
        refscore::OutputLock lock(cfg.output_dir);
        if (stage == "ingest")
            return refscore::cmd_ingest(cfg);
        if (stage == "score")
            return refscore::cmd_score(cfg);
        if (stage == "analyze")
            return refscore::cmd_analyze(cfg);
        if (stage == "structure")
            return refscore::cmd_structure(cfg);
        if (stage == "all") {
            int rc = refscore::cmd_ingest(cfg);
            if (rc != refscore::exit_code::ok)
                return rc;
            rc = refscore::cmd_score(cfg);
            if (rc != refscore::exit_code::ok)
                return rc;
            rc = refscore::cmd_analyze(cfg);
            if (rc != refscore::exit_code::ok)
                return rc;
            if (!cfg.structure_specs_path.empty())
                rc = refscore::cmd_structure(cfg);
            return rc;
        }
        std::cerr << "unknown stage " << stage << "\n";
        return refscore::exit_code::validation;
    } catch (const refscore::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return refscore::exit_code::validation;
    } catch (const refscore::TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return refscore::exit_code::transport;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return refscore::exit_code::validation;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Score journal articles for research quality via a chat-completion "
                 "endpoint and validate the scores against expert proxies"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "Run configuration file")->required();
    uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "Override the config seed");
    app.add_flag("--mock", opts.mock, "Use the deterministic mock scorer instead of the endpoint");

    app.add_subcommand("ingest", "Load the corpus, attach proxy scores and apply the filter");
    app.add_subcommand("score", "Submit prompts to the endpoint (resumable)");
    app.add_subcommand("analyze", "Extract scores and compute all statistics");
    app.add_subcommand("structure", "Tabulate report paragraph and heading patterns");
    app.add_subcommand("all", "Run ingest, score, analyze and structure in order");

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count())
        opts.seed = seed_value;

    return run_stage(opts, app.get_subcommands().front()->get_name());
}
