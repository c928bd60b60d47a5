#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "osmeval/cli/commands.hpp"
#include "osmeval/errors.hpp"

namespace {

struct GlobalArgs {
    std::string config_path;
    std::optional<int> workers;
    std::string replay_dir;
    bool record = false;
};

int dispatch(const GlobalArgs& args, int (*command)(const osmeval::cli::CommandContext&)) {
    osmeval::cli::CommandContext ctx;
    try {
        ctx.config = osmeval::cli::load_run_config(args.config_path);
    } catch (const osmeval::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return osmeval::cli::kExitConfigError;
    }
    if (args.workers) ctx.workers_override = *args.workers;
    if (!args.replay_dir.empty()) ctx.replay_dir = args.replay_dir;
    ctx.record = args.record;
    return command(ctx);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Open semantic mapping evaluation harness"};
    app.require_subcommand(1);

    GlobalArgs args;
    app.add_option("--config", args.config_path, "Run configuration file (JSON)")
        ->required()
        ->envname("OSMEVAL_CONFIG");
    app.add_option("--workers", args.workers, "Concurrent scene-level workers");
    app.add_option("--replay-dir", args.replay_dir,
                   "LLM record/replay store directory (replay unless --record)");
    app.add_flag("--record", args.record,
                 "Record live LLM responses into --replay-dir instead of replaying");

    struct SubcommandSpec {
        const char* name;
        const char* description;
        int (*command)(const osmeval::cli::CommandContext&);
    };
    const SubcommandSpec specs[] = {
        {"validate", "Check that every manifest-referenced file loads and holds its invariants",
         osmeval::cli::cmd_validate},
        {"seg-eval", "Compute segmentation metrics for every method/scene/condition",
         osmeval::cli::cmd_seg_eval},
        {"qa-gen", "Generate categorized questions from keyframes", osmeval::cli::cmd_qa_gen},
        {"qa-validate", "Deduplicate, validate, and balance generated questions",
         osmeval::cli::cmd_qa_validate},
        {"qa-answer", "Answer validated questions from each method's scene graph",
         osmeval::cli::cmd_qa_answer},
        {"qa-eval", "Judge answers and compute accuracy tables", osmeval::cli::cmd_qa_eval},
        {"report", "Render CSV/Markdown tables from stored results", osmeval::cli::cmd_report},
        {"scenario-emit", "Write simulator condition documents for every scene",
         osmeval::cli::cmd_scenario_emit},
    };
    for (const auto& spec : specs) {
        CLI::App* sub = app.add_subcommand(spec.name, spec.description);
        sub->fallthrough();  // global flags may follow the subcommand name
        sub->callback([&args, &spec] { std::exit(dispatch(args, spec.command)); });
    }

    CLI11_PARSE(app, argc, argv);
    return 0;
}
