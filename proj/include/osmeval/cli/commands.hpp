#pragma once

#include <iostream>
#include <memory>
#include <optional>

#include "osmeval/cli/run_config.hpp"
#include "osmeval/llm/gateway.hpp"

namespace osmeval::cli {

/// Shared state for one CLI invocation. replay_dir + record select the
/// gateway mode: replay store only, record-through, or live. Tests may
/// inject a transport instead of the HTTP one.
struct CommandContext {
    RunConfig config;
    std::optional<std::filesystem::path> replay_dir;
    bool record = false;
    std::optional<int> workers_override;
    std::shared_ptr<llm::Transport> transport_override;
    std::ostream* log = &std::cerr;

    int workers() const { return workers_override.value_or(config.workers); }
    std::ostream& out() const { return *log; }
};

/// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfigError = 2;

int cmd_validate(const CommandContext& ctx);
int cmd_seg_eval(const CommandContext& ctx);
int cmd_qa_gen(const CommandContext& ctx);
int cmd_qa_validate(const CommandContext& ctx);
int cmd_qa_answer(const CommandContext& ctx);
int cmd_qa_eval(const CommandContext& ctx);
int cmd_report(const CommandContext& ctx);
int cmd_scenario_emit(const CommandContext& ctx);

/// Gateway assembled from the context (mode, store, transport, limits).
std::unique_ptr<llm::Gateway> make_gateway(const CommandContext& ctx);

}  // namespace osmeval::cli
