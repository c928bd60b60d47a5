#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "osmeval/llm/gateway.hpp"
#include "osmeval/vqa/prompts.hpp"

namespace osmeval::vqa {

struct LlmCallOptions {
    std::string model_id = "gemini-2.0-flash";
    double temperature = 0.0;
    int max_tokens = 1024;
};

/// Bundles the gateway, prompt set, and call options every pipeline stage
/// needs. Cheap to copy; the gateway and prompts are borrowed.
struct LlmSession {
    llm::Gateway* gateway = nullptr;
    const PromptLibrary* prompts = nullptr;
    LlmCallOptions options;

    llm::ChatRequest make_request(const std::string& template_id,
                                  const std::map<std::string, std::string>& vars,
                                  std::vector<std::filesystem::path> images = {},
                                  std::optional<llm::JsonSchema> schema = std::nullopt) const;
};

}  // namespace osmeval::vqa
