#include "osmeval/vqa/session.hpp"

#include "osmeval/errors.hpp"

namespace osmeval::vqa {

llm::ChatRequest LlmSession::make_request(const std::string& template_id,
                                          const std::map<std::string, std::string>& vars,
                                          std::vector<std::filesystem::path> images,
                                          std::optional<llm::JsonSchema> schema) const {
    if (!gateway || !prompts) throw ContractViolation("LLM session is not configured");
    const PromptTemplate& tmpl = prompts->get(template_id);

    llm::ChatRequest request;
    request.model_id = options.model_id;
    request.temperature = options.temperature;
    request.max_tokens = options.max_tokens;
    request.response_schema = std::move(schema);

    llm::ChatMessage system;
    system.role = llm::ChatMessage::Role::System;
    system.text = render_template(tmpl.system_text, vars);
    request.messages.push_back(std::move(system));

    llm::ChatMessage user;
    user.role = llm::ChatMessage::Role::User;
    user.text = render_template(tmpl.user_text, vars);
    user.image_refs = std::move(images);
    request.messages.push_back(std::move(user));
    return request;
}

}  // namespace osmeval::vqa
