#include "osmeval/llm/transport_http.hpp"

#include <cstdlib>
#include <fstream>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "osmeval/json_util.hpp"
#include "osmeval/text.hpp"

namespace osmeval::llm {

using nlohmann::json;

namespace {

std::string mime_for(const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    return "image/png";
}

std::string data_url(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image: " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return "data:" + mime_for(path) + ";base64," + base64_encode(bytes);
}

}  // namespace

std::string chat_completions_body(const ChatRequest& request) {
    json messages = json::array();
    for (const auto& msg : request.messages) {
        const std::string role = msg.role == ChatMessage::Role::System ? "system" : "user";
        if (msg.image_refs.empty()) {
            messages.push_back({{"role", role}, {"content", msg.text}});
        } else {
            json parts = json::array();
            parts.push_back({{"type", "text"}, {"text", msg.text}});
            for (const auto& ref : msg.image_refs) {
                parts.push_back(
                    {{"type", "image_url"}, {"image_url", {{"url", data_url(ref)}}}});
            }
            messages.push_back({{"role", role}, {"content", std::move(parts)}});
        }
    }
    json body{{"model", request.model_id},
              {"temperature", request.temperature},
              {"max_tokens", request.max_tokens},
              {"messages", std::move(messages)}};
    if (request.response_schema) {
        body["response_format"] = {{"type", "json_object"}};
    }
    return body.dump();
}

ChatCompletionsTransport::ChatCompletionsTransport(HttpTransportConfig config)
    : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ConfigError("transport base_url must be set");
}

ChatResponse ChatCompletionsTransport::send(const ChatRequest& request) {
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout.count(), 0);
    client.set_read_timeout(config_.timeout.count(), 0);

    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    const std::string body = chat_completions_body(request);
    auto result = client.Post(config_.path, headers, body, "application/json");
    if (!result) {
        throw TransportError("connection to " + config_.base_url +
                                 " failed: " + httplib::to_string(result.error()),
                             /*retryable=*/true);
    }
    if (result->status == 429 || result->status >= 500) {
        throw TransportError("endpoint returned HTTP " + std::to_string(result->status),
                             /*retryable=*/true, result->status);
    }
    if (result->status != 200) {
        throw TransportError("endpoint returned HTTP " + std::to_string(result->status) + ": " +
                                 result->body,
                             /*retryable=*/false, result->status);
    }

    const json doc = parse_json_text(result->body, "chat-completions response");
    const json& choices = require_field(doc, "choices", "chat-completions response");
    if (!choices.is_array() || choices.empty()) {
        throw TransportError("chat-completions response has no choices", /*retryable=*/false,
                             result->status);
    }
    ChatResponse response;
    const json& message = require_field(choices[0], "message", "chat-completions choice");
    response.text = require_string(message, "content", "chat-completions message");
    if (doc.contains("usage")) {
        const json& usage = doc["usage"];
        response.prompt_tokens = usage.value("prompt_tokens", 0);
        response.completion_tokens = usage.value("completion_tokens", 0);
    }
    return response;
}

}  // namespace osmeval::llm
