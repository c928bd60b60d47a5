#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "osmeval/llm/gateway.hpp"

namespace osmeval::llm {

/// Wire settings for the chat-completions HTTP dialect.
struct HttpTransportConfig {
    /// Scheme + host + optional port, e.g. "http://localhost:8089".
    std::string base_url;
    std::string path = "/v1/chat/completions";
    /// Environment variable holding the API key. The key itself is read at
    /// send time and never logged or stored.
    std::string api_key_env = "OSMEVAL_API_KEY";
    std::chrono::seconds timeout{120};
};

/// Transport speaking the widely used chat-completions JSON dialect
/// (messages array, image parts as base64 data URLs, usage token counts).
/// 429 and 5xx responses and connection failures surface as retryable
/// TransportErrors; other 4xx are non-retryable.
class ChatCompletionsTransport : public Transport {
public:
    explicit ChatCompletionsTransport(HttpTransportConfig config);
    ChatResponse send(const ChatRequest& request) override;

private:
    HttpTransportConfig config_;
};

/// Build the dialect's request body (exposed for tests).
std::string chat_completions_body(const ChatRequest& request);

}  // namespace osmeval::llm
