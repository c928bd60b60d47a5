#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "osmeval/errors.hpp"
#include "osmeval/llm/schema.hpp"

namespace osmeval::llm {

struct ChatMessage {
    enum class Role { System, User };
    Role role = Role::User;
    std::string text;
    std::vector<std::filesystem::path> image_refs;  // user messages only
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    std::string model_id = "gemini-2.0-flash";
    double temperature = 0.0;
    int max_tokens = 1024;
    std::optional<JsonSchema> response_schema;
};

struct ChatResponse {
    std::string text;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    double latency_seconds = 0.0;
};

/// Raised by transports. `retryable` drives the gateway's backoff loop.
class TransportError : public Error {
public:
    TransportError(const std::string& message, bool retryable, int http_status = 0)
        : Error(message), retryable_(retryable), http_status_(http_status) {}
    bool retryable() const { return retryable_; }
    int http_status() const { return http_status_; }

private:
    bool retryable_;
    int http_status_;
};

/// All retries exhausted, or a non-retryable transport failure.
class GatewayError : public Error {
public:
    using Error::Error;
};

/// Replay mode found no stored response for a request.
class ReplayMissError : public Error {
public:
    ReplayMissError(const std::string& message, std::string digest)
        : Error(message), digest_(std::move(digest)) {}
    const std::string& digest() const { return digest_; }

private:
    std::string digest_;
};

/// Structured output still invalid after all corrective re-prompts.
class StructuredOutputError : public Error {
public:
    StructuredOutputError(const std::string& message, std::string raw_text)
        : Error(message), raw_text_(std::move(raw_text)) {}
    const std::string& raw_text() const { return raw_text_; }

private:
    std::string raw_text_;
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual ChatResponse send(const ChatRequest& request) = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_delay{1000};
    double factor = 2.0;
    double jitter = 0.2;  // +-20% of the computed delay
};

enum class GatewayMode { Live, Record, Replay };

struct GatewayConfig {
    GatewayMode mode = GatewayMode::Live;
    RetryPolicy retry;
    int max_in_flight = 4;
    std::chrono::milliseconds min_request_interval{0};
    /// Corrective re-prompts allowed per structured completion.
    int max_schema_retries = 2;
    std::filesystem::path store_dir;  // record/replay store
};

struct GatewayStats {
    std::int64_t requests = 0;
    std::int64_t retries = 0;
    std::int64_t replay_hits = 0;
    std::int64_t records = 0;
};

/// Canonical JSON form a request is hashed over: sorted keys, text verbatim,
/// image files replaced by digests of their bytes.
nlohmann::json canonical_request_json(const ChatRequest& request);

/// Stable content address of a request (SHA-256 hex of the canonical form).
std::string canonical_request_hash(const ChatRequest& request);

/// Directory of `<digest>.json` files, each holding the canonical request
/// and the raw response. Safe for concurrent writers of distinct digests.
class ReplayStore {
public:
    explicit ReplayStore(std::filesystem::path dir);

    std::optional<ChatResponse> lookup(const std::string& digest) const;
    void put(const std::string& digest, const nlohmann::json& canonical_request,
             const ChatResponse& response);
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

/// Single entry point for all chat/vision completions: retries with
/// exponential backoff, bounds in-flight concurrency, parses structured
/// output, and records or replays responses content-addressed by request
/// hash. Replay mode never touches the transport.
class Gateway {
public:
    Gateway(GatewayConfig config, std::shared_ptr<Transport> transport);

    ChatResponse complete(const ChatRequest& request);

    /// complete() + JSON extraction + schema validation, with up to
    /// max_schema_retries corrective re-prompts appending the validation
    /// error. The request must carry a response_schema.
    nlohmann::json complete_structured(const ChatRequest& request);

    GatewayStats stats() const;
    const GatewayConfig& config() const { return config_; }

private:
    ChatResponse transport_send_with_retries(const ChatRequest& request);
    void pace_request();

    GatewayConfig config_;
    std::shared_ptr<Transport> transport_;
    std::optional<ReplayStore> store_;

    mutable std::mutex slots_mutex_;
    std::condition_variable slots_cv_;
    int in_flight_ = 0;

    std::mutex pace_mutex_;
    std::chrono::steady_clock::time_point next_allowed_{};

    std::atomic<std::int64_t> requests_{0};
    std::atomic<std::int64_t> retries_{0};
    std::atomic<std::int64_t> replay_hits_{0};
    std::atomic<std::int64_t> records_{0};
};

}  // namespace osmeval::llm
