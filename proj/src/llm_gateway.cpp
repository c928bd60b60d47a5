#include "osmeval/llm/gateway.hpp"

#include <random>
#include <thread>

#include "osmeval/digest.hpp"
#include "osmeval/json_util.hpp"

namespace osmeval::llm {

using nlohmann::json;

namespace {

std::string role_name(ChatMessage::Role role) {
    return role == ChatMessage::Role::System ? "system" : "user";
}

}  // namespace

json canonical_request_json(const ChatRequest& request) {
    json messages = json::array();
    for (const auto& msg : request.messages) {
        json images = json::array();
        for (const auto& ref : msg.image_refs) {
            // Content-addressed: two paths to identical bytes hash the same.
            images.push_back(sha256_file_hex(ref));
        }
        messages.push_back(
            {{"role", role_name(msg.role)}, {"text", msg.text}, {"images", std::move(images)}});
    }
    json doc{{"messages", std::move(messages)},
             {"model_id", request.model_id},
             {"temperature", request.temperature},
             {"max_tokens", request.max_tokens}};
    doc["schema"] = request.response_schema ? json(request.response_schema->id) : json(nullptr);
    return doc;
}

std::string canonical_request_hash(const ChatRequest& request) {
    return sha256_hex(canonical_request_json(request).dump());
}

ReplayStore::ReplayStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::optional<ChatResponse> ReplayStore::lookup(const std::string& digest) const {
    const std::filesystem::path path = dir_ / (digest + ".json");
    if (!std::filesystem::exists(path)) return std::nullopt;
    const json doc = parse_json_file(path);
    const json& resp = require_field(doc, "response", path.string());
    ChatResponse response;
    response.text = require_string(resp, "text", path.string());
    response.prompt_tokens = static_cast<std::int64_t>(require_number(resp, "prompt_tokens", path.string()));
    response.completion_tokens =
        static_cast<std::int64_t>(require_number(resp, "completion_tokens", path.string()));
    return response;
}

void ReplayStore::put(const std::string& digest, const json& canonical_request,
                      const ChatResponse& response) {
    const json doc{{"request", canonical_request},
                   {"response",
                    {{"text", response.text},
                     {"prompt_tokens", response.prompt_tokens},
                     {"completion_tokens", response.completion_tokens}}}};
    // Unique temp name: concurrent writers of the same digest must not race
    // on a shared partial file.
    static std::atomic<std::uint64_t> counter{0};
    const std::filesystem::path final_path = dir_ / (digest + ".json");
    std::filesystem::path tmp = final_path;
    tmp += ".tmp" + std::to_string(counter.fetch_add(1));
    write_text_file(tmp, canonical_dump(doc));
    std::error_code ec;
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) throw IoError("cannot finalize store entry " + final_path.string() + ": " +
                          ec.message());
}

Gateway::Gateway(GatewayConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
    if (config_.mode != GatewayMode::Live) {
        if (config_.store_dir.empty()) {
            throw ConfigError("record/replay mode requires a store directory");
        }
        store_.emplace(config_.store_dir);
    }
    if (config_.mode != GatewayMode::Replay && !transport_) {
        throw ConfigError("live/record mode requires a transport");
    }
    if (config_.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
    if (config_.retry.max_attempts < 1) throw ConfigError("retry.max_attempts must be >= 1");
}

void Gateway::pace_request() {
    if (config_.min_request_interval.count() <= 0) return;
    std::chrono::steady_clock::time_point wake;
    {
        std::lock_guard lock(pace_mutex_);
        const auto now = std::chrono::steady_clock::now();
        wake = next_allowed_ > now ? next_allowed_ : now;
        next_allowed_ = wake + config_.min_request_interval;
    }
    std::this_thread::sleep_until(wake);
}

ChatResponse Gateway::transport_send_with_retries(const ChatRequest& request) {
    thread_local std::mt19937_64 rng{std::random_device{}()};

    // Bound in-flight transport calls.
    {
        std::unique_lock lock(slots_mutex_);
        slots_cv_.wait(lock, [this] { return in_flight_ < config_.max_in_flight; });
        ++in_flight_;
    }
    struct SlotRelease {
        Gateway* gw;
        ~SlotRelease() {
            {
                std::lock_guard lock(gw->slots_mutex_);
                --gw->in_flight_;
            }
            gw->slots_cv_.notify_one();
        }
    } release{this};

    std::string last_cause;
    for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
        pace_request();
        try {
            const auto start = std::chrono::steady_clock::now();
            ChatResponse response = transport_->send(request);
            response.latency_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            return response;
        } catch (const TransportError& e) {
            last_cause = e.what();
            if (!e.retryable() || attempt == config_.retry.max_attempts) break;
            retries_.fetch_add(1);
            double delay_ms = static_cast<double>(config_.retry.base_delay.count());
            for (int i = 1; i < attempt; ++i) delay_ms *= config_.retry.factor;
            if (config_.retry.jitter > 0.0) {
                std::uniform_real_distribution<double> jitter(1.0 - config_.retry.jitter,
                                                              1.0 + config_.retry.jitter);
                delay_ms *= jitter(rng);
            }
            std::this_thread::sleep_for(
                std::chrono::milliseconds(static_cast<std::int64_t>(delay_ms)));
        }
    }
    throw GatewayError("completion failed after " + std::to_string(config_.retry.max_attempts) +
                       " attempt(s); last cause: " + last_cause);
}

ChatResponse Gateway::complete(const ChatRequest& request) {
    if (request.messages.empty()) {
        throw ContractViolation("chat request must contain at least one message");
    }
    for (const auto& msg : request.messages) {
        if (msg.role == ChatMessage::Role::System && !msg.image_refs.empty()) {
            throw ContractViolation("image references are only allowed on user messages");
        }
    }
    requests_.fetch_add(1);

    if (config_.mode == GatewayMode::Replay) {
        const std::string digest = canonical_request_hash(request);
        auto stored = store_->lookup(digest);
        if (!stored) {
            throw ReplayMissError("replay store has no response for request " + digest, digest);
        }
        replay_hits_.fetch_add(1);
        return *stored;
    }

    const ChatResponse response = transport_send_with_retries(request);
    if (config_.mode == GatewayMode::Record) {
        const std::string digest = canonical_request_hash(request);
        store_->put(digest, canonical_request_json(request), response);
        records_.fetch_add(1);
    }
    return response;
}

json Gateway::complete_structured(const ChatRequest& request) {
    if (!request.response_schema) {
        throw ContractViolation("complete_structured requires a response_schema");
    }
    const JsonSchema& schema = *request.response_schema;

    ChatRequest current = request;
    std::string last_raw;
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_schema_retries; ++attempt) {
        const ChatResponse response = complete(current);
        last_raw = response.text;
        try {
            const json parsed = extract_json(response.text);
            const auto error = validate_against(schema, parsed);
            if (!error) return parsed;
            last_error = *error;
        } catch (const ParseError& e) {
            last_error = e.what();
        }
        if (attempt < config_.max_schema_retries) {
            ChatMessage correction;
            correction.role = ChatMessage::Role::User;
            correction.text = "Your previous reply was:\n" + last_raw +
                              "\n\nIt failed validation: " + last_error +
                              "\nReply again with only a JSON document of the form " +
                              schema_sketch(schema) + ".";
            current.messages.push_back(std::move(correction));
        }
    }
    throw StructuredOutputError("structured output still invalid after " +
                                    std::to_string(config_.max_schema_retries) +
                                    " corrective re-prompt(s): " + last_error,
                                last_raw);
}

GatewayStats Gateway::stats() const {
    return {requests_.load(), retries_.load(), replay_hits_.load(), records_.load()};
}

}  // namespace osmeval::llm
