#pragma once

#include <atomic>
#include <mutex>
#include <set>
#include <string>

#include "osmeval/llm/gateway.hpp"

namespace osmeval::testing {

/// Deterministic stand-in for a live LVLM endpoint. Routes on the "TASK:"
/// line each prompt template opens with and answers from the request's own
/// markers, so recording a pipeline against it produces a stable replay
/// store.
class ScriptedTransport : public llm::Transport {
public:
    llm::ChatResponse send(const llm::ChatRequest& request) override;

    std::int64_t calls() const { return calls_.load(); }

private:
    std::atomic<std::int64_t> calls_{0};
};

/// Fails every call; proves a code path performs no transport IO.
class FailOnUseTransport : public llm::Transport {
public:
    llm::ChatResponse send(const llm::ChatRequest&) override {
        used_.store(true);
        throw llm::TransportError("transport must not be used", /*retryable=*/false);
    }
    bool used() const { return used_.load(); }

private:
    std::atomic<bool> used_{false};
};

/// Returns retryable failures for the first `failures` calls, then succeeds.
class FlakyTransport : public llm::Transport {
public:
    explicit FlakyTransport(int failures, int http_status = 429)
        : failures_(failures), http_status_(http_status) {}

    llm::ChatResponse send(const llm::ChatRequest&) override {
        const int n = calls_.fetch_add(1);
        if (n < failures_) {
            throw llm::TransportError("stub says HTTP " + std::to_string(http_status_),
                                      /*retryable=*/true, http_status_);
        }
        return {"ok", 1, 1, 0.0};
    }
    int calls() const { return calls_.load(); }

private:
    int failures_;
    int http_status_;
    std::atomic<int> calls_{0};
};

/// Tracks the maximum number of concurrent in-flight sends.
class ConcurrencyProbeTransport : public llm::Transport {
public:
    llm::ChatResponse send(const llm::ChatRequest&) override;

    int max_in_flight() const { return max_in_flight_.load(); }
    int calls() const { return calls_.load(); }

private:
    std::atomic<int> in_flight_{0};
    std::atomic<int> max_in_flight_{0};
    std::atomic<int> calls_{0};
};

/// Replies from a fixed script: entry i answers call i; the last entry
/// repeats. Useful for corrective re-prompt sequences.
class SequenceTransport : public llm::Transport {
public:
    explicit SequenceTransport(std::vector<std::string> replies)
        : replies_(std::move(replies)) {}

    llm::ChatResponse send(const llm::ChatRequest&) override {
        const std::size_t n = static_cast<std::size_t>(calls_.fetch_add(1));
        const std::string& text = replies_[std::min(n, replies_.size() - 1)];
        return {text, 1, 1, 0.0};
    }
    int calls() const { return calls_.load(); }

private:
    std::vector<std::string> replies_;
    std::atomic<int> calls_{0};
};

}  // namespace osmeval::testing
