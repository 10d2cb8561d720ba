#pragma once

#include <string>

#include "sopgraph/decider.hpp"
#include "sopgraph/executor.hpp"

namespace sop {

class TransportError : public DeciderError {
public:
    using DeciderError::DeciderError;
};

struct LlmConfig {
    std::string endpoint;  // full URL of a chat-completions style endpoint
    std::string model;
    double temperature = 0.0;
    std::string auth_token;
    int timeout_seconds = 60;
    RetryPolicy retry{3, 0.5};
};

/// Tool-calling client over a chat-completions wire protocol: the
/// request renders the filtered toolset as function schemas, the
/// response's tool calls become selections and a plain-text answer maps
/// to no_call. Transport failures and 429/5xx statuses are retried with
/// exponential backoff before surfacing as TransportError.
class LlmDecider : public Decider {
public:
    explicit LlmDecider(LlmConfig config);

    DeciderResponse decide(const DeciderRequest& request) override;

    /// Request body for one decide() call, exposed for tests.
    static std::string render_request_body(const LlmConfig& config, const DeciderRequest& request);

    /// Maps a chat-completions response body to a DeciderResponse.
    /// Throws DeciderError on malformed payloads and ContractViolation
    /// conditions (selection outside the toolset is left to the engine).
    static DeciderResponse parse_response_body(const std::string& body, const DeciderRequest& request);

private:
    LlmConfig config_;
};

}  // namespace sop
