#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include "sopgraph/environment.hpp"
#include "sopgraph/memory.hpp"
#include "sopgraph/trace.hpp"

namespace sop {

class ExecutorError : public std::runtime_error {
public:
    explicit ExecutorError(const std::string& message, bool retryable = true)
        : std::runtime_error(message), retryable_(retryable) {}

    bool retryable() const { return retryable_; }

private:
    bool retryable_;
};

/// Executes tool calls and returns their observations. Implementations
/// may read and write the run's memory (that is how memory-logging tools
/// work). Throws ExecutorError on failure.
class Executor {
public:
    virtual ~Executor() = default;
    virtual Observation execute(const ToolCall& call, Memory& memory) = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    double backoff_base_seconds = 0.0;  // 0 for in-process executors
};

struct ExecutionResult {
    Observation observation;
    int attempts = 1;
};

/// Retries retryable executor failures up to policy.max_attempts with
/// exponential backoff, then rethrows the last error.
ExecutionResult execute_with_retry(Executor& executor,
                                   const ToolCall& call,
                                   Memory& memory,
                                   const RetryPolicy& policy);

/// Serves observations from a pre-sampled environment, consuming one
/// queued value per call and appending it to the shared log. An absent
/// tool or exhausted queue is a non-retryable missing-observation error.
class EnvironmentExecutor : public Executor {
public:
    EnvironmentExecutor(Environment env, std::shared_ptr<ObservationLog> log)
        : env_(std::move(env)), log_(std::move(log)) {}

    Observation execute(const ToolCall& call, Memory& memory) override;

    const Environment& remaining() const { return env_; }

private:
    Environment env_;
    std::shared_ptr<ObservationLog> log_;
};

/// Fallback executor for live runs without a simulated environment:
/// acknowledges every call with {"status": "ok"}.
class EchoExecutor : public Executor {
public:
    Observation execute(const ToolCall& call, Memory& memory) override;
};

}  // namespace sop
