#include "sopgraph/executor.hpp"

#include <chrono>
#include <thread>

namespace sop {

ExecutionResult execute_with_retry(Executor& executor,
                                   const ToolCall& call,
                                   Memory& memory,
                                   const RetryPolicy& policy) {
    const int attempts_allowed = policy.max_attempts > 0 ? policy.max_attempts : 1;
    for (int attempt = 1;; ++attempt) {
        try {
            return ExecutionResult{executor.execute(call, memory), attempt};
        } catch (const ExecutorError& e) {
            if (!e.retryable() || attempt >= attempts_allowed) throw;
            if (policy.backoff_base_seconds > 0.0) {
                const double seconds = policy.backoff_base_seconds * static_cast<double>(1 << (attempt - 1));
                std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
            }
        }
    }
}

Observation EnvironmentExecutor::execute(const ToolCall& call, Memory& memory) {
    (void)memory;
    auto it = env_.outputs.find(call.tool);
    if (it == env_.outputs.end()) {
        throw ExecutorError("missing observation: environment has no tool '" + call.tool + "'",
                            /*retryable=*/false);
    }
    if (it->second.empty()) {
        throw ExecutorError("missing observation: queue exhausted for tool '" + call.tool + "'",
                            /*retryable=*/false);
    }
    Observation obs = std::move(it->second.front());
    it->second.pop_front();
    if (log_) log_->append(call.tool, obs);
    return obs;
}

Observation EchoExecutor::execute(const ToolCall& call, Memory& memory) {
    (void)call;
    (void)memory;
    return Observation{{"status", Value{std::string("ok")}}};
}

}  // namespace sop
