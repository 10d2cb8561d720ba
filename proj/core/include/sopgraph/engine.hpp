#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sopgraph/decider.hpp"
#include "sopgraph/executor.hpp"
#include "sopgraph/graph.hpp"
#include "sopgraph/memory.hpp"
#include "sopgraph/trace.hpp"

namespace sop {

enum class FailureKind {
    HallucinatedCall,   // decider named a tool outside the filtered toolset
    NoBranchSelected,   // decider declined to pick any branch
    ExecutorFailure,    // tool call failed after retries
    StepLimitExceeded,
    MissingObservation,
    ContractViolation,  // malformed decider response
    DeciderError,       // transport or evaluation failure inside the decider
};

std::string failure_kind_to_text(FailureKind kind);

struct RunFailure {
    FailureKind kind;
    std::string detail;
};

struct EngineLimits {
    int step_limit = 50;
    std::uint64_t seed = 0;
    RetryPolicy retry{};
};

/// Mutable state of one traversal. One run owns its state exclusively;
/// the graph it walks is shared and immutable.
struct EngineState {
    std::vector<NodeId> frontier;  // DFS stack, back() is the top
    Memory memory;
    std::vector<TraceEvent> history;
    Trajectory trajectory;
    int query_count = 0;
    int steps_taken = 0;
    int step_limit = 50;
    std::uint64_t seed = 0;
    RetryPolicy retry{};

    // Arguments generated ahead of time for selected branches, consumed
    // when the branch node is entered.
    std::map<NodeId, ArgumentMap> pending_args;
};

struct RunResult {
    Trajectory trajectory;
    std::vector<TraceEvent> trace;
    std::optional<RunFailure> failure;
    int query_count = 0;

    bool completed() const { return !failure.has_value(); }
};

/// Raised by step() so the run loop can record the terminal reason; the
/// offending event is already appended to the state's history.
class EngineFailure : public std::runtime_error {
public:
    EngineFailure(FailureKind kind, const std::string& detail)
        : std::runtime_error(detail), kind_(kind) {}

    FailureKind kind() const { return kind_; }

private:
    FailureKind kind_;
};

EngineState make_engine_state(const DecisionGraph& graph, const EngineLimits& limits);

/// Pops one node from the frontier: executes its bound tool (workflow
/// roots excluded), classifies the branching over its successors,
/// queries the decider, executes argument-generation queries for
/// dummy-selected branches, and pushes the chosen successors in reverse
/// candidate order. Appends exactly one TraceEvent.
///
/// Returns the ids chosen at this step. Throws EngineFailure on
/// hallucinated calls, empty selections, executor failures or an
/// exhausted step limit.
std::vector<NodeId> step(const DecisionGraph& graph,
                         EngineState& state,
                         Decider& decider,
                         Executor& executor);

/// Depth-first selective traversal from every workflow root until the
/// frontier empties or a limit/error fires. A failed result still
/// carries the partial trajectory and trace.
RunResult run(const DecisionGraph& graph,
              Decider& decider,
              Executor& executor,
              const EngineLimits& limits = {});

}  // namespace sop
