#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sopgraph/branching.hpp"
#include "sopgraph/graph.hpp"
#include "sopgraph/values.hpp"

namespace sop {

struct ToolCall {
    std::string tool;
    ArgumentMap args;

    bool operator==(const ToolCall&) const = default;
};

/// Ordered tool-call names of a run, workflow-root identifiers excluded.
using Trajectory = std::vector<std::string>;

/// One engine step: the node entered (its own call and observation, if
/// the node binds a tool) and the branching decision made over its
/// successors. queries_used is 0 for terminal/auto-advanced steps, 1 in
/// distinguishable mode, and 1 + k in indistinguishable mode with k
/// chosen tool-bearing branches.
struct TraceEvent {
    int step = 0;
    NodeId node = 0;
    std::optional<BranchMode> branch_mode;  // empty on terminal steps
    std::vector<NodeId> candidates;
    std::vector<NodeId> chosen;
    std::optional<ToolCall> call;
    std::optional<Observation> observation;
    int queries_used = 0;
};

/// One self-describing key/value record per event, newline-delimited,
/// byte-stable for identical runs.
std::string format_trace_event(const TraceEvent& event);
std::string format_trace(const std::vector<TraceEvent>& events);

}  // namespace sop
