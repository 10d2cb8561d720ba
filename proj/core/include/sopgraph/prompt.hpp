#pragma once

#include <string>
#include <vector>

#include "sopgraph/branching.hpp"
#include "sopgraph/decider.hpp"
#include "sopgraph/memory.hpp"
#include "sopgraph/trace.hpp"

namespace sop {

/// Events from the tail of the trace rendered into step prompts.
inline constexpr int kHistoryPromptWindow = 20;

struct PromptBundle {
    std::string prompt;
    std::vector<ToolSpec> tools;            // real tools or explore_subtree_* dummies
    std::vector<CandidateInfo> candidates;  // dummy assignment filled in when applicable
};

/// Renders the branching prompt for one step: the current node, memory
/// in full, the most recent history window, and every candidate's
/// condition and action text in listing order. The toolset carries
/// exactly the candidates' tools (distinguishable) or one dummy tool per
/// candidate (indistinguishable).
PromptBundle build_step_prompt(const DecisionGraph& graph,
                               const DecisionNode& node,
                               const std::vector<const DecisionNode*>& candidates,
                               const Memory& memory,
                               const std::vector<TraceEvent>& history,
                               BranchMode mode);

/// Prompt for the follow-up query that generates arguments for one
/// dummy-selected branch; the toolset is exactly that branch's tool.
PromptBundle build_argument_prompt(const DecisionGraph& graph,
                                   const DecisionNode& selected,
                                   const Memory& memory,
                                   const std::vector<TraceEvent>& history);

}  // namespace sop
