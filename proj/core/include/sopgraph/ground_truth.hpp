#pragma once

#include <string>
#include <vector>

#include "sopgraph/environment.hpp"
#include "sopgraph/graph.hpp"
#include "sopgraph/trace.hpp"

namespace sop {

/// Reference trajectory for one environment, derived independently of
/// the traversal engine. leaf_calls holds the final tool call of each
/// traversed root-to-leaf path, the unit of leaf accuracy.
struct GroundTruth {
    Trajectory calls;
    std::vector<std::string> leaf_calls;
    bool ambiguous = false;  // two structured sibling conditions were both true
};

/// Deterministic traversal selecting every successor whose condition
/// evaluates true against the environment: always-guarded siblings
/// cascade in listing order; among structured-guarded siblings the first
/// true one wins (more than one true is reported via `ambiguous`).
/// Workflow-root identifiers are excluded from the trajectory. Throws
/// EvalError on a missing observation.
GroundTruth ground_truth_trajectory(const DecisionGraph& graph, const Environment& env);

}  // namespace sop
