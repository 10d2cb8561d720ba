#pragma once

#include <string>
#include <vector>

#include "sopgraph/graph.hpp"

namespace sop {

/// Whether a decider's tool call alone identifies the selected branch.
/// Indistinguishable when two candidates bind the same tool or two or
/// more candidates bind none; those events branch through synthetic
/// explore_subtree_* tools instead.
enum class BranchMode { Distinguishable, Indistinguishable };

std::string branch_mode_to_text(BranchMode mode);

BranchMode classify_branching(const std::vector<const DecisionNode*>& candidates);

/// explore_subtree_A, explore_subtree_B, ... explore_subtree_Z,
/// explore_subtree_AA, ... one per candidate index.
std::string dummy_tool_name(std::size_t candidate_index);

}  // namespace sop
