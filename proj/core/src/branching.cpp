#include "sopgraph/branching.hpp"

#include <set>

namespace sop {

std::string branch_mode_to_text(BranchMode mode) {
    return mode == BranchMode::Distinguishable ? "distinguishable" : "indistinguishable";
}

BranchMode classify_branching(const std::vector<const DecisionNode*>& candidates) {
    std::set<std::string> tools;
    int tool_bearing = 0;
    int tool_less = 0;
    for (const DecisionNode* c : candidates) {
        if (c->tool) {
            ++tool_bearing;
            tools.insert(*c->tool);
        } else {
            ++tool_less;
        }
    }
    if (tool_less >= 2) return BranchMode::Indistinguishable;
    if (static_cast<int>(tools.size()) != tool_bearing) return BranchMode::Indistinguishable;
    return BranchMode::Distinguishable;
}

std::string dummy_tool_name(std::size_t candidate_index) {
    // A, B, ..., Z, AA, AB, ... (spreadsheet column naming)
    std::string suffix;
    std::size_t n = candidate_index;
    for (;;) {
        suffix.insert(suffix.begin(), static_cast<char>('A' + n % 26));
        if (n < 26) break;
        n = n / 26 - 1;
    }
    return "explore_subtree_" + suffix;
}

}  // namespace sop
