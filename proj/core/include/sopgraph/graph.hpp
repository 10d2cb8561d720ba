#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "sopgraph/document.hpp"

namespace sop {

using NodeId = std::int32_t;

struct DecisionNode {
    NodeId id = 0;
    std::string action_text;
    Condition condition;
    std::optional<std::string> tool;  // name into the graph's tool registry
    std::vector<NodeId> child_ids;
    std::vector<NodeId> goto_ids;
    bool is_workflow_root = false;

    /// Terminal for traversal: no successors of either kind. Statistics
    /// use child edges only and treat goto-only nodes as leaves.
    bool is_terminal() const { return child_ids.empty() && goto_ids.empty(); }
};

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Summary statistics over the child-edge tree (goto edges are ignored
/// by depth/children counts; the workflow root has depth 0).
struct GraphStats {
    int node_count = 0;
    int leaf_count = 0;
    int non_leaf_count = 0;
    int max_depth = 0;
    double avg_leaf_depth = 0.0;
    double avg_children_per_non_leaf = 0.0;
    int unique_tool_count = 0;
};

/// Immutable execution substrate built from a validated SopDocument.
/// Tree edges become child edges, goto labels resolve to goto edges
/// (cycles allowed), and every tool bound anywhere is registered by name.
class DecisionGraph {
public:
    static DecisionGraph build(const SopDocument& doc);

    const DecisionNode& node(NodeId id) const;
    const std::vector<DecisionNode>& nodes() const { return nodes_; }
    const std::vector<NodeId>& roots() const { return roots_; }
    const std::map<std::string, NodeId>& labels() const { return labels_; }
    const std::map<std::string, ToolSpec>& tool_registry() const { return tool_registry_; }
    const ToolSpec& tool(const std::string& name) const;

    /// Child-edge targets followed by goto-edge targets, order-stable.
    std::vector<NodeId> successor_ids(NodeId id) const;
    std::vector<const DecisionNode*> successors(NodeId id) const;

    /// Number of leaves in the child-edge subtree under `id`; a leaf
    /// counts itself as one. Throws GraphError if a child-edge cycle is
    /// encountered (possible only for hand-built graphs).
    int leaf_count_below(NodeId id) const;

    GraphStats compute_stats() const;

    int size() const { return static_cast<int>(nodes_.size()); }

private:
    std::vector<DecisionNode> nodes_;
    std::vector<NodeId> roots_;
    std::map<std::string, NodeId> labels_;
    std::map<std::string, ToolSpec> tool_registry_;
};

/// Convenience wrapper around DecisionGraph::build.
DecisionGraph build_graph(const SopDocument& doc);

}  // namespace sop
