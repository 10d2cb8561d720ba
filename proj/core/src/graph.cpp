#include "sopgraph/graph.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace sop {

namespace {

struct Builder {
    std::vector<DecisionNode> nodes;
    std::map<std::string, NodeId> labels;
    std::map<std::string, ToolSpec> registry;
    std::vector<std::pair<NodeId, std::vector<std::string>>> pending_gotos;

    NodeId add(const NodeSpec& spec, bool is_root) {
        const NodeId id = static_cast<NodeId>(nodes.size());
        DecisionNode node;
        node.id = id;
        node.action_text = spec.action_text;
        node.condition = spec.condition;
        node.is_workflow_root = is_root;
        if (spec.tool) {
            node.tool = spec.tool->name;
            register_tool(*spec.tool);
        }
        nodes.push_back(std::move(node));
        if (spec.label) labels.emplace(*spec.label, id);
        if (!spec.goto_labels.empty()) pending_gotos.emplace_back(id, spec.goto_labels);

        std::vector<NodeId> child_ids;
        child_ids.reserve(spec.children.size());
        for (const NodeSpec& child : spec.children) child_ids.push_back(add(child, false));
        nodes[static_cast<std::size_t>(id)].child_ids = std::move(child_ids);
        return id;
    }

    void register_tool(const ToolSpec& tool) {
        auto [it, inserted] = registry.emplace(tool.name, tool);
        if (!inserted) {
            const bool same = it->second.description == tool.description ||
                              it->second.description.empty() || tool.description.empty();
            if (!same) {
                throw GraphError("duplicate tool name '" + tool.name +
                                 "' bound with conflicting descriptions");
            }
            if (it->second.description.empty()) it->second.description = tool.description;
        }
    }

    void resolve_gotos() {
        for (auto& [id, targets] : pending_gotos) {
            for (const std::string& target : targets) {
                auto it = labels.find(target);
                if (it == labels.end()) {
                    throw GraphError("unresolved goto label '" + target + "'");
                }
                nodes[static_cast<std::size_t>(id)].goto_ids.push_back(it->second);
            }
        }
    }
};

}  // namespace

DecisionGraph DecisionGraph::build(const SopDocument& doc) {
    if (doc.roots.empty()) throw GraphError("document has no root nodes");

    Builder builder;
    DecisionGraph graph;
    for (const NodeSpec& root : doc.roots) {
        graph.roots_.push_back(builder.add(root, true));
    }
    builder.resolve_gotos();

    graph.nodes_ = std::move(builder.nodes);
    graph.labels_ = std::move(builder.labels);
    graph.tool_registry_ = std::move(builder.registry);

    // condition tools must be registered even if only referenced, never bound
    for (const DecisionNode& node : graph.nodes_) {
        if (const auto* s = node.condition.structured()) {
            if (!graph.tool_registry_.count(s->api)) {
                throw GraphError("structured condition references unregistered tool '" + s->api + "'");
            }
        }
        std::set<NodeId> successors(node.child_ids.begin(), node.child_ids.end());
        for (NodeId g : node.goto_ids) {
            if (!successors.insert(g).second) {
                throw GraphError("node '" + node.action_text + "' lists successor twice");
            }
        }
    }
    return graph;
}

DecisionGraph build_graph(const SopDocument& doc) { return DecisionGraph::build(doc); }

const DecisionNode& DecisionGraph::node(NodeId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
        throw GraphError("unknown node id " + std::to_string(id));
    }
    return nodes_[static_cast<std::size_t>(id)];
}

const ToolSpec& DecisionGraph::tool(const std::string& name) const {
    auto it = tool_registry_.find(name);
    if (it == tool_registry_.end()) throw GraphError("unknown tool '" + name + "'");
    return it->second;
}

std::vector<NodeId> DecisionGraph::successor_ids(NodeId id) const {
    const DecisionNode& n = node(id);
    std::vector<NodeId> out = n.child_ids;
    out.insert(out.end(), n.goto_ids.begin(), n.goto_ids.end());
    return out;
}

std::vector<const DecisionNode*> DecisionGraph::successors(NodeId id) const {
    std::vector<const DecisionNode*> out;
    for (NodeId s : successor_ids(id)) out.push_back(&node(s));
    return out;
}

int DecisionGraph::leaf_count_below(NodeId id) const {
    const DecisionNode& n = node(id);
    std::set<NodeId> on_path;
    std::function<int(const DecisionNode&)> count = [&](const DecisionNode& cur) -> int {
        if (!on_path.insert(cur.id).second) {
            throw GraphError("child-edge cycle through node " + std::to_string(cur.id));
        }
        int total = 0;
        if (cur.child_ids.empty()) {
            total = 1;
        } else {
            for (NodeId c : cur.child_ids) total += count(node(c));
        }
        on_path.erase(cur.id);
        return total;
    };
    return count(n);
}

GraphStats DecisionGraph::compute_stats() const {
    GraphStats stats;
    stats.node_count = static_cast<int>(nodes_.size());
    stats.unique_tool_count = static_cast<int>(tool_registry_.size());

    int child_edges = 0;
    long long leaf_depth_sum = 0;

    std::function<void(NodeId, int)> walk = [&](NodeId id, int depth) {
        const DecisionNode& n = node(id);
        stats.max_depth = std::max(stats.max_depth, depth);
        if (n.child_ids.empty()) {
            stats.leaf_count += 1;
            leaf_depth_sum += depth;
        } else {
            child_edges += static_cast<int>(n.child_ids.size());
            for (NodeId c : n.child_ids) walk(c, depth + 1);
        }
    };
    for (NodeId root : roots_) walk(root, 0);

    stats.non_leaf_count = stats.node_count - stats.leaf_count;
    stats.avg_leaf_depth =
        stats.leaf_count ? static_cast<double>(leaf_depth_sum) / stats.leaf_count : 0.0;
    stats.avg_children_per_non_leaf =
        stats.non_leaf_count ? static_cast<double>(child_edges) / stats.non_leaf_count : 0.0;
    return stats;
}

}  // namespace sop
