#include "sopgraph/ground_truth.hpp"

#include <functional>

#include "sopgraph/condition_eval.hpp"

namespace sop {

namespace {

constexpr int kTraversalBudget = 100000;

}  // namespace

GroundTruth ground_truth_trajectory(const DecisionGraph& graph, const Environment& env) {
    GroundTruth truth;
    Environment queues = env;  // consumed as the traversal executes tools
    ObservationLog log;
    int budget = kTraversalBudget;

    // last call seen on the way down; the value at a path end is that
    // path's leaf call
    std::function<void(NodeId, std::optional<std::string>)> visit =
        [&](NodeId id, std::optional<std::string> last_call) {
            if (--budget < 0) {
                throw EvalError(EvalErrorKind::MissingObservation,
                                "ground-truth traversal exceeded its step budget (looping SOP?)");
            }
            const DecisionNode& node = graph.node(id);

            if (node.tool && !node.is_workflow_root) {
                auto it = queues.outputs.find(*node.tool);
                if (it == queues.outputs.end() || it->second.empty()) {
                    throw EvalError(EvalErrorKind::MissingObservation,
                                    "environment provides no observation for tool '" + *node.tool +
                                        "'");
                }
                Observation obs = std::move(it->second.front());
                it->second.pop_front();
                log.append(*node.tool, std::move(obs));
                truth.calls.push_back(*node.tool);
                last_call = *node.tool;
            }

            std::vector<const DecisionNode*> selected;
            bool structured_taken = false;
            for (const DecisionNode* successor : graph.successors(id)) {
                if (!eval_condition(successor->condition, log)) continue;
                if (successor->condition.is_structured()) {
                    // benchmark conditions are mutually exclusive per
                    // node; when they are not, the first true one wins
                    if (structured_taken) {
                        truth.ambiguous = true;
                        continue;
                    }
                    structured_taken = true;
                }
                selected.push_back(successor);
            }

            if (selected.empty()) {
                if (last_call) truth.leaf_calls.push_back(*last_call);
                return;
            }
            for (const DecisionNode* successor : selected) visit(successor->id, last_call);
        };

    for (NodeId root : graph.roots()) visit(root, std::nullopt);
    return truth;
}

}  // namespace sop
