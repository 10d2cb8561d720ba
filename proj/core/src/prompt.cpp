#include "sopgraph/prompt.hpp"

#include <sstream>

namespace sop {

namespace {

void render_memory(std::ostringstream& out, const Memory& memory) {
    out << "Memory:\n";
    if (memory.empty()) {
        out << "  (empty)\n";
        return;
    }
    for (const auto& [key, value] : memory.entries()) {
        out << "  " << key << ": " << value << "\n";
    }
}

void render_history(std::ostringstream& out, const DecisionGraph& graph,
                    const std::vector<TraceEvent>& history) {
    out << "Recent steps:\n";
    if (history.empty()) {
        out << "  (none)\n";
        return;
    }
    const std::size_t window = static_cast<std::size_t>(kHistoryPromptWindow);
    const std::size_t first = history.size() > window ? history.size() - window : 0;
    for (std::size_t i = first; i < history.size(); ++i) {
        const TraceEvent& e = history[i];
        out << "  step " << e.step << ": " << graph.node(e.node).action_text;
        if (e.call) {
            out << " | called " << e.call->tool;
            if (e.observation) {
                out << " -> {";
                bool comma = false;
                for (const auto& [k, v] : *e.observation) {
                    if (comma) out << ", ";
                    out << k << ": " << canonical_text(v);
                    comma = true;
                }
                out << "}";
            }
        }
        out << "\n";
    }
}

char candidate_letter(std::size_t index) { return static_cast<char>('A' + index % 26); }

}  // namespace

PromptBundle build_step_prompt(const DecisionGraph& graph,
                               const DecisionNode& node,
                               const std::vector<const DecisionNode*>& candidates,
                               const Memory& memory,
                               const std::vector<TraceEvent>& history,
                               BranchMode mode) {
    PromptBundle bundle;
    std::ostringstream out;

    out << "You are executing a standard operating procedure step by step.\n\n";
    out << "Current step: " << node.action_text << "\n\n";
    render_memory(out, memory);
    out << "\n";
    render_history(out, graph, history);
    out << "\nCandidate next steps:\n";

    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const DecisionNode* c = candidates[i];
        CandidateInfo info;
        info.action_text = c->action_text;
        info.condition = c->condition;
        info.tool = c->tool;

        out << "  " << candidate_letter(i) << ". [" << c->condition.display() << "] "
            << c->action_text;

        if (mode == BranchMode::Indistinguishable) {
            const std::string dummy = dummy_tool_name(i);
            info.dummy_tool = dummy;
            ToolSpec spec;
            spec.name = dummy;
            spec.description = "Explore candidate " + std::string(1, candidate_letter(i)) + ": " +
                               c->action_text;
            bundle.tools.push_back(std::move(spec));
            out << " (select with " << dummy << ")";
        } else if (c->tool) {
            bundle.tools.push_back(graph.tool(*c->tool));
            out << " (calls " << *c->tool << ")";
        } else {
            out << " (no function call)";
        }
        out << "\n";
        bundle.candidates.push_back(std::move(info));
    }

    out << "\n";
    if (mode == BranchMode::Indistinguishable) {
        out << "Call every listed explore_subtree function whose candidate condition holds. "
               "You may select more than one.\n";
    } else {
        out << "Select the next step by calling the function of the matching candidate. "
               "If the only applicable candidate has no function call, answer in plain text "
               "without calling any function.\n";
    }

    bundle.prompt = out.str();
    return bundle;
}

PromptBundle build_argument_prompt(const DecisionGraph& graph,
                                   const DecisionNode& selected,
                                   const Memory& memory,
                                   const std::vector<TraceEvent>& history) {
    PromptBundle bundle;
    if (!selected.tool) return bundle;

    std::ostringstream out;
    out << "You are executing a standard operating procedure step by step.\n\n";
    render_memory(out, memory);
    out << "\n";
    render_history(out, graph, history);
    out << "\nGenerate the function call for the selected step: " << selected.action_text << "\n";
    out << "Call " << *selected.tool << " with the arguments the step requires.\n";

    bundle.prompt = out.str();
    bundle.tools.push_back(graph.tool(*selected.tool));

    CandidateInfo info;
    info.action_text = selected.action_text;
    info.condition = selected.condition;
    info.tool = selected.tool;
    bundle.candidates.push_back(std::move(info));
    return bundle;
}

}  // namespace sop
