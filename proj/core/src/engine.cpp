#include "sopgraph/engine.hpp"

#include <algorithm>
#include <set>

#include "sopgraph/condition_eval.hpp"
#include "sopgraph/prompt.hpp"

namespace sop {

namespace {

/// Indices of the candidates picked by an indistinguishable-mode
/// response, in candidate-listing order regardless of selection order.
std::vector<std::size_t> dummy_selection_indices(const DeciderResponse& response,
                                                 const PromptBundle& bundle) {
    std::set<std::size_t> picked;
    for (const Selection& sel : response.selections) {
        bool found = false;
        for (std::size_t i = 0; i < bundle.candidates.size(); ++i) {
            if (bundle.candidates[i].dummy_tool && *bundle.candidates[i].dummy_tool == sel.tool) {
                picked.insert(i);
                found = true;
                break;
            }
        }
        if (!found) {
            throw EngineFailure(FailureKind::HallucinatedCall,
                                "decider selected '" + sel.tool +
                                    "' which is not one of the offered explore_subtree tools");
        }
    }
    return {picked.begin(), picked.end()};
}

}  // namespace

std::string failure_kind_to_text(FailureKind kind) {
    switch (kind) {
        case FailureKind::HallucinatedCall: return "hallucinated-call";
        case FailureKind::NoBranchSelected: return "no-branch-selected";
        case FailureKind::ExecutorFailure: return "executor-failure";
        case FailureKind::StepLimitExceeded: return "step-limit-exceeded";
        case FailureKind::MissingObservation: return "missing-observation";
        case FailureKind::ContractViolation: return "contract-violation";
        case FailureKind::DeciderError: return "decider-error";
    }
    return "unknown";
}

EngineState make_engine_state(const DecisionGraph& graph, const EngineLimits& limits) {
    EngineState state;
    state.step_limit = limits.step_limit;
    state.seed = limits.seed;
    state.retry = limits.retry;
    const auto& roots = graph.roots();
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) state.frontier.push_back(*it);
    return state;
}

std::vector<NodeId> step(const DecisionGraph& graph,
                         EngineState& state,
                         Decider& decider,
                         Executor& executor) {
    if (state.frontier.empty()) {
        throw EngineFailure(FailureKind::ContractViolation, "step() called with an empty frontier");
    }
    if (state.steps_taken >= state.step_limit) {
        throw EngineFailure(FailureKind::StepLimitExceeded,
                            "step limit of " + std::to_string(state.step_limit) + " exhausted");
    }

    const NodeId id = state.frontier.back();
    state.frontier.pop_back();
    const DecisionNode& node = graph.node(id);

    TraceEvent event;
    event.step = state.steps_taken;
    event.node = id;
    state.steps_taken += 1;

    auto commit = [&]() -> TraceEvent& {
        state.history.push_back(event);
        state.query_count += event.queries_used;
        return state.history.back();
    };
    auto fail = [&](FailureKind kind, const std::string& detail) -> void {
        commit();
        throw EngineFailure(kind, detail);
    };

    // entering a selected node executes its bound tool; workflow roots
    // name the SOP rather than an action
    if (node.tool && !node.is_workflow_root) {
        ToolCall call{*node.tool, {}};
        if (auto pending = state.pending_args.find(id); pending != state.pending_args.end()) {
            call.args = std::move(pending->second);
            state.pending_args.erase(pending);
        }
        try {
            ExecutionResult result = execute_with_retry(executor, call, state.memory, state.retry);
            // recorded only on success so the trajectory always equals the
            // projection of call fields over the trace
            event.call = call;
            event.observation = std::move(result.observation);
        } catch (const ExecutorError& e) {
            const bool missing = std::string(e.what()).starts_with("missing observation");
            fail(missing ? FailureKind::MissingObservation : FailureKind::ExecutorFailure, e.what());
        }
        state.trajectory.push_back(call.tool);
    }

    const std::vector<const DecisionNode*> candidates = graph.successors(id);
    for (const DecisionNode* c : candidates) event.candidates.push_back(c->id);

    if (candidates.empty()) {
        event.queries_used = 0;
        commit();
        return {};
    }

    const BranchMode mode = classify_branching(candidates);
    event.branch_mode = mode;

    // a single tool-less candidate leaves nothing to ask: there is no
    // call to emit and no alternative to weigh
    if (candidates.size() == 1 && !candidates[0]->tool) {
        event.chosen.push_back(candidates[0]->id);
        event.queries_used = 0;
        commit();
        state.frontier.push_back(candidates[0]->id);
        return {candidates[0]->id};
    }

    PromptBundle bundle =
        build_step_prompt(graph, node, candidates, state.memory, state.history, mode);

    DeciderRequest request;
    request.prompt = bundle.prompt;
    request.tools = bundle.tools;
    request.mode = mode;
    request.multi_select_allowed = mode == BranchMode::Indistinguishable;
    request.candidates = bundle.candidates;

    DeciderResponse response;
    event.queries_used = 1;
    try {
        response = decider.decide(request);
    } catch (const EvalError& e) {
        fail(e.kind() == EvalErrorKind::MissingObservation ? FailureKind::MissingObservation
                                                           : FailureKind::DeciderError,
             e.what());
    } catch (const std::exception& e) {
        fail(FailureKind::DeciderError, e.what());
    }

    std::vector<NodeId>& chosen = event.chosen;

    if (mode == BranchMode::Distinguishable) {
        if (response.no_call) {
            const DecisionNode* tool_less = nullptr;
            for (const DecisionNode* c : candidates) {
                if (!c->tool) tool_less = c;
            }
            if (!tool_less) {
                fail(FailureKind::NoBranchSelected,
                     "decider answered without a call but every candidate binds a tool");
            }
            chosen.push_back(tool_less->id);
        } else if (response.selections.empty()) {
            fail(FailureKind::NoBranchSelected, "decider selected no branch");
        } else if (response.selections.size() > 1) {
            fail(FailureKind::ContractViolation,
                 "distinguishable branching allows a single selection, got " +
                     std::to_string(response.selections.size()));
        } else {
            const Selection& sel = response.selections.front();
            const DecisionNode* match = nullptr;
            for (const DecisionNode* c : candidates) {
                if (c->tool && *c->tool == sel.tool) {
                    match = c;
                    break;
                }
            }
            if (!match) {
                fail(FailureKind::HallucinatedCall,
                     "decider called '" + sel.tool + "' which no candidate binds");
            }
            chosen.push_back(match->id);
            state.pending_args[match->id] = sel.args;
        }
    } else {
        if (response.no_call || response.selections.empty()) {
            fail(FailureKind::NoBranchSelected, "decider selected no explore_subtree branch");
        }
        std::vector<std::size_t> indices;
        try {
            indices = dummy_selection_indices(response, bundle);
        } catch (const EngineFailure& e) {
            fail(e.kind(), e.what());
        }
        for (std::size_t index : indices) {
            const DecisionNode* c = candidates[index];
            chosen.push_back(c->id);
            if (!c->tool) continue;

            // second phase: generate the real call for this branch
            PromptBundle arg_bundle = build_argument_prompt(graph, *c, state.memory, state.history);
            DeciderRequest arg_request;
            arg_request.prompt = arg_bundle.prompt;
            arg_request.tools = arg_bundle.tools;
            arg_request.mode = BranchMode::Distinguishable;
            arg_request.multi_select_allowed = false;
            arg_request.candidates = arg_bundle.candidates;

            DeciderResponse arg_response;
            event.queries_used += 1;
            try {
                arg_response = decider.decide(arg_request);
            } catch (const std::exception& e) {
                fail(FailureKind::DeciderError, e.what());
            }
            if (arg_response.no_call || arg_response.selections.size() != 1) {
                fail(FailureKind::ContractViolation,
                     "argument generation for '" + *c->tool + "' did not return exactly one call");
            }
            if (arg_response.selections.front().tool != *c->tool) {
                fail(FailureKind::HallucinatedCall,
                     "argument generation called '" + arg_response.selections.front().tool +
                         "' instead of '" + *c->tool + "'");
            }
            state.pending_args[c->id] = arg_response.selections.front().args;
        }
    }

    commit();
    for (auto it = chosen.rbegin(); it != chosen.rend(); ++it) state.frontier.push_back(*it);
    return chosen;
}

RunResult run(const DecisionGraph& graph,
              Decider& decider,
              Executor& executor,
              const EngineLimits& limits) {
    EngineState state = make_engine_state(graph, limits);
    RunResult result;
    try {
        while (!state.frontier.empty()) {
            step(graph, state, decider, executor);
        }
    } catch (const EngineFailure& e) {
        result.failure = RunFailure{e.kind(), e.what()};
    }
    result.trajectory = std::move(state.trajectory);
    result.trace = std::move(state.history);
    result.query_count = state.query_count;
    return result;
}

}  // namespace sop
