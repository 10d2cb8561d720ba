#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sopgraph/branching.hpp"
#include "sopgraph/document.hpp"
#include "sopgraph/values.hpp"

namespace sop {

/// Structured view of one candidate branch, carried alongside the prompt
/// so deterministic deciders (oracle, scripted) can act without parsing
/// prose. The live LLM client ignores it.
struct CandidateInfo {
    std::string action_text;
    Condition condition;
    std::optional<std::string> tool;        // real tool bound by the node
    std::optional<std::string> dummy_tool;  // assigned in indistinguishable mode
};

struct DeciderRequest {
    std::string prompt;
    std::vector<ToolSpec> tools;  // filtered toolset, never empty
    BranchMode mode = BranchMode::Distinguishable;
    bool multi_select_allowed = false;
    std::vector<CandidateInfo> candidates;
};

struct Selection {
    std::string tool;
    ArgumentMap args;
};

/// `no_call` selects the unique tool-less candidate (legal only in
/// distinguishable mode when such a candidate exists) and implies an
/// empty selection list. Distinguishable mode allows at most one
/// selection.
struct DeciderResponse {
    std::vector<Selection> selections;
    bool no_call = false;
};

/// Raised by decider implementations on transport or protocol failure.
class DeciderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The contract all deciders satisfy: selections must name only tools
/// present in the request's toolset; the engine converts violations into
/// hallucinated-call run failures.
class Decider {
public:
    virtual ~Decider() = default;
    virtual DeciderResponse decide(const DeciderRequest& request) = 0;
};

}  // namespace sop
