#include "sopgraph/oracle.hpp"

#include "sopgraph/condition_eval.hpp"

namespace sop {

DeciderResponse OracleDecider::decide(const DeciderRequest& request) {
    DeciderResponse response;

    if (request.mode == BranchMode::Distinguishable) {
        for (const CandidateInfo& candidate : request.candidates) {
            if (!eval_condition(candidate.condition, *log_)) continue;
            if (candidate.tool) {
                response.selections.push_back(Selection{*candidate.tool, {}});
            } else {
                response.no_call = true;
            }
            return response;  // first true candidate wins
        }
        return response;  // nothing applies; the engine reports NoBranchSelected
    }

    for (const CandidateInfo& candidate : request.candidates) {
        if (!eval_condition(candidate.condition, *log_)) continue;
        const auto& name = candidate.dummy_tool ? candidate.dummy_tool : candidate.tool;
        if (name) response.selections.push_back(Selection{*name, {}});
    }
    return response;
}

std::unique_ptr<Decider> make_oracle_decider(std::shared_ptr<const ObservationLog> log) {
    return std::make_unique<OracleDecider>(std::move(log));
}

}  // namespace sop
