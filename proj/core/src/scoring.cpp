#include "sopgraph/scoring.hpp"

#include <algorithm>

namespace sop {

RunScore score_run(const Trajectory& predicted, const GroundTruth& truth) {
    RunScore score;
    score.path_match = predicted == truth.calls;
    score.leaf_match = std::all_of(
        truth.leaf_calls.begin(), truth.leaf_calls.end(), [&](const std::string& leaf_call) {
            return std::find(predicted.begin(), predicted.end(), leaf_call) != predicted.end();
        });
    return score;
}

}  // namespace sop
