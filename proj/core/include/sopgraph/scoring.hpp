#pragma once

#include "sopgraph/ground_truth.hpp"
#include "sopgraph/trace.hpp"

namespace sop {

/// path_match: exact sequence equality with the ground-truth calls.
/// leaf_match: every leaf-position call of the ground truth appears in
/// the prediction. path_match implies leaf_match.
struct RunScore {
    bool path_match = false;
    bool leaf_match = false;
};

RunScore score_run(const Trajectory& predicted, const GroundTruth& truth);

}  // namespace sop
