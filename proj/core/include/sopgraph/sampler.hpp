#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sopgraph/case_spec.hpp"
#include "sopgraph/environment.hpp"
#include "sopgraph/graph.hpp"

namespace sop {

/// Deterministic counter-based generator: the stream depends only on the
/// seed material, never on iteration order or platform library details.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    /// Uniform in [0, 1).
    double next_unit();

    /// Uniform index weighted by non-negative weights (sum > 0).
    std::size_t next_weighted(const std::vector<double>& weights);

private:
    std::uint64_t state_;
};

std::uint64_t mix_seed(std::uint64_t seed, const std::string& tag);

struct SamplerWarning {
    std::string tool;
    std::string message;
};

/// Draws one observation per declared tool, leaf-weighted as the
/// benchmark requires: values guarding condition branches are chosen
/// with probability proportional to the leaf count of the subtree each
/// value unlocks, unguarded values share unit weight, and numerical
/// outputs draw from a range straddling the comparison thresholds with
/// leaf-proportional mass on each side. The draw is a pure function of
/// (case, seed).
Environment sample_environment(const CaseSpec& spec,
                               const DecisionGraph& graph,
                               std::uint64_t seed,
                               std::vector<SamplerWarning>* warnings = nullptr);

}  // namespace sop
