#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sopgraph/decider.hpp"

namespace sop {

/// One scripted reply. An empty optional defers the query to the
/// fallback decider (when one is installed).
using ScriptStep = std::optional<DeciderResponse>;

/// Replays a fixed plan of responses, one per decide() call, optionally
/// deferring individual queries (or everything past the plan's end) to a
/// fallback decider. Plans can be keyed by run seed, which is how
/// single-fault fixtures inject a divergence on one seed only.
class ScriptedDecider : public Decider {
public:
    explicit ScriptedDecider(std::vector<ScriptStep> plan,
                             std::shared_ptr<Decider> fallback = nullptr)
        : plan_(std::move(plan)), fallback_(std::move(fallback)) {}

    DeciderResponse decide(const DeciderRequest& request) override;

private:
    std::vector<ScriptStep> plan_;
    std::shared_ptr<Decider> fallback_;
    std::size_t next_ = 0;
};

/// Parsed form of a script file:
///   {
///     "fallback": "oracle" | "none",
///     "default":  [ <step>... ],
///     "seeds":    { "7": [ <step>... ] }
///   }
/// where <step> is {"select": [{"tool": ..., "args": {...}}...]},
/// {"no_call": true} or {"defer": true}.
struct Script {
    bool oracle_fallback = false;
    std::vector<ScriptStep> default_plan;
    std::map<std::uint64_t, std::vector<ScriptStep>> seed_plans;

    const std::vector<ScriptStep>& plan_for(std::uint64_t seed) const;
};

Script parse_script(const std::string& json_text);
Script load_script_file(const std::string& path);

}  // namespace sop
