#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sopgraph/values.hpp"

namespace sop {

/// Pre-sampled tool outputs: each registered tool owns an ordered queue
/// of observations consumed one per call.
struct Environment {
    std::map<std::string, std::deque<Observation>> outputs;

    bool has(const std::string& tool) const { return outputs.count(tool) != 0; }
};

/// Ordered record of (tool, observation) pairs produced while a run
/// executes. Shared between the environment-backed executor (writer) and
/// condition-evaluating deciders (readers).
class ObservationLog {
public:
    void append(std::string tool, Observation obs) {
        entries_.emplace_back(std::move(tool), std::move(obs));
    }

    /// Most recent observation produced by `tool`, if any.
    std::optional<Observation> latest(const std::string& tool) const {
        for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
            if (it->first == tool) return it->second;
        }
        return std::nullopt;
    }

    const std::vector<std::pair<std::string, Observation>>& entries() const { return entries_; }
    void clear() { entries_.clear(); }

private:
    std::vector<std::pair<std::string, Observation>> entries_;
};

/// Loads an environment file: JSON with a "tools" object whose entries
/// carry either an explicit "queue" of observations or an output
/// "schema" plus "seed" from which one observation is drawn uniformly.
Environment load_environment(const std::string& json_text);
Environment load_environment_file(const std::string& path);

std::string environment_to_json(const Environment& env);

}  // namespace sop
