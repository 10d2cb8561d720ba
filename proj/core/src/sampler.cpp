#include "sopgraph/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace sop {

std::uint64_t SplitMix64::next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::size_t SplitMix64::next_weighted(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double mark = next_unit() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        mark -= weights[i];
        if (mark < 0.0) return i;
    }
    return weights.size() - 1;
}

std::uint64_t mix_seed(std::uint64_t seed, const std::string& tag) {
    // FNV-1a over the tag, folded into the seed
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : tag) {
        hash ^= c;
        hash *= 0x00000100000001b3ULL;
    }
    return seed ^ hash;
}

namespace {

struct Guard {
    const StructuredCondition* condition;
    int leaves;
};

void warn(std::vector<SamplerWarning>* warnings, const std::string& tool, std::string message) {
    if (warnings) warnings->push_back(SamplerWarning{tool, std::move(message)});
}

/// Guards on a given tool, grouped by the variable they inspect, each
/// weighted by the leaf count of the node it unlocks.
std::map<std::string, std::vector<Guard>> collect_guards(const DecisionGraph& graph,
                                                         const std::string& tool) {
    std::map<std::string, std::vector<Guard>> by_variable;
    for (const DecisionNode& node : graph.nodes()) {
        const auto* s = node.condition.structured();
        if (!s || s->api != tool) continue;
        by_variable[s->variable].push_back(Guard{s, graph.leaf_count_below(node.id)});
    }
    return by_variable;
}

Value sample_categorical(const OutputSchema& schema, const std::vector<Guard>& guards,
                         SplitMix64& rng, const std::string& tool,
                         std::vector<SamplerWarning>* warnings) {
    std::vector<double> weights(schema.candidates.size(), 0.0);
    std::vector<bool> claimed(schema.candidates.size(), false);

    for (const Guard& guard : guards) {
        const std::string target = canonical_text(guard.condition->value);
        if (guard.condition->comparator == Comparator::Is) {
            bool matched = false;
            for (std::size_t i = 0; i < schema.candidates.size(); ++i) {
                if (schema.candidates[i] == target) {
                    weights[i] += guard.leaves;
                    claimed[i] = true;
                    matched = true;
                }
            }
            if (!matched) {
                warn(warnings, tool, "condition value '" + target + "' is not a declared candidate");
            }
        } else if (guard.condition->comparator == Comparator::IsNot) {
            // the complement shares the branch's leaves evenly
            std::vector<std::size_t> others;
            for (std::size_t i = 0; i < schema.candidates.size(); ++i) {
                if (schema.candidates[i] != target) others.push_back(i);
            }
            for (std::size_t i : others) {
                weights[i] += static_cast<double>(guard.leaves) / static_cast<double>(others.size());
                claimed[i] = true;
            }
        } else {
            warn(warnings, tool, "ordering comparator on a categorical output is ignored");
        }
    }

    for (std::size_t i = 0; i < schema.candidates.size(); ++i) {
        if (!claimed[i]) {
            weights[i] = 1.0;
            if (!guards.empty()) {
                warn(warnings, tool,
                     "candidate value '" + schema.candidates[i] + "' matches no branch condition");
            }
        }
    }
    return schema.candidates[rng.next_weighted(weights)];
}

Value sample_boolean(const std::vector<Guard>& guards, SplitMix64& rng, const std::string& tool,
                     std::vector<SamplerWarning>* warnings) {
    double weights[2] = {0.0, 0.0};  // [false, true]
    bool claimed[2] = {false, false};

    for (const Guard& guard : guards) {
        const std::string target = canonical_text(guard.condition->value);
        if (target != "true" && target != "false") {
            warn(warnings, tool, "boolean condition value '" + target + "' is not true/false");
            continue;
        }
        bool wants_true = target == "true";
        if (guard.condition->comparator == Comparator::IsNot) {
            wants_true = !wants_true;
        } else if (guard.condition->comparator != Comparator::Is) {
            warn(warnings, tool, "ordering comparator on a boolean output is ignored");
            continue;
        }
        weights[wants_true ? 1 : 0] += guard.leaves;
        claimed[wants_true ? 1 : 0] = true;
    }
    for (int side = 0; side < 2; ++side) {
        if (!claimed[side]) {
            weights[side] = 1.0;
            if (!guards.empty()) {
                warn(warnings, tool,
                     std::string("boolean value ") + (side ? "true" : "false") +
                         " matches no branch condition");
            }
        }
    }
    const double total = weights[0] + weights[1];
    return rng.next_unit() * total >= weights[0];
}

Value sample_numerical(const OutputSchema& schema, const std::vector<Guard>& guards,
                       SplitMix64& rng, const std::string& tool,
                       std::vector<SamplerWarning>* warnings) {
    std::vector<double> thresholds;
    std::vector<const Guard*> interval_guards;
    for (const Guard& guard : guards) {
        const auto threshold = value_as_number(guard.condition->value);
        if (!threshold) {
            warn(warnings, tool, "numeric condition value does not parse as a number");
            continue;
        }
        switch (guard.condition->comparator) {
            case Comparator::Gt:
            case Comparator::Ge:
            case Comparator::Lt:
            case Comparator::Le:
                thresholds.push_back(*threshold);
                interval_guards.push_back(&guard);
                break;
            default:
                warn(warnings, tool, "equality comparator on a numerical output is ignored");
                break;
        }
    }

    if (interval_guards.empty()) {
        const auto [lo, hi] = schema.range.value_or(std::make_pair(0.0, 1.0));
        return lo + rng.next_unit() * (hi - lo);
    }

    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    // the sampling range straddles every threshold
    double lo, hi;
    if (schema.range) {
        lo = schema.range->first;
        hi = schema.range->second;
    } else {
        const double vmin = thresholds.front();
        const double vmax = thresholds.back();
        lo = vmin - std::max(1.0, std::fabs(vmin));
        hi = vmax + std::max(1.0, std::fabs(vmax));
    }

    std::vector<std::pair<double, double>> intervals;
    double cursor = lo;
    for (double t : thresholds) {
        if (t > cursor && t <= hi) {
            intervals.emplace_back(cursor, t);
            cursor = t;
        }
    }
    if (cursor < hi) intervals.emplace_back(cursor, hi);
    if (intervals.empty()) intervals.emplace_back(lo, hi);

    std::vector<double> weights;
    for (const auto& [a, b] : intervals) {
        const double mid = (a + b) / 2.0;
        double weight = 0.0;
        int true_guards = 0;
        for (const Guard* guard : interval_guards) {
            const double threshold = *value_as_number(guard->condition->value);
            bool holds = false;
            switch (guard->condition->comparator) {
                case Comparator::Gt: holds = mid > threshold; break;
                case Comparator::Ge: holds = mid >= threshold; break;
                case Comparator::Lt: holds = mid < threshold; break;
                case Comparator::Le: holds = mid <= threshold; break;
                default: break;
            }
            if (holds) {
                ++true_guards;
                if (true_guards == 1) weight = guard->leaves;
            }
        }
        if (true_guards == 0) {
            weight = 1.0;
            warn(warnings, tool, "part of the sampling range matches no branch condition");
        } else if (true_guards > 1) {
            warn(warnings, tool, "overlapping numeric conditions; first-listed branch weight used");
        }
        weights.push_back(weight);
    }

    const std::size_t pick = rng.next_weighted(weights);
    const auto [a, b] = intervals[pick];
    // inset from both ends so strict and non-strict comparators alike
    // land inside the intended branch
    return a + (0.01 + 0.98 * rng.next_unit()) * (b - a);
}

}  // namespace

Environment sample_environment(const CaseSpec& spec,
                               const DecisionGraph& graph,
                               std::uint64_t seed,
                               std::vector<SamplerWarning>* warnings) {
    Environment env;
    for (const ToolOutputSpec& output : spec.tool_outputs) {
        SplitMix64 rng(mix_seed(seed, output.tool));
        const auto by_variable = collect_guards(graph, output.tool);

        Observation obs;
        if (by_variable.empty()) {
            const std::string variable = output.variable.value_or("value");
            switch (output.schema.kind) {
                case OutputSchema::Kind::Categorical:
                    obs[variable] = sample_categorical(output.schema, {}, rng, output.tool, warnings);
                    break;
                case OutputSchema::Kind::Boolean:
                    obs[variable] = rng.next_unit() >= 0.5;
                    break;
                case OutputSchema::Kind::Numerical:
                    obs[variable] = sample_numerical(output.schema, {}, rng, output.tool, warnings);
                    break;
                case OutputSchema::Kind::Freeform:
                    obs[variable] = std::string("ok");
                    break;
            }
        } else {
            for (const auto& [variable, guards] : by_variable) {
                switch (output.schema.kind) {
                    case OutputSchema::Kind::Categorical:
                        obs[variable] =
                            sample_categorical(output.schema, guards, rng, output.tool, warnings);
                        break;
                    case OutputSchema::Kind::Boolean:
                        obs[variable] = sample_boolean(guards, rng, output.tool, warnings);
                        break;
                    case OutputSchema::Kind::Numerical:
                        obs[variable] =
                            sample_numerical(output.schema, guards, rng, output.tool, warnings);
                        break;
                    case OutputSchema::Kind::Freeform:
                        obs[variable] = std::string("ok");
                        break;
                }
            }
        }
        env.outputs[output.tool].push_back(std::move(obs));
    }
    return env;
}

}  // namespace sop
