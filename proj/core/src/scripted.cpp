#include "sopgraph/scripted.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "json_conv.hpp"

namespace sop {

namespace {

using nlohmann::json;

ScriptStep step_from_json(const json& j) {
    if (!j.is_object()) throw std::runtime_error("script step must be a mapping");
    if (j.value("defer", false)) return std::nullopt;

    DeciderResponse response;
    response.no_call = j.value("no_call", false);
    if (j.contains("select")) {
        for (const auto& sel : j.at("select")) {
            Selection selection;
            selection.tool = sel.at("tool").get<std::string>();
            if (sel.contains("args")) {
                for (const auto& [k, v] : sel.at("args").items()) {
                    selection.args[k] = detail::json_to_value(v);
                }
            }
            response.selections.push_back(std::move(selection));
        }
    }
    if (response.no_call && !response.selections.empty()) {
        throw std::runtime_error("script step cannot both select and answer no_call");
    }
    return response;
}

std::vector<ScriptStep> plan_from_json(const json& j) {
    if (!j.is_array()) throw std::runtime_error("script plan must be an array of steps");
    std::vector<ScriptStep> plan;
    for (const auto& step : j) plan.push_back(step_from_json(step));
    return plan;
}

}  // namespace

DeciderResponse ScriptedDecider::decide(const DeciderRequest& request) {
    const bool in_plan = next_ < plan_.size();
    ScriptStep scripted = in_plan ? plan_[next_] : ScriptStep{};
    if (in_plan) ++next_;

    if (scripted) return *scripted;
    if (fallback_) return fallback_->decide(request);
    throw DeciderError(in_plan ? "scripted step deferred but no fallback is installed"
                               : "scripted plan exhausted after " + std::to_string(plan_.size()) +
                                     " queries and no fallback is installed");
}

const std::vector<ScriptStep>& Script::plan_for(std::uint64_t seed) const {
    auto it = seed_plans.find(seed);
    if (it != seed_plans.end()) return it->second;
    return default_plan;
}

Script parse_script(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed script file: ") + e.what());
    }

    Script script;
    if (j.is_array()) {  // shorthand: a bare plan
        script.default_plan = plan_from_json(j);
        return script;
    }
    if (!j.is_object()) throw std::runtime_error("script file must be a mapping or an array");

    const std::string fallback = j.value("fallback", std::string("none"));
    if (fallback == "oracle") {
        script.oracle_fallback = true;
    } else if (fallback != "none") {
        throw std::runtime_error("script fallback must be 'oracle' or 'none'");
    }
    if (j.contains("default")) script.default_plan = plan_from_json(j.at("default"));
    if (j.contains("seeds")) {
        for (const auto& [key, plan] : j.at("seeds").items()) {
            script.seed_plans[std::stoull(key)] = plan_from_json(plan);
        }
    }
    return script;
}

Script load_script_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open script file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_script(buf.str());
}

}  // namespace sop
