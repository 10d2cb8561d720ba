#include "sopgraph/environment.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "json_conv.hpp"
#include "sopgraph/sampler.hpp"

namespace sop {

namespace {

using nlohmann::json;

OutputSchema schema_from_json(const json& j) {
    OutputSchema schema;
    const std::string type = j.at("type").get<std::string>();
    if (type == "categorical") {
        schema.kind = OutputSchema::Kind::Categorical;
        for (const auto& c : j.at("candidates")) schema.candidates.push_back(c.get<std::string>());
        if (schema.candidates.empty()) {
            throw std::runtime_error("categorical schema needs at least one candidate");
        }
    } else if (type == "boolean") {
        schema.kind = OutputSchema::Kind::Boolean;
    } else if (type == "numerical") {
        schema.kind = OutputSchema::Kind::Numerical;
        if (j.contains("range")) {
            const auto& r = j.at("range");
            schema.range = std::make_pair(r.at(0).get<double>(), r.at(1).get<double>());
        }
    } else if (type == "freeform") {
        schema.kind = OutputSchema::Kind::Freeform;
    } else {
        throw std::runtime_error("unknown output schema type '" + type + "'");
    }
    return schema;
}

Observation draw_uniform(const OutputSchema& schema, const std::string& variable, SplitMix64& rng) {
    Observation obs;
    switch (schema.kind) {
        case OutputSchema::Kind::Categorical: {
            const std::size_t i =
                static_cast<std::size_t>(rng.next_unit() * static_cast<double>(schema.candidates.size()));
            obs[variable] = schema.candidates[std::min(i, schema.candidates.size() - 1)];
            break;
        }
        case OutputSchema::Kind::Boolean:
            obs[variable] = rng.next_unit() < 0.5;
            break;
        case OutputSchema::Kind::Numerical: {
            const auto [lo, hi] = schema.range.value_or(std::make_pair(0.0, 1.0));
            obs[variable] = lo + rng.next_unit() * (hi - lo);
            break;
        }
        case OutputSchema::Kind::Freeform:
            obs[variable] = std::string("ok");
            break;
    }
    return obs;
}

}  // namespace

Environment load_environment(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed environment file: ") + e.what());
    }
    if (!j.is_object() || !j.contains("tools") || !j["tools"].is_object()) {
        throw std::runtime_error("environment file must be an object with a 'tools' mapping");
    }

    Environment env;
    for (const auto& [tool, entry] : j["tools"].items()) {
        std::deque<Observation>& queue = env.outputs[tool];
        if (entry.contains("queue")) {
            for (const auto& record : entry.at("queue")) {
                queue.push_back(detail::json_to_observation(record));
            }
        } else if (entry.contains("schema")) {
            const OutputSchema schema = schema_from_json(entry.at("schema"));
            const std::uint64_t seed = entry.value("seed", 0ULL);
            const std::string variable = entry.value("variable", std::string("value"));
            SplitMix64 rng(mix_seed(seed, tool));
            queue.push_back(draw_uniform(schema, variable, rng));
        } else {
            throw std::runtime_error("environment entry for '" + tool +
                                     "' needs either 'queue' or 'schema'");
        }
    }
    return env;
}

Environment load_environment_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open environment file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_environment(buf.str());
}

std::string environment_to_json(const Environment& env) {
    json tools = json::object();
    for (const auto& [tool, queue] : env.outputs) {
        json records = json::array();
        for (const Observation& obs : queue) {
            records.push_back(detail::observation_to_json<json>(obs));
        }
        tools[tool] = json{{"queue", records}};
    }
    return json{{"tools", tools}}.dump(2);
}

}  // namespace sop
