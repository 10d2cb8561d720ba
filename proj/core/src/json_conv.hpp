#pragma once

// Internal helpers between nlohmann JSON and the scalar Value model.

#include <stdexcept>

#include "json.hpp"

#include "sopgraph/values.hpp"

namespace sop::detail {

template <typename Json>
Value json_to_value(const Json& j) {
    if (j.is_boolean()) return j.template get<bool>();
    if (j.is_number()) return j.template get<double>();
    if (j.is_string()) return j.template get<std::string>();
    throw std::runtime_error("expected a scalar (text, boolean or number), got " +
                             std::string(j.type_name()));
}

template <typename Json>
Json value_to_json(const Value& v) {
    if (const auto* b = std::get_if<bool>(&v)) return Json(*b);
    if (const auto* d = std::get_if<double>(&v)) {
        if (*d == static_cast<double>(static_cast<long long>(*d))) {
            return Json(static_cast<long long>(*d));
        }
        return Json(*d);
    }
    return Json(std::get<std::string>(v));
}

template <typename Json>
Observation json_to_observation(const Json& j) {
    if (!j.is_object()) throw std::runtime_error("observation must be a mapping");
    Observation obs;
    for (const auto& [key, value] : j.items()) obs[key] = json_to_value(value);
    return obs;
}

template <typename Json>
Json observation_to_json(const Observation& obs) {
    Json j = Json::object();
    for (const auto& [key, value] : obs) j[key] = value_to_json<Json>(value);
    return j;
}

}  // namespace sop::detail
