#include "sopgraph/llm_client.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "json_conv.hpp"

namespace sop {

namespace {

using nlohmann::json;

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw TransportError("endpoint URL must include a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return ParsedUrl{url, "/"};
    return ParsedUrl{url.substr(0, path_start), url.substr(path_start)};
}

const char* param_type_name(ParamType type) {
    switch (type) {
        case ParamType::Text: return "string";
        case ParamType::Bool: return "boolean";
        case ParamType::Number: return "number";
    }
    return "string";
}

json tool_schema(const ToolSpec& tool) {
    json properties = json::object();
    json required = json::array();
    for (const ParamSpec& param : tool.params) {
        properties[param.name] = json{{"type", param_type_name(param.type)},
                                      {"description", param.description}};
        required.push_back(param.name);
    }
    return json{{"type", "function"},
                {"function",
                 json{{"name", tool.name},
                      {"description", tool.description},
                      {"parameters", json{{"type", "object"},
                                          {"properties", properties},
                                          {"required", required}}}}}};
}

ArgumentMap parse_arguments(const json& call, const DeciderRequest& request,
                            const std::string& tool_name) {
    ArgumentMap args;
    if (!call.contains("arguments")) return args;

    json parsed;
    if (call["arguments"].is_string()) {
        const std::string raw = call["arguments"].get<std::string>();
        if (raw.empty()) return args;
        try {
            parsed = json::parse(raw);
        } catch (const json::exception& e) {
            throw DeciderError("tool call arguments are not valid JSON: " + std::string(e.what()));
        }
    } else {
        parsed = call["arguments"];
    }
    if (parsed.is_null()) return args;
    if (!parsed.is_object()) throw DeciderError("tool call arguments must be a JSON object");

    const ToolSpec* spec = nullptr;
    for (const ToolSpec& t : request.tools) {
        if (t.name == tool_name) spec = &t;
    }
    for (const auto& [key, value] : parsed.items()) {
        args[key] = detail::json_to_value(value);
        if (spec && !spec->params.empty()) {
            const bool declared = std::any_of(spec->params.begin(), spec->params.end(),
                                              [&](const ParamSpec& p) { return p.name == key; });
            if (!declared) {
                throw DeciderError("tool call names undeclared parameter '" + key + "' of '" +
                                   tool_name + "'");
            }
        }
    }
    return args;
}

}  // namespace

LlmDecider::LlmDecider(LlmConfig config) : config_(std::move(config)) {
    if (config_.endpoint.empty()) throw TransportError("LLM endpoint is not configured");
    if (config_.auth_token.empty()) throw TransportError("LLM auth token is not configured");
}

std::string LlmDecider::render_request_body(const LlmConfig& config, const DeciderRequest& request) {
    json tools = json::array();
    for (const ToolSpec& tool : request.tools) tools.push_back(tool_schema(tool));

    json body{{"model", config.model},
              {"temperature", config.temperature},
              {"messages", json::array({json{{"role", "user"}, {"content", request.prompt}}})},
              {"tools", tools},
              {"tool_choice", "auto"}};
    if (request.multi_select_allowed) body["parallel_tool_calls"] = true;
    return body.dump();
}

DeciderResponse LlmDecider::parse_response_body(const std::string& body,
                                                const DeciderRequest& request) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::exception& e) {
        throw DeciderError("malformed completion response: " + std::string(e.what()));
    }
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
        throw DeciderError("completion response has no choices");
    }
    const json& message = j["choices"][0].value("message", json::object());

    DeciderResponse response;
    if (!message.contains("tool_calls") || message["tool_calls"].empty()) {
        response.no_call = true;
        return response;
    }
    for (const json& call : message["tool_calls"]) {
        if (!call.contains("function")) continue;
        const json& fn = call["function"];
        Selection selection;
        selection.tool = fn.value("name", std::string());
        if (selection.tool.empty()) throw DeciderError("tool call has no function name");
        selection.args = parse_arguments(fn, request, selection.tool);
        response.selections.push_back(std::move(selection));
    }
    if (response.selections.empty()) response.no_call = true;
    return response;
}

DeciderResponse LlmDecider::decide(const DeciderRequest& request) {
    const ParsedUrl url = split_url(config_.endpoint);
    const std::string body = render_request_body(config_, request);

    httplib::Client client(url.base);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);
    client.set_default_headers({{"Authorization", "Bearer " + config_.auth_token}});

    const int attempts_allowed = std::max(config_.retry.max_attempts, 1);
    std::string last_error;
    for (int attempt = 1; attempt <= attempts_allowed; ++attempt) {
        auto result = client.Post(url.path, body, "application/json");
        if (result) {
            if (result->status == 200) return parse_response_body(result->body, request);
            last_error = "HTTP " + std::to_string(result->status);
            const bool retryable = result->status == 429 || result->status >= 500;
            if (!retryable) break;
        } else {
            last_error = httplib::to_string(result.error());
        }
        if (attempt < attempts_allowed && config_.retry.backoff_base_seconds > 0.0) {
            const double seconds =
                config_.retry.backoff_base_seconds * static_cast<double>(1 << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
        }
    }
    throw TransportError("LLM request to " + config_.endpoint + " failed: " + last_error);
}

}  // namespace sop
