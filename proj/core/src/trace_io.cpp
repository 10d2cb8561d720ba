#include "sopgraph/trace.hpp"

#include <sstream>

#include "json.hpp"

namespace sop {

namespace {

nlohmann::json value_to_json(const Value& v) {
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    if (const auto* d = std::get_if<double>(&v)) {
        if (*d == static_cast<double>(static_cast<long long>(*d))) {
            return static_cast<long long>(*d);
        }
        return *d;
    }
    return std::get<std::string>(v);
}

nlohmann::json map_to_json(const std::map<std::string, Value>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : m) j[k] = value_to_json(v);
    return j;
}

void append_ids(std::ostringstream& out, const std::vector<NodeId>& ids) {
    out << '[';
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out << ',';
        out << ids[i];
    }
    out << ']';
}

}  // namespace

std::string format_trace_event(const TraceEvent& event) {
    std::ostringstream out;
    out << "step=" << event.step;
    out << " node=" << event.node;
    out << " branch_mode=" << (event.branch_mode ? branch_mode_to_text(*event.branch_mode) : "none");
    out << " candidates=";
    append_ids(out, event.candidates);
    out << " chosen=";
    append_ids(out, event.chosen);
    if (event.call) {
        out << " call=" << event.call->tool;
        out << " args=" << map_to_json(event.call->args).dump();
    } else {
        out << " call=none";
    }
    if (event.observation) {
        out << " observation=" << map_to_json(*event.observation).dump();
    } else {
        out << " observation=none";
    }
    out << " queries_used=" << event.queries_used;
    return out.str();
}

std::string format_trace(const std::vector<TraceEvent>& events) {
    std::string out;
    for (const TraceEvent& e : events) {
        out += format_trace_event(e);
        out += '\n';
    }
    return out;
}

}  // namespace sop
