#include "sopgraph/serializer.hpp"

#include <sstream>

#include "json.hpp"

namespace sop {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string indent_of(int depth) { return std::string(static_cast<std::size_t>(depth) * 4, ' '); }

ordered_json value_to_json(const Value& v) {
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    if (const auto* d = std::get_if<double>(&v)) {
        if (*d == static_cast<double>(static_cast<long long>(*d))) {
            return static_cast<long long>(*d);
        }
        return *d;
    }
    return std::get<std::string>(v);
}

std::string condition_line(const Condition& condition) {
    if (condition.is_always()) return "condition: \"always\"";
    if (condition.is_textual()) return "condition_type: if";
    const auto& s = *condition.structured();
    ordered_json j;
    j["API"] = s.api;
    j["variable"] = s.variable;
    j["condition_type"] = comparator_to_text(s.comparator);
    j["value"] = value_to_json(s.value);
    return "condition: " + j.dump();
}

std::string api_line(const ToolSpec& tool) {
    if (tool.description.empty()) return "API: " + tool.name;
    ordered_json j;
    j["name"] = tool.name;
    j["description"] = tool.description;
    return "API: " + j.dump();
}

void emit_node(std::ostringstream& out, const NodeSpec& node, int depth) {
    const std::string item_pad = indent_of(depth);
    const std::string field_pad = indent_of(depth + 1);

    out << item_pad << "- " << node.action_text << ":\n";
    out << field_pad << condition_line(node.condition) << "\n";
    if (node.tool) out << field_pad << api_line(*node.tool) << "\n";
    if (node.description) out << field_pad << "Description: " << *node.description << "\n";
    if (node.label) out << field_pad << "label: " << *node.label << "\n";
    if (!node.goto_labels.empty()) {
        out << field_pad << "goto: ";
        for (std::size_t i = 0; i < node.goto_labels.size(); ++i) {
            if (i) out << ", ";
            out << node.goto_labels[i];
        }
        out << "\n";
    }
    if (!node.children.empty()) {
        out << field_pad << "Instructions:\n";
        for (const NodeSpec& child : node.children) emit_node(out, child, depth + 1);
    }
}

}  // namespace

std::string serialize_node(const NodeSpec& node, int depth) {
    std::ostringstream out;
    emit_node(out, node, depth);
    return out.str();
}

std::string serialize(const SopDocument& doc) {
    std::ostringstream out;
    for (const NodeSpec& root : doc.roots) emit_node(out, root, 0);
    return out.str();
}

}  // namespace sop
