#include "sopgraph/validator.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>

namespace sop {

namespace {

struct Walker {
    std::vector<Diagnostic> diags;
    std::map<std::string, std::string> label_paths;  // label -> first defining node path
    std::set<std::string> bound_tools;

    void add(Severity severity, std::string code, std::string path, std::string message) {
        diags.push_back(Diagnostic{severity, std::move(code), std::move(path), std::move(message)});
    }

    void collect(const NodeSpec& node, const std::string& path) {
        if (node.tool) bound_tools.insert(node.tool->name);
        if (node.label) {
            auto [it, inserted] = label_paths.emplace(*node.label, path);
            if (!inserted) {
                add(Severity::Error, "duplicate-label", path,
                    "label '" + *node.label + "' already defined at node " + it->second);
            }
        }
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            collect(node.children[i], path + "." + std::to_string(i));
        }
    }

    void check(const NodeSpec& node, const std::string& path) {
        if (trim(node.action_text).empty()) {
            add(Severity::Error, "empty-action-text", path, "node has empty action text");
        }
        std::set<std::string> seen_targets;
        for (const std::string& target : node.goto_labels) {
            if (!seen_targets.insert(target).second) {
                add(Severity::Error, "duplicate-goto-target", path,
                    "goto target '" + target + "' listed twice");
            }
            if (!label_paths.count(target)) {
                add(Severity::Error, "unresolved-label", path,
                    "goto target '" + target + "' does not name any label in the document");
            }
        }
        if (const auto* t = node.condition.textual_body()) {
            if (trim(t->text).empty()) {
                add(Severity::Error, "empty-textual-condition", path, "textual condition has no body");
            }
        }
        if (const auto* s = node.condition.structured()) {
            if (!bound_tools.count(s->api)) {
                add(Severity::Error, "unknown-condition-tool", path,
                    "structured condition references tool '" + s->api +
                        "' which is not bound as an API anywhere in the document");
            }
            if (trim(s->variable).empty()) {
                add(Severity::Error, "empty-condition-variable", path,
                    "structured condition has an empty variable name");
            }
        }
        if (node.tool && node.tool->output_schema &&
            node.tool->output_schema->kind == OutputSchema::Kind::Categorical &&
            node.tool->output_schema->candidates.empty()) {
            add(Severity::Error, "empty-candidate-list", path,
                "categorical output schema for '" + node.tool->name + "' has no candidates");
        }
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            check(node.children[i], path + "." + std::to_string(i));
        }
    }
};

}  // namespace

std::vector<Diagnostic> validate(const SopDocument& doc) {
    Walker walker;
    if (doc.roots.empty()) {
        walker.add(Severity::Error, "no-roots", "", "document has no root nodes");
        return walker.diags;
    }
    for (std::size_t i = 0; i < doc.roots.size(); ++i) {
        walker.collect(doc.roots[i], std::to_string(i));
    }
    for (std::size_t i = 0; i < doc.roots.size(); ++i) {
        walker.check(doc.roots[i], std::to_string(i));
    }
    return walker.diags;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    for (const Diagnostic& d : diagnostics) {
        if (d.severity == Severity::Error) return true;
    }
    return false;
}

}  // namespace sop
