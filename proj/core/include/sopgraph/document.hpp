#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sopgraph/values.hpp"

namespace sop {

enum class Comparator { Is, IsNot, Gt, Ge, Lt, Le };

std::string comparator_to_text(Comparator c);
std::optional<Comparator> comparator_from_text(const std::string& text);

/// Predicate over the latest output of a named tool, e.g.
/// {"API": "authenticate_customer", "variable": "authentication_status",
///  "condition_type": "is", "value": "failed"}.
struct StructuredCondition {
    std::string api;
    std::string variable;
    Comparator comparator = Comparator::Is;
    Value value;

    bool operator==(const StructuredCondition&) const = default;
};

/// Edge guard. Either unconditional, a free-text predicate (the node key
/// text when the source used `condition_type: if`), or a structured
/// predicate over a tool output.
class Condition {
public:
    struct Always {
        bool operator==(const Always&) const = default;
    };
    struct Textual {
        std::string text;
        bool operator==(const Textual&) const = default;
    };

    Condition() : v_(Always{}) {}
    Condition(Always a) : v_(a) {}
    Condition(Textual t) : v_(std::move(t)) {}
    Condition(StructuredCondition s) : v_(std::move(s)) {}

    static Condition always() { return Condition(Always{}); }
    static Condition textual(std::string text) { return Condition(Textual{std::move(text)}); }

    bool is_always() const { return std::holds_alternative<Always>(v_); }
    bool is_textual() const { return std::holds_alternative<Textual>(v_); }
    bool is_structured() const { return std::holds_alternative<StructuredCondition>(v_); }

    const Textual* textual_body() const { return std::get_if<Textual>(&v_); }
    const StructuredCondition* structured() const { return std::get_if<StructuredCondition>(&v_); }

    /// Human-readable form used in prompts and diagnostics.
    std::string display() const;

    bool operator==(const Condition&) const = default;

private:
    std::variant<Always, Textual, StructuredCondition> v_;
};

enum class ParamType { Text, Bool, Number };

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::Text;
    std::string description;

    bool operator==(const ParamSpec&) const = default;
};

/// Declared shape of a tool's output, used by the benchmark simulator.
struct OutputSchema {
    enum class Kind { Categorical, Boolean, Numerical, Freeform };

    Kind kind = Kind::Freeform;
    std::vector<std::string> candidates;              // Categorical
    std::optional<std::pair<double, double>> range;   // Numerical, closed interval

    bool operator==(const OutputSchema&) const = default;
};

struct ToolSpec {
    std::string name;
    std::string description;
    std::vector<ParamSpec> params;
    std::optional<OutputSchema> output_schema;

    bool operator==(const ToolSpec&) const = default;
};

/// One parsed SOP node: the list-item key is the action text, fields
/// supply the condition, the optional tool binding, label and jumps.
struct NodeSpec {
    std::string action_text;
    Condition condition;
    std::optional<ToolSpec> tool;
    std::optional<std::string> description;
    std::optional<std::string> label;
    std::vector<std::string> goto_labels;
    std::vector<NodeSpec> children;
    int source_line = 0;  // 1-based line of the item key, 0 for synthetic nodes

    bool has_children() const { return !children.empty(); }

    bool operator==(const NodeSpec& other) const;
};

struct SopDocument {
    std::vector<NodeSpec> roots;
    std::string source_name;

    bool operator==(const SopDocument& other) const;
};

enum class Severity { Error, Warning };

/// Validation finding. `code` is a stable machine-readable identifier
/// such as "unresolved-label"; `node_path` is a dotted child-index path
/// from the root list ("0.1.2").
struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string node_path;
    std::string message;
};

std::string severity_to_text(Severity s);

}  // namespace sop
