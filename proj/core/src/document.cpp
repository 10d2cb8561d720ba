#include "sopgraph/document.hpp"

namespace sop {

std::string comparator_to_text(Comparator c) {
    switch (c) {
        case Comparator::Is: return "is";
        case Comparator::IsNot: return "is_not";
        case Comparator::Gt: return "gt";
        case Comparator::Ge: return "ge";
        case Comparator::Lt: return "lt";
        case Comparator::Le: return "le";
    }
    return "is";
}

std::optional<Comparator> comparator_from_text(const std::string& text) {
    if (text == "is") return Comparator::Is;
    if (text == "is_not") return Comparator::IsNot;
    if (text == "gt") return Comparator::Gt;
    if (text == "ge") return Comparator::Ge;
    if (text == "lt") return Comparator::Lt;
    if (text == "le") return Comparator::Le;
    return std::nullopt;
}

std::string Condition::display() const {
    if (is_always()) return "always";
    if (const auto* t = textual_body()) return "if " + t->text;
    const auto& s = *structured();
    std::string value = canonical_text(s.value);
    if (std::holds_alternative<std::string>(s.value)) value = "\"" + value + "\"";
    return s.variable + " of " + s.api + " " + comparator_to_text(s.comparator) + " " + value;
}

bool NodeSpec::operator==(const NodeSpec& other) const {
    // source_line is provenance, not structure
    return action_text == other.action_text && condition == other.condition && tool == other.tool &&
           description == other.description && label == other.label &&
           goto_labels == other.goto_labels && children == other.children;
}

bool SopDocument::operator==(const SopDocument& other) const {
    return roots == other.roots;  // source_name is provenance
}

std::string severity_to_text(Severity s) {
    return s == Severity::Error ? "error" : "warning";
}

}  // namespace sop
