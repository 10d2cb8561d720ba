#include "sopgraph/condition_eval.hpp"

#include "sopgraph/values.hpp"

namespace sop {

bool eval_condition(const Condition& condition, const ObservationLog& history) {
    if (condition.is_always()) return true;
    if (condition.is_textual()) {
        throw EvalError(EvalErrorKind::TextualNotEvaluable,
                        "textual condition '" + condition.textual_body()->text +
                            "' cannot be evaluated against observations");
    }

    const StructuredCondition& cond = *condition.structured();
    const auto obs = history.latest(cond.api);
    if (!obs) {
        throw EvalError(EvalErrorKind::MissingObservation,
                        "no observation recorded for tool '" + cond.api + "'");
    }
    const auto var = obs->find(cond.variable);
    if (var == obs->end()) {
        throw EvalError(EvalErrorKind::MissingObservation,
                        "observation of '" + cond.api + "' has no variable '" + cond.variable + "'");
    }
    const Value& observed = var->second;

    switch (cond.comparator) {
        case Comparator::Is:
            return canonical_text(observed) == canonical_text(cond.value);
        case Comparator::IsNot:
            return canonical_text(observed) != canonical_text(cond.value);
        default:
            break;
    }

    const auto lhs = value_as_number(observed);
    const auto rhs = value_as_number(cond.value);
    if (!lhs || !rhs) {
        throw EvalError(EvalErrorKind::TypeMismatch,
                        "numeric comparator '" + comparator_to_text(cond.comparator) +
                            "' applied to non-numeric value for variable '" + cond.variable + "'");
    }
    switch (cond.comparator) {
        case Comparator::Gt: return *lhs > *rhs;
        case Comparator::Ge: return *lhs >= *rhs;
        case Comparator::Lt: return *lhs < *rhs;
        case Comparator::Le: return *lhs <= *rhs;
        default: return false;  // unreachable
    }
}

}  // namespace sop
