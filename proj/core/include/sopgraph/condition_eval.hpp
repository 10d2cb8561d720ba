#pragma once

#include <stdexcept>
#include <string>

#include "sopgraph/document.hpp"
#include "sopgraph/environment.hpp"

namespace sop {

enum class EvalErrorKind { MissingObservation, TypeMismatch, TextualNotEvaluable };

class EvalError : public std::runtime_error {
public:
    EvalError(EvalErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    EvalErrorKind kind() const { return kind_; }

private:
    EvalErrorKind kind_;
};

/// Deterministic evaluation of a condition against the observations
/// recorded so far. Always is true; a structured condition applies its
/// comparator to the named variable of the tool's most recent
/// observation (is/is_not compare canonical text, gt/ge/lt/le compare
/// numerically); textual conditions are not evaluable here.
bool eval_condition(const Condition& condition, const ObservationLog& history);

}  // namespace sop
