#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

namespace sop {

/// A typed scalar as it appears in conditions, tool arguments and
/// simulated observations: text, boolean or number.
using Value = std::variant<bool, double, std::string>;

/// One tool output: variable name -> typed value. Ordered so that all
/// serialized forms are stable.
using Observation = std::map<std::string, Value>;

/// Arguments attached to a tool call.
using ArgumentMap = std::map<std::string, Value>;

/// Canonical text form used by `is`/`is_not` comparisons and by every
/// serializer: booleans render as "true"/"false", integral doubles drop
/// the fractional part, strings are trimmed of surrounding whitespace.
std::string canonical_text(const Value& v);

/// Canonical rendering of a number (no trailing ".0" for integers).
std::string number_to_text(double v);

/// Parses text into a double if the whole string is a valid number.
std::optional<double> text_to_number(const std::string& text);

/// Numeric view of a value: numbers pass through, numeric strings parse,
/// anything else is empty.
std::optional<double> value_as_number(const Value& v);

std::string trim(const std::string& s);

}  // namespace sop
