#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "sopgraph/document.hpp"

namespace sop {

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, int line, int column)
        : std::runtime_error(format(message, line, column)),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string format(const std::string& message, int line, int column);
    int line_;
    int column_;
};

/// Parses the indentation-structured SOP text format.
///
/// Grammar, as exercised by the bundled corpus:
///   - a node is a list item `- <action text>:`; its fields sit one
///     indent step deeper, `Instructions:` introduces child items at the
///     same indent as the fields;
///   - `condition:` takes "always" or an inline JSON mapping with keys
///     API/variable/condition_type/value; `condition_type:` takes
///     always|if, where `if` turns the item key into a textual condition;
///   - `API:` takes a bare tool name or a JSON mapping {"name", "description"};
///   - `goto:` takes a comma-separated label list;
///   - `# ...` lines are comments, indentation is spaces only, and the
///     step is inferred from the first nested line.
///
/// Emphasis markers (`- ! text: !`) are stripped from item keys.
SopDocument parse_sop(std::string_view text, std::string source_name = "<memory>");

/// Reads and parses a SOP file. Throws std::runtime_error on I/O failure.
SopDocument parse_sop_file(const std::string& path);

}  // namespace sop
