#include "sopgraph/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "sopgraph/values.hpp"

namespace sop {

namespace {

using nlohmann::json;

struct Line {
    int indent = 0;
    std::string content;  // stripped of indentation and trailing whitespace
    int number = 0;       // 1-based
};

std::vector<Line> scan_lines(std::string_view text) {
    std::vector<Line> out;
    int number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view raw = text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++number;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

        std::size_t i = 0;
        while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t')) {
            if (raw[i] == '\t') throw ParseError("tab character in indentation", number, static_cast<int>(i) + 1);
            ++i;
        }
        std::string_view body = raw.substr(i);
        while (!body.empty() && (body.back() == ' ' || body.back() == '\t')) body.remove_suffix(1);
        if (body.empty() || body.front() == '#') continue;
        out.push_back(Line{static_cast<int>(i), std::string(body), number});
    }
    return out;
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

bool is_identifier(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    }
    return true;
}

class Parser {
public:
    Parser(std::vector<Line> lines, std::string source_name)
        : lines_(std::move(lines)), source_(std::move(source_name)) {}

    SopDocument parse() {
        SopDocument doc;
        doc.source_name = source_;
        if (lines_.empty()) throw ParseError("empty document: no SOP nodes found", 1, 1);
        while (pos_ < lines_.size()) {
            const Line& line = lines_[pos_];
            if (line.indent != 0) {
                throw ParseError("top-level node expected at column 0", line.number, line.indent + 1);
            }
            if (!line.content.starts_with("- ")) {
                throw ParseError("expected a list item starting with '- '", line.number, 1);
            }
            doc.roots.push_back(parse_item(0));
        }
        return doc;
    }

private:
    NodeSpec parse_item(int item_indent) {
        const Line& item = lines_[pos_];
        NodeSpec node;
        node.source_line = item.number;
        node.action_text = parse_item_key(item);
        ++pos_;

        if (pos_ >= lines_.size() || lines_[pos_].indent <= item_indent) {
            return node;
        }

        const int field_indent = lines_[pos_].indent;
        check_step(item_indent, field_indent, lines_[pos_]);

        bool saw_condition = false;
        bool saw_condition_type = false;
        bool saw_api = false, saw_description = false, saw_label = false, saw_goto = false,
             saw_instructions = false;

        while (pos_ < lines_.size() && lines_[pos_].indent >= field_indent) {
            const Line& line = lines_[pos_];
            if (line.indent > field_indent) {
                throw ParseError("unexpected indentation", line.number, line.indent + 1);
            }
            if (line.content.starts_with("- ")) {
                throw ParseError("list item outside an Instructions block", line.number, line.indent + 1);
            }
            const auto colon = line.content.find(':');
            if (colon == std::string::npos) {
                throw ParseError("expected 'field: value'", line.number, line.indent + 1);
            }
            const std::string field = line.content.substr(0, colon);
            const std::string value = trim(line.content.substr(colon + 1));
            ++pos_;

            if (field == "condition") {
                require_once(saw_condition, "condition", line);
                if (saw_condition_type) {
                    throw ParseError("node carries both 'condition' and 'condition_type'", line.number, 1);
                }
                node.condition = parse_condition_field(value, line);
            } else if (field == "condition_type") {
                require_once(saw_condition_type, "condition_type", line);
                if (saw_condition) {
                    throw ParseError("node carries both 'condition' and 'condition_type'", line.number, 1);
                }
                node.condition = parse_condition_type_field(value, node.action_text, line);
            } else if (field == "API") {
                require_once(saw_api, "API", line);
                node.tool = parse_api_field(value, line);
            } else if (field == "Description") {
                require_once(saw_description, "Description", line);
                node.description = strip_quotes(value);
            } else if (field == "label") {
                require_once(saw_label, "label", line);
                if (!is_identifier(value)) {
                    throw ParseError("label must be an identifier, got '" + value + "'", line.number, 1);
                }
                node.label = value;
            } else if (field == "goto") {
                require_once(saw_goto, "goto", line);
                node.goto_labels = parse_goto_field(value, line);
            } else if (field == "Instructions") {
                require_once(saw_instructions, "Instructions", line);
                if (!value.empty()) {
                    throw ParseError("Instructions takes no inline value", line.number, 1);
                }
                while (pos_ < lines_.size() && lines_[pos_].indent == field_indent &&
                       lines_[pos_].content.starts_with("- ")) {
                    node.children.push_back(parse_item(field_indent));
                }
            } else {
                throw ParseError("unknown field name '" + field + "'", line.number, line.indent + 1);
            }
        }

        return node;
    }

    std::string parse_item_key(const Line& item) {
        std::string key = item.content.substr(2);
        // presentation-layer emphasis: `- ! text: !`
        if (key.starts_with("! ") && key.ends_with("!")) {
            key = trim(key.substr(2, key.size() - 3));
        }
        if (key.empty() || key.back() != ':') {
            throw ParseError("node key must end with ':'", item.number, item.indent + 1);
        }
        key = trim(key.substr(0, key.size() - 1));
        if (key.empty()) {
            throw ParseError("node key text is empty", item.number, item.indent + 1);
        }
        return key;
    }

    Condition parse_condition_field(const std::string& value, const Line& line) {
        if (strip_quotes(value) == "always") return Condition::always();
        if (!value.starts_with("{")) {
            throw ParseError("condition must be \"always\" or an inline mapping", line.number, 1);
        }
        json j;
        try {
            j = json::parse(value);
        } catch (const json::exception& e) {
            throw ParseError(std::string("malformed structured condition: ") + e.what(), line.number, 1);
        }
        if (!j.is_object()) {
            throw ParseError("malformed structured condition: not a mapping", line.number, 1);
        }
        for (const char* required : {"API", "variable", "condition_type", "value"}) {
            if (!j.contains(required)) {
                throw ParseError(std::string("malformed structured condition: missing '") + required + "'",
                                 line.number, 1);
            }
        }
        for (const auto& [k, v] : j.items()) {
            if (k != "API" && k != "variable" && k != "condition_type" && k != "value") {
                throw ParseError("malformed structured condition: unknown key '" + k + "'", line.number, 1);
            }
        }
        StructuredCondition cond;
        if (!j["API"].is_string() || !j["variable"].is_string() || !j["condition_type"].is_string()) {
            throw ParseError("malformed structured condition: API/variable/condition_type must be text",
                             line.number, 1);
        }
        cond.api = j["API"].get<std::string>();
        cond.variable = j["variable"].get<std::string>();
        const auto cmp = comparator_from_text(j["condition_type"].get<std::string>());
        if (!cmp) {
            throw ParseError("malformed structured condition: comparator '" +
                                 j["condition_type"].get<std::string>() +
                                 "' is not one of is/is_not/gt/ge/lt/le",
                             line.number, 1);
        }
        cond.comparator = *cmp;
        const json& v = j["value"];
        if (v.is_boolean()) {
            cond.value = v.get<bool>();
        } else if (v.is_number()) {
            cond.value = v.get<double>();
        } else if (v.is_string()) {
            cond.value = v.get<std::string>();
        } else {
            throw ParseError("malformed structured condition: value must be text, boolean or number",
                             line.number, 1);
        }
        return Condition(std::move(cond));
    }

    Condition parse_condition_type_field(const std::string& value, const std::string& action_text,
                                         const Line& line) {
        const std::string v = strip_quotes(value);
        if (v == "always") return Condition::always();
        if (v == "if") return Condition::textual(action_text);
        throw ParseError("condition_type must be always or if, got '" + v + "'", line.number, 1);
    }

    ToolSpec parse_api_field(const std::string& value, const Line& line) {
        ToolSpec tool;
        if (value.starts_with("{")) {
            json j;
            try {
                j = json::parse(value);
            } catch (const json::exception& e) {
                throw ParseError(std::string("malformed API mapping: ") + e.what(), line.number, 1);
            }
            if (!j.is_object() || !j.contains("name") || !j["name"].is_string()) {
                throw ParseError("malformed API mapping: missing text 'name'", line.number, 1);
            }
            for (const auto& [k, v2] : j.items()) {
                if (k != "name" && k != "description") {
                    throw ParseError("malformed API mapping: unknown key '" + k + "'", line.number, 1);
                }
            }
            tool.name = j["name"].get<std::string>();
            if (j.contains("description")) {
                if (!j["description"].is_string()) {
                    throw ParseError("malformed API mapping: description must be text", line.number, 1);
                }
                tool.description = j["description"].get<std::string>();
            }
        } else {
            tool.name = strip_quotes(value);
        }
        if (!is_identifier(tool.name)) {
            throw ParseError("API name must be an identifier, got '" + tool.name + "'", line.number, 1);
        }
        return tool;
    }

    std::vector<std::string> parse_goto_field(const std::string& value, const Line& line) {
        std::vector<std::string> labels;
        std::stringstream ss(value);
        std::string part;
        while (std::getline(ss, part, ',')) {
            const std::string label = trim(part);
            if (!is_identifier(label)) {
                throw ParseError("goto target must be an identifier, got '" + label + "'", line.number, 1);
            }
            labels.push_back(label);
        }
        if (labels.empty()) {
            throw ParseError("goto requires at least one label", line.number, 1);
        }
        return labels;
    }

    void require_once(bool& seen, const char* field, const Line& line) {
        if (seen) throw ParseError(std::string("duplicate field '") + field + "'", line.number, 1);
        seen = true;
    }

    void check_step(int outer, int inner, const Line& line) {
        const int step = inner - outer;
        if (step <= 0) throw ParseError("nested block must be indented", line.number, inner + 1);
        if (unit_ < 0) {
            unit_ = step;
        } else if (step != unit_) {
            throw ParseError("inconsistent indentation step (expected " + std::to_string(unit_) +
                                 " spaces, got " + std::to_string(step) + ")",
                             line.number, inner + 1);
        }
    }

    std::vector<Line> lines_;
    std::string source_;
    std::size_t pos_ = 0;
    int unit_ = -1;
};

}  // namespace

std::string ParseError::format(const std::string& message, int line, int column) {
    return "parse error at line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
           message;
}

SopDocument parse_sop(std::string_view text, std::string source_name) {
    Parser parser(scan_lines(text), std::move(source_name));
    return parser.parse();
}

SopDocument parse_sop_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open SOP file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sop(buf.str(), path);
}

}  // namespace sop
