#pragma once

#include <string>

#include "sopgraph/document.hpp"

namespace sop {

/// Emits the canonical text form of a document: four-space indent step,
/// fields ordered condition, API, Description, label, goto, Instructions.
/// parse_sop(serialize(doc)) is structurally equal to doc.
std::string serialize(const SopDocument& doc);

std::string serialize_node(const NodeSpec& node, int depth = 0);

}  // namespace sop
