#pragma once

#include <vector>

#include "sopgraph/document.hpp"

namespace sop {

/// Checks document-level invariants: non-empty root list and action
/// texts, unique labels, resolvable and pairwise-distinct goto targets,
/// structured conditions referencing a tool that is bound somewhere in
/// the document. Returns an empty list when the document is well formed;
/// findings never throw.
std::vector<Diagnostic> validate(const SopDocument& doc);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace sop
