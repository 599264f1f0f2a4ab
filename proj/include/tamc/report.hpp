#pragma once

#include <string>

#include "tamc/checker.hpp"
#include "tamc/tree.hpp"

namespace tamc {

// ---------------------------------------------------------------------------
// Machine-readable reports and tree files.
//
// JSON output is byte-identical across runs for identical inputs: ordered
// keys, exact rationals as numerator/denominator pairs, no timestamps. The
// report schema carries the version field "tamc-report": 1, tree files
// "tamc-tree": 1.
// ---------------------------------------------------------------------------

/// Single-check report; `format` is "json" or "text".
std::string write_check_report(const Network& n, const SafetyProperty& p, const Verdict& verdict,
                               const std::string& format);

/// Traversal report over an (annotated) abstraction tree.
std::string write_traversal_report(const AbstractionTree& tree, const SafetyProperty& p,
                                   const TraversalReport& report, const std::string& format);

/// Tree serialization, including verdicts and counter-examples when present.
std::string tree_to_text(const AbstractionTree& tree);
AbstractionTree tree_from_text(const std::string& text, const std::string& filename = "<tree>");

}  // namespace tamc
