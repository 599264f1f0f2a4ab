#pragma once

#include <string>
#include <vector>

#include "tamc/checker.hpp"
#include "tamc/diagnostics.hpp"
#include "tamc/model.hpp"
#include "tamc/rules.hpp"

namespace tamc {

// ---------------------------------------------------------------------------
// Surface syntax (.ta / .prop / .plan files, UTF-8, '#' line comments).
//
//   model    := decl*
//   decl     := chandecl | automaton | sysmarker
//   chandecl := ("chan" | "broadcast" "chan") ["observable"] NAME ";"
//   automaton:= "automaton" NAME "{" "clock" NAME ("," NAME)* ";"
//               "init" NAME ";" locdef* edgedef* "}"
//   locdef   := "loc" NAME ["{" "inv" conj ";" "}"] ";"
//   edgedef  := "edge" NAME "->" NAME "{" ["guard" conj ";"]
//               ["sync" NAME ("!"|"?") ";"] ["reset" NAME ("," NAME)* ";"]
//               "}" ";"
//   conj     := atom ("&&" atom)*
//   atom     := NAME ("<=" | ">=") NAT
//   sysmarker:= "system" NAME ("," NAME)* ";"
// ---------------------------------------------------------------------------

struct ParsedModel {
    Network network;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Parses and validates a model document. Diagnostics carry source spans;
/// recovery happens at declaration boundaries (first error wins within one
/// declaration). The returned network is normalized.
ParsedModel parse_model(const std::string& text, const std::string& filename = "<input>");

/// Canonical text of a network; parse_model(unparse_model(n)) is the
/// identity on normalized networks.
std::string unparse_model(const Network& n);

/// Property grammar: 'A[] not "(" NAME "." NAME ("and" NAME "." NAME)* ")"'.
/// Any other TCTL form raises Error(Parse) naming the unsupported token.
SafetyProperty parse_property(const std::string& text, const std::string& filename = "<input>");

/// Plan grammar, line-oriented:
///   NODE = base(FILE)
///   NODE = r1(INPUT) [guard EDGEADDR CLOCK -DELTA]* [inv AUT.LOC CLOCK +DELTA]*
///   NODE = r2(INPUT, INPUT)
///   NODE = r3(INPUT, CHANNEL)
/// Declaration order is plan order. Raises Error(Parse) with spans.
std::vector<RuleApplication> parse_plan(const std::string& text,
                                        const std::string& filename = "<input>");

}  // namespace tamc
