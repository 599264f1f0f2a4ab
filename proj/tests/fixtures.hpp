#pragma once

// Shared test fixtures: the speaker/translator pair used across the unit
// tests, corpus loading, and the trace predicates that characterize the two
// crossing counter-example mechanisms.

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "tamc/checker.hpp"
#include "tamc/discrete.hpp"
#include "tamc/parser.hpp"
#include "tamc/tree.hpp"

namespace tamc_test {

using namespace tamc;

inline Network parse_ok(const std::string& text, const std::string& name = "<fixture>") {
    ParsedModel parsed = parse_model(text, name);
    for (const auto& d : parsed.diagnostics)
        if (d.severity == Severity::Error) FAIL(d.str());
    return parsed.network;
}

/// One-location speaker firing a1 within [lo, hi] of each reset.
inline Network speaker(int lo = 5, int hi = 10) {
    std::ostringstream os;
    os << "broadcast chan observable a1;\n"
       << "automaton Speaker {\n  clock t;\n  init L0;\n  loc L0 { inv t <= " << hi
       << "; };\n  edge L0 -> L0 { guard t >= " << lo << "; sync a1!; reset t; };\n}\n";
    return parse_ok(os.str(), "speaker");
}

/// Speaker composed with a translator that forwards a1 as a2 immediately.
inline Network speaker_translator(bool a1_observable, bool a2_observable) {
    std::ostringstream os;
    os << "chan " << (a1_observable ? "observable " : "") << "a1;\n"
       << "broadcast chan " << (a2_observable ? "observable " : "") << "a2;\n"
       << "automaton Speaker {\n  clock t;\n  init L0;\n  loc L0 { inv t <= 10; };\n"
       << "  edge L0 -> L0 { guard t >= 5; sync a1!; reset t; };\n}\n"
       << "automaton Translator {\n  clock s;\n  init Idle;\n  loc Idle;\n"
       << "  loc Send { inv s <= 0; };\n"
       << "  edge Idle -> Send { sync a1?; reset s; };\n"
       << "  edge Send -> Idle { sync a2!; };\n}\n";
    return parse_ok(os.str(), "speaker_translator");
}

inline std::string corpus_path(const std::string& name) {
    return std::string(TAMC_CORPUS_DIR) + "/crossing/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline Network load_corpus_model(const std::string& name) {
    return parse_ok(read_file(corpus_path(name)), name);
}

inline AbstractionTree build_corpus_tree() {
    auto plan = parse_plan(read_file(corpus_path("crossing.plan")), "crossing.plan");
    std::map<std::string, BaseInput> bases;
    for (const auto& step : plan) {
        if (step.rule != RuleKind::Base) continue;
        Network net = load_corpus_model(step.file);
        bases[step.file] = {net.automata.at(0), net.channels};
    }
    return build_tree(plan, bases);
}

inline SafetyProperty corpus_property() {
    return parse_property(read_file(corpus_path("collision.prop")), "collision.prop");
}

/// Composes the fixed context (light + car) with one pedestrian node model.
inline Network corpus_closed_loop(const Network& context, const Automaton& pedestrian) {
    return compose(context, pedestrian);
}

}  // namespace tamc_test
