#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tamc/dbm.hpp"
#include "tamc/discrete.hpp"
#include "tamc/model.hpp"

namespace tamc {

// ---------------------------------------------------------------------------
// Zone-based symbolic reachability for safety invariants
// A[] not <conjunction of location predicates>, with counter-example
// extraction and earliest-feasible concretization.
// ---------------------------------------------------------------------------

struct SafetyProperty {
    /// Conjunction of (automaton name, location name) predicates; the
    /// property is violated when all of them hold simultaneously.
    std::vector<std::pair<std::string, std::string>> forbidden;

    bool operator==(const SafetyProperty&) const = default;
    std::string str() const;
};

struct TransitionRecord {
    std::string channel;                     // empty for internal steps
    std::vector<std::pair<int, int>> fired;  // (automaton, edge), automaton-ordered
};

struct SymbolicState {
    std::vector<int> locations;
    Dbm zone;
};

struct SymbolicTraceStep {
    TransitionRecord transition;
    std::vector<int> locations;  // after the step
};

struct SymbolicTrace {
    std::vector<int> initial_locations;
    std::vector<SymbolicTraceStep> steps;
};

struct CounterExample {
    SymbolicTrace symbolic;
    Witness witness;
    TimedWord word;
    std::string node;  // abstraction-tree node id, attached by the traversal
};

struct CheckStatistics {
    std::size_t states_explored = 0;
    std::size_t peak_waiting = 0;
    double wall_seconds = 0;  // informational; never serialized into reports
};

enum class VerdictKind { Satisfied, Violated };

struct Verdict {
    VerdictKind kind = VerdictKind::Satisfied;
    std::optional<CounterExample> counterexample;
    CheckStatistics statistics;

    bool violated() const { return kind == VerdictKind::Violated; }
};

struct CheckOptions {
    std::size_t max_states = 1000000;
    bool subsumption = true;    // passed/waiting-list inclusion subsumption
    bool extrapolation = true;  // disable only to cross-check verdicts; the
                                // zone graph may then be infinite (state cap
                                // still applies)
};

/// Resolves the property against the network; throws Error(Prerequisite) on
/// unknown automata or locations.
std::vector<std::pair<int, int>> resolve_property(const Network& n, const SafetyProperty& p);

/// Forward zone reachability with FIFO exploration, declaration-ordered
/// successor enumeration, maximal-constant extrapolation and inclusion
/// subsumption. Deterministic: identical inputs give identical verdicts,
/// traces and statistics. Throws Error(Resource) past `max_states`.
Verdict check_safety(const Network& n, const SafetyProperty& p, const CheckOptions& options = {});

/// Earliest-feasible concretization: delays are minimized subject to all
/// guard and invariant constraints along the trace (difference-constraint
/// propagation over the event times). The result passes replay; an
/// infeasible trace indicates a checker bug and raises Error(Internal).
Witness concretize_trace(const Network& n, const SymbolicTrace& trace);

}  // namespace tamc
