#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tamc/diagnostics.hpp"

namespace tamc {

// ---------------------------------------------------------------------------
// Syntax of networks of timed automata.
//
// Clock constraints are conjunctions of non-strict single-clock atoms with
// natural bounds. Guards in "interval shape" carry only lower bounds (x >= n),
// invariants only upper bounds (x <= n); system automata are unrestricted.
// Clocks are automaton-local; channels are network-global.
// ---------------------------------------------------------------------------

enum class CmpOp { Ge, Le };

struct ClockAtom {
    int clock = 0;   // index into the owning automaton's clock list
    CmpOp op = CmpOp::Ge;
    int bound = 0;

    bool operator==(const ClockAtom&) const = default;
};

using Guard = std::vector<ClockAtom>;
using InvariantExpr = std::vector<ClockAtom>;

enum class ActionKind { Internal, Send, Receive };

struct Action {
    ActionKind kind = ActionKind::Internal;
    std::string channel;  // empty iff kind == Internal

    bool operator==(const Action&) const = default;
};

struct Location {
    std::string name;
    InvariantExpr invariant;

    bool operator==(const Location&) const = default;
};

struct Edge {
    int source = 0;
    int target = 0;
    Action action;
    std::vector<int> resets;  // sorted clock indexes
    Guard guard;

    bool operator==(const Edge&) const = default;
};

struct Automaton {
    std::string name;
    std::vector<std::string> clocks;
    std::vector<Location> locations;
    int initial = 0;
    std::vector<Edge> edges;

    bool operator==(const Automaton&) const = default;

    int location_index(const std::string& loc_name) const;
    int clock_index(const std::string& clock_name) const;
};

enum class ChannelKind { Binary, Broadcast };

struct ChannelDecl {
    std::string name;
    ChannelKind kind = ChannelKind::Binary;
    bool observable = false;

    bool operator==(const ChannelDecl&) const = default;
};

struct Network {
    std::vector<Automaton> automata;
    std::vector<ChannelDecl> channels;
    std::vector<std::string> system;  // automaton names marked as system

    bool operator==(const Network&) const = default;

    int automaton_index(const std::string& name) const;
    const ChannelDecl* find_channel(const std::string& name) const;
    bool is_system(int automaton_idx) const;
    /// Observable channel names in declaration order.
    std::vector<std::string> observable_channels() const;
};

// ---------------------------------------------------------------------------
// Edge addressing: "automaton.source->target#k", k = ordinal among parallel
// edges in declaration order. The canonical handle used by deltas, plans and
// diagnostics.
// ---------------------------------------------------------------------------

std::string edge_address(const Automaton& a, int edge_idx);

/// Resolves an address against `a`; throws Error(Address) if absent/malformed.
int resolve_edge_address(const Automaton& a, const std::string& address);

// ---------------------------------------------------------------------------
// Validation and normalization
// ---------------------------------------------------------------------------

struct ValidationResult {
    Automaton normalized;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Checks the type invariants and normalizes constraints: duplicate guard
/// atoms reduce to the max lower bound, duplicate invariant atoms to the min
/// upper bound, vacuous "x >= 0" guard atoms are dropped, atoms are ordered
/// by clock. Reductions are reported as Info diagnostics.
ValidationResult validate_automaton(const Automaton& a);

struct NetworkValidationResult {
    Network normalized;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Per-automaton validation plus network-level checks: unique automaton
/// names, declared channels, and the broadcast restriction (receiving edges
/// on broadcast channels must carry no guard, which keeps receiver sets
/// independent of clock values for both engines).
NetworkValidationResult validate_network(const Network& n);

// ---------------------------------------------------------------------------
// Enabled intervals and framework applicability
// ---------------------------------------------------------------------------

struct ClockInterval {
    int lower = 0;                  // guard lower bound, 0 if absent
    std::optional<int> upper;       // source invariant upper bound, nullopt = unbounded
};

/// Per-clock enabled interval [N, M] of an edge: N from the guard, M from the
/// source-location invariant. Requires interval shape; throws Error(Shape)
/// naming the offending atom otherwise. Every declared clock is reported.
std::map<int, ClockInterval> enabled_interval(const Automaton& a, const std::string& edge_addr);

struct TimingIntervalEntry {
    std::string edge;   // edge address
    std::string clock;  // clock name
    int t_min = 0;
    std::optional<int> t_max;
};

struct TimingIntervalReport {
    std::vector<TimingIntervalEntry> entries;
};

struct ApplicabilityResult {
    TimingIntervalReport report;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Checks the syntactic framework prerequisites on every environment
/// automaton of the network: interval-shaped guards/invariants and non-empty
/// enabled intervals (N <= M). System automata are exempt.
ApplicabilityResult check_applicability(const Network& n);

// ---------------------------------------------------------------------------
// Structural comparison
// ---------------------------------------------------------------------------

/// Description of the first structural difference, or nullopt when the two
/// automata agree on everything except guard lower bounds and invariant
/// upper bounds (names are ignored).
std::optional<std::string> structure_mismatch(const Automaton& a1, const Automaton& a2);

inline bool same_structure(const Automaton& a1, const Automaton& a2) {
    return !structure_mismatch(a1, a2).has_value();
}

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

/// Largest constant comparing each clock of each automaton anywhere in the
/// network, as max_consts[automaton][clock]; 0 when unconstrained.
std::vector<std::vector<int>> max_constants(const Network& n);

/// Largest constant in the whole network.
int max_constant(const Network& n);

/// Appends one automaton to a context network (channel table unchanged).
/// Throws Error(Prerequisite) on automaton name collision.
Network compose(const Network& context, const Automaton& extra);

}  // namespace tamc
