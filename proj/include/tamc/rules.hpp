#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tamc/model.hpp"

namespace tamc {

// ---------------------------------------------------------------------------
// Domain-independent abstraction rules and model subtraction.
//
// R1 widens enabled intervals (guard lower bounds down, invariant upper
// bounds up), R2 merges same-structure models by min-guard/max-invariant,
// R3 erases receiving actions of an unobservable broadcast channel.
// Subtraction produces base models covering the parent's intervals not
// covered by its children.
// ---------------------------------------------------------------------------

/// Nonnegative widening amounts, addressed symbolically: guard deltas by
/// edge address, invariant deltas by "Automaton.Location"; both then by
/// clock name.
struct DeltaVector {
    std::map<std::string, std::map<std::string, int>> guard_deltas;
    std::map<std::string, std::map<std::string, int>> inv_deltas;

    bool operator==(const DeltaVector&) const = default;
    bool empty() const { return guard_deltas.empty() && inv_deltas.empty(); }
};

enum class RuleKind { Base, R1, R2, R3, Subtract };

std::string rule_kind_name(RuleKind k);

/// One step of an abstraction plan; `output` is the node id it defines.
struct RuleApplication {
    RuleKind rule = RuleKind::Base;
    std::string output;
    std::vector<std::string> inputs;
    DeltaVector deltas;    // R1
    std::string channel;   // R3
    std::string file;      // Base

    bool operator==(const RuleApplication&) const = default;
};

/// R1: every addressed guard lower bound N becomes max(0, N - delta), every
/// addressed invariant upper bound M becomes M + delta (absent stays
/// unbounded). Requires interval shape and nonnegative deltas; unknown
/// edges/locations/clocks raise Error(Address).
Automaton apply_r1(const Automaton& a, const DeltaVector& deltas);

/// R2: merge of two same-structure automata; guard bounds are elementwise
/// minima (absent = 0), invariant bounds elementwise maxima (absent
/// dominates as unbounded). Raises Error(Prerequisite) with the first
/// structural difference.
Automaton apply_r2(const Automaton& a1, const Automaton& a2);

/// R3: turns every receiving edge on `channel` into an internal edge.
/// Prerequisites: the channel is a declared unobservable broadcast channel
/// and none of its receiving edges carries a guard.
Network apply_r3(const Network& n, const std::string& channel);

struct IntervalPiece {
    int lower = 0;
    std::optional<int> upper;  // nullopt = unbounded

    bool operator==(const IntervalPiece&) const = default;
    std::string str() const;
};

struct SubtractionProposal {
    Automaton model;
    /// One entry per differing dimension: edge address, clock name, and the
    /// complement piece realized by this model.
    struct Dimension {
        std::string edge;
        std::string clock;
        IntervalPiece piece;
    };
    std::vector<Dimension> dimensions;
};

/// Integer-interval complements of the children's enabled intervals within
/// the parent's, one model per element of the cross product of per-dimension
/// complement pieces. All models must be pairwise same-structure and each
/// child interval contained in the parent's (Error(Containment) otherwise).
std::vector<SubtractionProposal> subtract_models(const Automaton& parent,
                                                 const std::vector<Automaton>& children);

}  // namespace tamc
