#include "tamc/rules.hpp"

#include <algorithm>
#include <set>

namespace tamc {

std::string rule_kind_name(RuleKind k) {
    switch (k) {
        case RuleKind::Base: return "base";
        case RuleKind::R1: return "r1";
        case RuleKind::R2: return "r2";
        case RuleKind::R3: return "r3";
        case RuleKind::Subtract: return "subtract";
    }
    return "?";
}

std::string IntervalPiece::str() const {
    return "[" + std::to_string(lower) + "," + (upper ? std::to_string(*upper) : "inf") + "]";
}

namespace {

void require_interval_shape(const Automaton& a) {
    for (std::size_t ei = 0; ei < a.edges.size(); ++ei)
        for (const auto& atom : a.edges[ei].guard)
            if (atom.op != CmpOp::Ge)
                throw Error(ErrorKind::Shape,
                            "guard on " + edge_address(a, static_cast<int>(ei)) +
                                " contains an upper-bound atom; rule requires interval-shaped constraints");
    for (const auto& loc : a.locations)
        for (const auto& atom : loc.invariant)
            if (atom.op != CmpOp::Le)
                throw Error(ErrorKind::Shape, "invariant on " + a.name + "." + loc.name +
                                                  " contains a lower-bound atom; rule requires "
                                                  "interval shape");
}

int guard_bound(const Edge& e, int clock) {
    for (const auto& atom : e.guard)
        if (atom.clock == clock) return atom.bound;
    return 0;
}

std::optional<int> invariant_bound(const Location& l, int clock) {
    for (const auto& atom : l.invariant)
        if (atom.clock == clock) return atom.bound;
    return std::nullopt;
}

void set_guard_bound(Edge& e, int clock, int bound) {
    for (auto it = e.guard.begin(); it != e.guard.end(); ++it) {
        if (it->clock == clock) {
            if (bound <= 0)
                e.guard.erase(it);
            else
                it->bound = bound;
            return;
        }
    }
    if (bound > 0) {
        e.guard.push_back({clock, CmpOp::Ge, bound});
        std::sort(e.guard.begin(), e.guard.end(),
                  [](const ClockAtom& x, const ClockAtom& y) { return x.clock < y.clock; });
    }
}

void set_invariant_bound(Location& l, int clock, std::optional<int> bound) {
    for (auto it = l.invariant.begin(); it != l.invariant.end(); ++it) {
        if (it->clock == clock) {
            if (bound)
                it->bound = *bound;
            else
                l.invariant.erase(it);
            return;
        }
    }
    if (bound) {
        l.invariant.push_back({clock, CmpOp::Le, *bound});
        std::sort(l.invariant.begin(), l.invariant.end(),
                  [](const ClockAtom& x, const ClockAtom& y) { return x.clock < y.clock; });
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// R1
// ---------------------------------------------------------------------------

Automaton apply_r1(const Automaton& a, const DeltaVector& deltas) {
    require_interval_shape(a);
    Automaton out = a;

    for (const auto& [address, per_clock] : deltas.guard_deltas) {
        int ei = resolve_edge_address(a, address);  // throws Error(Address)
        for (const auto& [clock_name, delta] : per_clock) {
            if (delta < 0)
                throw Error(ErrorKind::Prerequisite,
                            "negative guard delta for " + address + " " + clock_name);
            int clock = a.clock_index(clock_name);
            if (clock < 0)
                throw Error(ErrorKind::Address,
                            "delta names unknown clock '" + clock_name + "' on " + address);
            int n = guard_bound(out.edges[ei], clock);
            set_guard_bound(out.edges[ei], clock, std::max(0, n - delta));
        }
    }

    for (const auto& [loc_addr, per_clock] : deltas.inv_deltas) {
        auto dot = loc_addr.find('.');
        if (dot == std::string::npos)
            throw Error(ErrorKind::Address, "malformed location address '" + loc_addr + "'");
        std::string automaton = loc_addr.substr(0, dot);
        std::string loc_name = loc_addr.substr(dot + 1);
        if (automaton != a.name)
            throw Error(ErrorKind::Address, "location address '" + loc_addr +
                                                "' names automaton '" + automaton + "', expected '" +
                                                a.name + "'");
        int li = a.location_index(loc_name);
        if (li < 0)
            throw Error(ErrorKind::Address, "unknown location in delta address '" + loc_addr + "'");
        for (const auto& [clock_name, delta] : per_clock) {
            if (delta < 0)
                throw Error(ErrorKind::Prerequisite,
                            "negative invariant delta for " + loc_addr + " " + clock_name);
            int clock = a.clock_index(clock_name);
            if (clock < 0)
                throw Error(ErrorKind::Address,
                            "delta names unknown clock '" + clock_name + "' on " + loc_addr);
            auto m = invariant_bound(out.locations[li], clock);
            if (m) set_invariant_bound(out.locations[li], clock, *m + delta);
            // absent invariant bound is already unbounded; widening keeps it so
        }
    }

    return out;
}

// ---------------------------------------------------------------------------
// R2
// ---------------------------------------------------------------------------

Automaton apply_r2(const Automaton& a1, const Automaton& a2) {
    if (auto mismatch = structure_mismatch(a1, a2))
        throw Error(ErrorKind::Prerequisite, "models do not share structure: " + *mismatch);
    require_interval_shape(a1);
    require_interval_shape(a2);

    Automaton out = a1;
    for (std::size_t ei = 0; ei < out.edges.size(); ++ei) {
        std::set<int> clocks;
        for (const auto& atom : a1.edges[ei].guard) clocks.insert(atom.clock);
        for (const auto& atom : a2.edges[ei].guard) clocks.insert(atom.clock);
        for (int c : clocks) {
            int merged = std::min(guard_bound(a1.edges[ei], c), guard_bound(a2.edges[ei], c));
            set_guard_bound(out.edges[ei], c, merged);
        }
    }
    for (std::size_t li = 0; li < out.locations.size(); ++li) {
        std::set<int> clocks;
        for (const auto& atom : a1.locations[li].invariant) clocks.insert(atom.clock);
        for (const auto& atom : a2.locations[li].invariant) clocks.insert(atom.clock);
        for (int c : clocks) {
            auto m1 = invariant_bound(a1.locations[li], c);
            auto m2 = invariant_bound(a2.locations[li], c);
            // An absent bound is infinity and dominates the merge.
            std::optional<int> merged;
            if (m1 && m2) merged = std::max(*m1, *m2);
            set_invariant_bound(out.locations[li], c, merged);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// R3
// ---------------------------------------------------------------------------

Network apply_r3(const Network& n, const std::string& channel) {
    const ChannelDecl* decl = n.find_channel(channel);
    if (!decl) throw Error(ErrorKind::Address, "unknown channel '" + channel + "'");
    if (decl->observable)
        throw Error(ErrorKind::Prerequisite,
                    "channel '" + channel + "' is observable; R3 requires an unobservable channel");
    if (decl->kind != ChannelKind::Broadcast)
        throw Error(ErrorKind::Prerequisite,
                    "channel '" + channel + "' is not a broadcast channel");

    Network out = n;
    for (auto& a : out.automata) {
        for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
            Edge& e = a.edges[ei];
            if (e.action.kind != ActionKind::Receive || e.action.channel != channel) continue;
            if (!e.guard.empty())
                throw Error(ErrorKind::Prerequisite,
                            "receiving edge " + edge_address(a, static_cast<int>(ei)) +
                                " carries a guard; R3 requires guard-free receiving edges");
            e.action = Action{ActionKind::Internal, ""};
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model subtraction
// ---------------------------------------------------------------------------

namespace {

struct Interval {
    int lower = 0;
    std::optional<int> upper;

    bool operator==(const Interval&) const = default;
};

Interval edge_clock_interval(const Automaton& a, int edge, int clock) {
    return {guard_bound(a.edges[edge], clock),
            invariant_bound(a.locations[a.edges[edge].source], clock)};
}

bool contained(const Interval& inner, const Interval& outer) {
    if (inner.lower < outer.lower) return false;
    if (!outer.upper) return true;
    if (!inner.upper) return false;
    return *inner.upper <= *outer.upper;
}

// Maximal integer gaps of the union of `covered` within `parent`.
std::vector<IntervalPiece> complement_pieces(const Interval& parent,
                                             std::vector<Interval> covered) {
    std::sort(covered.begin(), covered.end(), [](const Interval& x, const Interval& y) {
        return x.lower < y.lower;
    });
    std::vector<IntervalPiece> pieces;
    int cursor = parent.lower;
    bool open_ended = !parent.upper;
    bool exhausted = false;  // a child reached the parent's unbounded end
    for (const auto& iv : covered) {
        if (iv.lower > cursor)
            pieces.push_back({cursor, iv.lower - 1});
        if (!iv.upper) {
            exhausted = true;
            break;
        }
        cursor = std::max(cursor, *iv.upper + 1);
    }
    if (!exhausted) {
        if (open_ended)
            pieces.push_back({cursor, std::nullopt});
        else if (cursor <= *parent.upper)
            pieces.push_back({cursor, *parent.upper});
    }
    return pieces;
}

}  // namespace

std::vector<SubtractionProposal> subtract_models(const Automaton& parent,
                                                 const std::vector<Automaton>& children) {
    require_interval_shape(parent);
    for (const auto& child : children) {
        if (auto mismatch = structure_mismatch(parent, child))
            throw Error(ErrorKind::Prerequisite,
                        "child does not share the parent's structure: " + *mismatch);
        require_interval_shape(child);
    }

    // Dimensions where some child's enabled interval differs from the parent's.
    struct Dim {
        int edge;
        int clock;
        Interval parent_iv;
        std::vector<IntervalPiece> pieces;
    };
    std::vector<Dim> dims;
    for (std::size_t ei = 0; ei < parent.edges.size(); ++ei) {
        for (std::size_t c = 0; c < parent.clocks.size(); ++c) {
            Interval piv = edge_clock_interval(parent, static_cast<int>(ei), static_cast<int>(c));
            std::vector<Interval> child_ivs;
            bool differs = false;
            for (const auto& child : children) {
                Interval civ = edge_clock_interval(child, static_cast<int>(ei), static_cast<int>(c));
                if (!contained(civ, piv))
                    throw Error(ErrorKind::Containment,
                                "child interval on " + edge_address(parent, static_cast<int>(ei)) +
                                    " clock " + parent.clocks[c] +
                                    " is not contained in the parent's");
                if (civ != piv) differs = true;
                child_ivs.push_back(civ);
            }
            if (!differs) continue;
            dims.push_back({static_cast<int>(ei), static_cast<int>(c), piv,
                            complement_pieces(piv, child_ivs)});
        }
    }

    if (dims.empty()) return {};

    // Cross product of per-dimension complement pieces, one model each.
    std::vector<SubtractionProposal> proposals;
    std::vector<std::size_t> choice(dims.size(), 0);
    for (const auto& d : dims)
        if (d.pieces.empty()) return {};  // some dimension is fully tiled

    while (true) {
        SubtractionProposal proposal;
        proposal.model = parent;
        // Detect conflicting writes to a shared (location, clock) invariant.
        std::map<std::pair<int, int>, std::optional<int>> inv_written;
        for (std::size_t di = 0; di < dims.size(); ++di) {
            const Dim& d = dims[di];
            const IntervalPiece& piece = d.pieces[choice[di]];
            set_guard_bound(proposal.model.edges[d.edge], d.clock, piece.lower);
            auto key = std::make_pair(proposal.model.edges[d.edge].source, d.clock);
            auto it = inv_written.find(key);
            if (it != inv_written.end() && it->second != piece.upper)
                throw Error(ErrorKind::Prerequisite,
                            "subtraction dimensions share the invariant of location '" +
                                parent.locations[key.first].name +
                                "' with conflicting bounds; split the edges first");
            inv_written[key] = piece.upper;
            set_invariant_bound(proposal.model.locations[proposal.model.edges[d.edge].source],
                                d.clock, piece.upper);
            proposal.dimensions.push_back({edge_address(parent, d.edge), parent.clocks[d.clock],
                                           piece});
        }
        proposals.push_back(std::move(proposal));

        std::size_t k = 0;
        while (k < dims.size()) {
            if (++choice[k] < dims[k].pieces.size()) break;
            choice[k] = 0;
            ++k;
        }
        if (k == dims.size()) break;
    }
    return proposals;
}

}  // namespace tamc
