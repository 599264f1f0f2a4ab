#include "tamc/checker.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <sstream>

namespace tamc {

std::string SafetyProperty::str() const {
    std::ostringstream oss;
    oss << "A[] not (";
    for (std::size_t i = 0; i < forbidden.size(); ++i) {
        if (i) oss << " and ";
        oss << forbidden[i].first << '.' << forbidden[i].second;
    }
    oss << ')';
    return oss.str();
}

std::vector<std::pair<int, int>> resolve_property(const Network& n, const SafetyProperty& p) {
    if (p.forbidden.empty())
        throw Error(ErrorKind::Prerequisite, "safety property has no location predicates");
    std::vector<std::pair<int, int>> out;
    for (const auto& [automaton, location] : p.forbidden) {
        int ai = n.automaton_index(automaton);
        if (ai < 0)
            throw Error(ErrorKind::Prerequisite,
                        "property names unknown automaton '" + automaton + "'");
        int li = n.automata[ai].location_index(location);
        if (li < 0)
            throw Error(ErrorKind::Prerequisite, "property names unknown location '" + automaton +
                                                     "." + location + "'");
        out.push_back({ai, li});
    }
    return out;
}

// ---------------------------------------------------------------------------
// check_safety
// ---------------------------------------------------------------------------

namespace {

// Flattened clock indexing across the network.
struct ClockLayout {
    std::vector<int> offset;  // per automaton
    int total = 0;

    explicit ClockLayout(const Network& n) {
        for (const auto& a : n.automata) {
            offset.push_back(total);
            total += static_cast<int>(a.clocks.size());
        }
    }
    int global(int automaton, int clock) const { return offset[automaton] + clock; }
};

struct SearchNode {
    std::vector<int> locations;
    Dbm zone;
    int parent = -1;
    TransitionRecord via;
};

void constrain_invariant(Dbm& zone, const Automaton& a, int location, int automaton_idx,
                         const ClockLayout& layout) {
    for (const auto& atom : a.locations[location].invariant) {
        ClockAtom global = atom;
        global.clock = layout.global(automaton_idx, atom.clock);
        zone.constrain(global);
    }
}

// All sync combinations enabled by locations alone; zone feasibility is
// decided by the caller through intersections. Order: automata and edges in
// declaration order, receiver choices lexicographic.
std::vector<TransitionRecord> enabled_combos(const Network& n, const std::vector<int>& locations) {
    std::vector<TransitionRecord> out;
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai) {
        const Automaton& a = n.automata[ai];
        for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
            const Edge& e = a.edges[ei];
            if (e.source != locations[ai]) continue;
            if (e.action.kind == ActionKind::Receive) continue;

            if (e.action.kind == ActionKind::Internal) {
                out.push_back({"", {{static_cast<int>(ai), static_cast<int>(ei)}}});
                continue;
            }

            const ChannelDecl* decl = n.find_channel(e.action.channel);
            if (!decl)
                throw Error(ErrorKind::Prerequisite,
                            "edge references undeclared channel '" + e.action.channel + "'");

            if (decl->kind == ChannelKind::Binary) {
                for (std::size_t aj = 0; aj < n.automata.size(); ++aj) {
                    if (aj == ai) continue;
                    const Automaton& b = n.automata[aj];
                    for (std::size_t fj = 0; fj < b.edges.size(); ++fj) {
                        const Edge& f = b.edges[fj];
                        if (f.source != locations[aj] || f.action.kind != ActionKind::Receive ||
                            f.action.channel != e.action.channel)
                            continue;
                        std::vector<std::pair<int, int>> fired = {
                            {static_cast<int>(ai), static_cast<int>(ei)},
                            {static_cast<int>(aj), static_cast<int>(fj)}};
                        std::sort(fired.begin(), fired.end());
                        out.push_back({e.action.channel, std::move(fired)});
                    }
                }
            } else {
                std::vector<std::vector<std::pair<int, int>>> receiver_choices;
                for (std::size_t aj = 0; aj < n.automata.size(); ++aj) {
                    if (aj == ai) continue;
                    const Automaton& b = n.automata[aj];
                    std::vector<std::pair<int, int>> candidates;
                    for (std::size_t fj = 0; fj < b.edges.size(); ++fj) {
                        const Edge& f = b.edges[fj];
                        if (f.source != locations[aj] || f.action.kind != ActionKind::Receive ||
                            f.action.channel != e.action.channel)
                            continue;
                        if (!f.guard.empty())
                            throw Error(ErrorKind::Prerequisite,
                                        "receiving edge " + edge_address(b, static_cast<int>(fj)) +
                                            " on broadcast channel carries a guard");
                        candidates.push_back({static_cast<int>(aj), static_cast<int>(fj)});
                    }
                    if (!candidates.empty()) receiver_choices.push_back(std::move(candidates));
                }
                std::vector<std::size_t> choice(receiver_choices.size(), 0);
                while (true) {
                    std::vector<std::pair<int, int>> fired = {
                        {static_cast<int>(ai), static_cast<int>(ei)}};
                    for (std::size_t k = 0; k < receiver_choices.size(); ++k)
                        fired.push_back(receiver_choices[k][choice[k]]);
                    std::sort(fired.begin(), fired.end());
                    out.push_back({e.action.channel, std::move(fired)});

                    std::size_t k = 0;
                    while (k < receiver_choices.size()) {
                        if (++choice[k] < receiver_choices[k].size()) break;
                        choice[k] = 0;
                        ++k;
                    }
                    if (k == receiver_choices.size()) break;
                }
            }
        }
    }
    return out;
}

SymbolicTrace rebuild_trace(const std::vector<SearchNode>& arena, int leaf) {
    SymbolicTrace trace;
    std::vector<int> chain;
    for (int i = leaf; i >= 0; i = arena[i].parent) chain.push_back(i);
    std::reverse(chain.begin(), chain.end());
    trace.initial_locations = arena[chain.front()].locations;
    for (std::size_t i = 1; i < chain.size(); ++i)
        trace.steps.push_back({arena[chain[i]].via, arena[chain[i]].locations});
    return trace;
}

}  // namespace

Verdict check_safety(const Network& n, const SafetyProperty& p, const CheckOptions& options) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::pair<int, int>> forbidden = resolve_property(n, p);
    ClockLayout layout(n);

    std::vector<int> k_bounds(layout.total, 0);
    auto consts = max_constants(n);
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai)
        for (std::size_t c = 0; c < consts[ai].size(); ++c)
            k_bounds[layout.global(static_cast<int>(ai), static_cast<int>(c))] = consts[ai][c];

    auto is_forbidden = [&](const std::vector<int>& locations) {
        for (const auto& [ai, li] : forbidden)
            if (locations[ai] != li) return false;
        return true;
    };

    Verdict verdict;
    auto finish = [&](VerdictKind kind, std::optional<CounterExample> ce) {
        verdict.kind = kind;
        verdict.counterexample = std::move(ce);
        verdict.statistics.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return verdict;
    };
    auto make_ce = [&](const std::vector<SearchNode>& arena, int leaf) {
        CounterExample ce;
        ce.symbolic = rebuild_trace(arena, leaf);
        ce.witness = concretize_trace(n, ce.symbolic);
        ce.word = extract_timed_word(n, ce.witness);
        return ce;
    };

    // Initial symbolic state: origin, invariants, future closure.
    std::vector<int> init_locs;
    for (const auto& a : n.automata) init_locs.push_back(a.initial);
    Dbm zone = Dbm::zero(layout.total);
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai)
        constrain_invariant(zone, n.automata[ai], init_locs[ai], static_cast<int>(ai), layout);
    if (zone.empty()) return finish(VerdictKind::Satisfied, std::nullopt);
    zone.delay_up();
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai)
        constrain_invariant(zone, n.automata[ai], init_locs[ai], static_cast<int>(ai), layout);
    if (options.extrapolation) zone.extrapolate(k_bounds);

    std::vector<SearchNode> arena;
    arena.push_back({init_locs, zone, -1, {}});
    if (is_forbidden(init_locs)) return finish(VerdictKind::Violated, make_ce(arena, 0));

    std::deque<int> waiting = {0};
    std::map<std::vector<int>, std::vector<int>> seen;  // locations -> arena ids
    seen[init_locs].push_back(0);

    while (!waiting.empty()) {
        int cur = waiting.front();
        waiting.pop_front();
        ++verdict.statistics.states_explored;

        for (const auto& combo : enabled_combos(n, arena[cur].locations)) {
            Dbm next = arena[cur].zone;
            for (const auto& [ai, ei] : combo.fired)
                for (const auto& atom : n.automata[ai].edges[ei].guard) {
                    ClockAtom global = atom;
                    global.clock = layout.global(ai, atom.clock);
                    next.constrain(global);
                }
            if (next.empty()) continue;

            std::vector<int> resets;
            std::vector<int> locations = arena[cur].locations;
            for (const auto& [ai, ei] : combo.fired) {
                const Edge& e = n.automata[ai].edges[ei];
                for (int r : e.resets) resets.push_back(layout.global(ai, r));
                locations[ai] = e.target;
            }
            next.reset(resets);
            for (const auto& [ai, ei] : combo.fired)
                constrain_invariant(next, n.automata[ai], locations[ai], ai, layout);
            if (next.empty()) continue;

            next.delay_up();
            for (std::size_t ai = 0; ai < n.automata.size(); ++ai)
                constrain_invariant(next, n.automata[ai], locations[ai], static_cast<int>(ai),
                                    layout);
            if (options.extrapolation) next.extrapolate(k_bounds);
            if (next.empty()) continue;

            auto& bucket = seen[locations];
            bool skip = false;
            for (int idx : bucket) {
                if (options.subsumption ? arena[idx].zone.includes(next)
                                        : arena[idx].zone == next) {
                    skip = true;
                    break;
                }
            }
            if (skip) continue;

            if (arena.size() >= options.max_states)
                throw Error(ErrorKind::Resource, "check_safety state cap exceeded (" +
                                                     std::to_string(options.max_states) +
                                                     " states)");
            int id = static_cast<int>(arena.size());
            arena.push_back({locations, next, cur, combo});
            if (is_forbidden(locations)) return finish(VerdictKind::Violated, make_ce(arena, id));
            bucket.push_back(id);
            waiting.push_back(id);
            verdict.statistics.peak_waiting =
                std::max(verdict.statistics.peak_waiting, waiting.size());
        }
    }

    return finish(VerdictKind::Satisfied, std::nullopt);
}

// ---------------------------------------------------------------------------
// Earliest-feasible concretization
// ---------------------------------------------------------------------------

Witness concretize_trace(const Network& n, const SymbolicTrace& trace) {
    int m = static_cast<int>(trace.steps.size());

    // Event-time difference constraints: variable i is the time T_i of step i
    // (T_0 = 0 is the DBM reference). Encoded as a DBM over m "clocks".
    Dbm times = Dbm::universal(std::max(m, 1));

    // last_reset[(automaton, clock)] = step index whose firing reset it last.
    std::map<std::pair<int, int>, int> last_reset;
    std::vector<int> locations = trace.initial_locations;

    auto bound_leq = [&](int i, int j, int value) {
        // T_i - T_j <= value
        Bound b = Bound::le(value);
        if (b < times.at(i, j)) times.set(i, j, b);
    };
    auto reset_index = [&](int ai, int clock) {
        auto it = last_reset.find({ai, clock});
        return it == last_reset.end() ? 0 : it->second;
    };

    // Initial state must satisfy the invariants at the origin.
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai)
        for (const auto& atom : n.automata[ai].locations[locations[ai]].invariant)
            if (atom.op == CmpOp::Ge && atom.bound > 0)
                throw Error(ErrorKind::Internal,
                            "trace starts in a location whose invariant excludes the origin");

    for (int i = 1; i <= m; ++i) {
        const auto& step = trace.steps[i - 1];

        // Ordering of events.
        bound_leq(i - 1, i, 0);

        // Invariants of the locations occupied while the delay runs: upper
        // bounds are tightest at T_i, established lower bounds persist.
        for (std::size_t ai = 0; ai < n.automata.size(); ++ai)
            for (const auto& atom : n.automata[ai].locations[locations[ai]].invariant)
                if (atom.op == CmpOp::Le)
                    bound_leq(i, reset_index(static_cast<int>(ai), atom.clock), atom.bound);

        // Guards of the fired edges, evaluated at T_i.
        for (const auto& [ai, ei] : step.transition.fired) {
            for (const auto& atom : n.automata[ai].edges[ei].guard) {
                int r = reset_index(ai, atom.clock);
                if (atom.op == CmpOp::Ge)
                    bound_leq(r, i, -atom.bound);
                else
                    bound_leq(i, r, atom.bound);
            }
        }

        // Resets, then target invariants at T_i.
        for (const auto& [ai, ei] : step.transition.fired) {
            const Edge& e = n.automata[ai].edges[ei];
            for (int r : e.resets) last_reset[{ai, r}] = i;
            locations[ai] = e.target;
        }
        for (const auto& [ai, ei] : step.transition.fired) {
            for (const auto& atom : n.automata[ai].locations[locations[ai]].invariant) {
                int r = reset_index(ai, atom.clock);
                if (atom.op == CmpOp::Le)
                    bound_leq(i, r, atom.bound);
                else
                    bound_leq(r, i, -atom.bound);
            }
        }
    }

    times.canonicalize();
    if (times.empty())
        throw Error(ErrorKind::Internal, "symbolic trace admits no concrete timing");

    // All constraints are non-strict, so pinning every event to its lower
    // bound is feasible and elementwise minimal.
    std::vector<std::int64_t> t(m + 1, 0);
    for (int i = 1; i <= m; ++i) t[i] = -static_cast<std::int64_t>(times.at(0, i).value);

    Witness witness;
    for (int i = 1; i <= m; ++i) {
        WitnessStep step;
        step.delay = Rational(t[i] - t[i - 1]);
        step.channel = trace.steps[i - 1].transition.channel;
        for (const auto& [ai, ei] : trace.steps[i - 1].transition.fired)
            step.fired.push_back(edge_address(n.automata[ai], ei));
        witness.push_back(std::move(step));
    }
    return witness;
}

}  // namespace tamc
