#include "tamc/discrete.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace tamc {

std::string TimedWord::str(const std::vector<std::string>& channels) const {
    std::ostringstream oss;
    oss << '(';
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) oss << ", ";
        bool first = true;
        for (std::size_t c = 0; c < channels.size(); ++c) {
            if (entries[i].bits & (1u << c)) {
                if (!first) oss << '+';
                oss << channels[c];
                first = false;
            }
        }
        oss << '@' << entries[i].time.str();
    }
    oss << ')';
    return oss.str();
}

OracleState initial_oracle_state(const Network& n) {
    OracleState s;
    for (const auto& a : n.automata) {
        s.locations.push_back(a.initial);
        s.clock_quanta.emplace_back(a.clocks.size(), 0);
    }
    return s;
}

bool StepLabel::observable(const Network& n) const {
    if (channel.empty()) return false;
    const ChannelDecl* decl = n.find_channel(channel);
    return decl && decl->observable;
}

// ---------------------------------------------------------------------------
// Concrete semantics
// ---------------------------------------------------------------------------

namespace {

bool atom_holds(const ClockAtom& atom, const std::vector<std::int64_t>& quanta,
                std::int64_t scale) {
    std::int64_t v = quanta[atom.clock];
    std::int64_t b = static_cast<std::int64_t>(atom.bound) * scale;
    return atom.op == CmpOp::Ge ? v >= b : v <= b;
}

bool invariant_holds(const Automaton& a, int location, const std::vector<std::int64_t>& quanta,
                     std::int64_t scale) {
    for (const auto& atom : a.locations[location].invariant)
        if (!atom_holds(atom, quanta, scale)) return false;
    return true;
}

bool guard_holds(const Automaton& a, const Edge& e, const std::vector<std::int64_t>& quanta,
                 std::int64_t scale) {
    for (const auto& atom : e.guard)
        if (!atom_holds(atom, quanta, scale)) return false;
    (void)a;
    return true;
}

// Applies the edge's resets and checks the target invariant on the owning
// automaton's clocks. Returns false when the step is blocked.
bool apply_edge(const Automaton& a, const Edge& e, std::vector<std::int64_t>& quanta,
                std::int64_t scale) {
    for (int r : e.resets) quanta[r] = 0;
    return invariant_holds(a, e.target, quanta, scale);
}

std::int64_t require_unit_fraction(const Rational& step) {
    if (step.num != 1 || step.den < 1)
        throw Error(ErrorKind::Usage,
                    "step must be a unit fraction 1/k, got " + step.str());
    return step.den;
}

std::int64_t horizon_quanta(const Rational& horizon, std::int64_t scale) {
    if (horizon.num <= 0) throw Error(ErrorKind::Usage, "horizon must be positive");
    std::int64_t scaled = horizon.num * scale;
    if (scaled % horizon.den != 0)
        throw Error(ErrorKind::Usage, "horizon " + horizon.str() +
                                          " is not a multiple of the step");
    return scaled / horizon.den;
}

}  // namespace

std::vector<std::pair<StepLabel, OracleState>> discrete_successors(
    const Network& n, const OracleState& state, std::int64_t scale,
    std::optional<std::int64_t> value_cap) {
    std::vector<std::pair<StepLabel, OracleState>> out;

    // Delay by one quantum. With closed constraints it suffices to check the
    // invariants at the endpoint.
    {
        OracleState next = state;
        bool ok = true;
        for (std::size_t ai = 0; ai < n.automata.size() && ok; ++ai) {
            for (auto& v : next.clock_quanta[ai]) {
                ++v;
                if (value_cap && v > *value_cap) v = *value_cap;
            }
            if (!invariant_holds(n.automata[ai], next.locations[ai], next.clock_quanta[ai], scale))
                ok = false;
        }
        if (ok) {
            StepLabel label;
            label.is_delay = true;
            out.emplace_back(std::move(label), std::move(next));
        }
    }

    auto emit = [&](const std::string& channel, std::vector<std::pair<int, int>> fired) {
        OracleState next = state;
        for (const auto& [ai, ei] : fired) {
            const Automaton& a = n.automata[ai];
            const Edge& e = a.edges[ei];
            if (!apply_edge(a, e, next.clock_quanta[ai], scale)) return;
            next.locations[ai] = e.target;
        }
        StepLabel label;
        label.channel = channel;
        label.fired = std::move(fired);
        out.emplace_back(std::move(label), std::move(next));
    };

    for (std::size_t ai = 0; ai < n.automata.size(); ++ai) {
        const Automaton& a = n.automata[ai];
        for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
            const Edge& e = a.edges[ei];
            if (e.source != state.locations[ai]) continue;
            if (e.action.kind == ActionKind::Receive) continue;
            if (!guard_holds(a, e, state.clock_quanta[ai], scale)) continue;

            if (e.action.kind == ActionKind::Internal) {
                emit("", {{static_cast<int>(ai), static_cast<int>(ei)}});
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
                        if (f.source != state.locations[aj] ||
                            f.action.kind != ActionKind::Receive ||
                            f.action.channel != e.action.channel)
                            continue;
                        if (!guard_holds(b, f, state.clock_quanta[aj], scale)) continue;
                        std::vector<std::pair<int, int>> fired = {
                            {static_cast<int>(ai), static_cast<int>(ei)},
                            {static_cast<int>(aj), static_cast<int>(fj)}};
                        std::sort(fired.begin(), fired.end());
                        emit(e.action.channel, std::move(fired));
                    }
                }
            } else {
                // Broadcast: the sender moves together with every automaton
                // that has an enabled receiving edge; per-automaton choices
                // among several receiving edges are enumerated.
                std::vector<std::vector<std::pair<int, int>>> receiver_choices;
                for (std::size_t aj = 0; aj < n.automata.size(); ++aj) {
                    if (aj == ai) continue;
                    const Automaton& b = n.automata[aj];
                    std::vector<std::pair<int, int>> candidates;
                    for (std::size_t fj = 0; fj < b.edges.size(); ++fj) {
                        const Edge& f = b.edges[fj];
                        if (f.source != state.locations[aj] ||
                            f.action.kind != ActionKind::Receive ||
                            f.action.channel != e.action.channel)
                            continue;
                        if (!guard_holds(b, f, state.clock_quanta[aj], scale)) continue;
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
                    emit(e.action.channel, std::move(fired));

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

// ---------------------------------------------------------------------------
// Bounded language
// ---------------------------------------------------------------------------

namespace {

struct SearchState {
    OracleState state;
    std::int64_t elapsed = 0;
    std::vector<std::pair<std::int64_t, std::uint32_t>> word;
};

std::string encode_key(const SearchState& s) {
    std::string key;
    auto put = [&key](std::int64_t v) {
        char buf[sizeof v];
        std::memcpy(buf, &v, sizeof v);
        key.append(buf, sizeof v);
    };
    put(s.elapsed);
    for (int loc : s.state.locations) put(loc);
    for (const auto& clocks : s.state.clock_quanta)
        for (auto v : clocks) put(v);
    for (const auto& [t, bits] : s.word) {
        put(t);
        put(bits);
    }
    return key;
}

std::uint32_t channel_bit(const std::vector<std::string>& observable, const std::string& channel) {
    for (std::size_t i = 0; i < observable.size(); ++i)
        if (observable[i] == channel) return 1u << i;
    return 0;
}

}  // namespace

BoundedLanguage bounded_language(const Network& n, const Rational& horizon, const Rational& step,
                                 const OracleCaps& caps) {
    std::int64_t scale = require_unit_fraction(step);
    std::int64_t hq = horizon_quanta(horizon, scale);

    BoundedLanguage lang;
    lang.horizon = horizon;
    lang.step = step;
    lang.observable = n.observable_channels();
    if (lang.observable.size() > 31)
        throw Error(ErrorKind::Usage, "at most 31 observable channels are supported");

    std::deque<SearchState> queue;
    std::unordered_set<std::string> visited;
    std::set<std::vector<std::pair<std::int64_t, std::uint32_t>>> words;

    SearchState init{initial_oracle_state(n), 0, {}};
    // A network whose initial state violates an invariant has no runs at all.
    bool initial_ok = true;
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai)
        if (!invariant_holds(n.automata[ai], init.state.locations[ai], init.state.clock_quanta[ai],
                             scale))
            initial_ok = false;
    if (initial_ok) {
        visited.insert(encode_key(init));
        words.insert(init.word);
        queue.push_back(std::move(init));
    }

    while (!queue.empty()) {
        SearchState cur = std::move(queue.front());
        queue.pop_front();

        if (visited.size() > caps.max_states)
            throw Error(ErrorKind::Resource,
                        "bounded_language state cap exceeded (" +
                            std::to_string(caps.max_states) + " states)");

        auto successors = discrete_successors(n, cur.state, scale);
        for (auto& [label, next_state] : successors) {
            SearchState next;
            next.state = std::move(next_state);
            next.elapsed = cur.elapsed + (label.is_delay ? 1 : 0);
            if (next.elapsed > hq) continue;
            next.word = cur.word;
            if (!label.is_delay && label.observable(n)) {
                std::uint32_t bit = channel_bit(lang.observable, label.channel);
                if (!next.word.empty() && next.word.back().first == cur.elapsed)
                    next.word.back().second |= bit;
                else
                    next.word.push_back({cur.elapsed, bit});
            }
            std::string key = encode_key(next);
            if (!visited.insert(std::move(key)).second) continue;
            words.insert(next.word);
            queue.push_back(std::move(next));
        }
    }

    for (const auto& raw : words) {
        TimedWord w;
        for (const auto& [t, bits] : raw) w.entries.push_back({Rational(t, scale), bits});
        lang.words.insert(std::move(w));
    }
    return lang;
}

InclusionResult bounded_inclusion(const Network& n1, const Network& n2, const Rational& horizon,
                                  const Rational& step, const OracleCaps& caps) {
    if (n1.observable_channels() != n2.observable_channels())
        throw Error(ErrorKind::Prerequisite,
                    "bounded_inclusion requires identical observable channel declarations");
    BoundedLanguage l1 = bounded_language(n1, horizon, step, caps);
    BoundedLanguage l2 = bounded_language(n2, horizon, step, caps);
    for (const auto& w : l1.words) {
        if (!l2.words.count(w)) return {false, w};
    }
    return {true, std::nullopt};
}

// ---------------------------------------------------------------------------
// Bounded timed simulation
// ---------------------------------------------------------------------------

namespace {

struct Lts {
    struct Discrete {
        std::uint32_t bits = 0;  // observable channel bit, 0 = unobservable
        int target = -1;
    };
    std::vector<std::int64_t> elapsed;
    std::vector<int> delay_succ;
    std::vector<std::vector<Discrete>> discrete;
    std::vector<std::vector<int>> eps_closure;  // unobservable-step closure, same level
    int initial = -1;
    std::int64_t max_level = 0;

    std::vector<std::vector<int>> by_level;  // level -> state ids
};

Lts build_lts(const Network& n, std::int64_t scale, std::int64_t hq, const OracleCaps& caps,
              const std::vector<std::string>& observable) {
    Lts lts;
    std::unordered_map<std::string, int> index;

    struct Pending {
        OracleState state;
        std::int64_t elapsed;
    };

    auto key_of = [](const OracleState& s, std::int64_t elapsed) {
        std::string key;
        auto put = [&key](std::int64_t v) {
            char buf[sizeof v];
            std::memcpy(buf, &v, sizeof v);
            key.append(buf, sizeof v);
        };
        put(elapsed);
        for (int loc : s.locations) put(loc);
        for (const auto& clocks : s.clock_quanta)
            for (auto v : clocks) put(v);
        return key;
    };

    std::deque<Pending> queue;
    std::vector<Pending> states;

    auto intern = [&](const OracleState& s, std::int64_t elapsed) {
        std::string key = key_of(s, elapsed);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(states.size());
        if (states.size() >= caps.max_states)
            throw Error(ErrorKind::Resource, "bounded_simulates state cap exceeded (" +
                                                 std::to_string(caps.max_states) + " states)");
        index.emplace(std::move(key), id);
        states.push_back({s, elapsed});
        lts.elapsed.push_back(elapsed);
        lts.delay_succ.push_back(-1);
        lts.discrete.emplace_back();
        queue.push_back({s, elapsed});
        return id;
    };

    OracleState init = initial_oracle_state(n);
    bool initial_ok = true;
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai)
        if (!invariant_holds(n.automata[ai], init.locations[ai], init.clock_quanta[ai], scale))
            initial_ok = false;
    if (initial_ok) lts.initial = intern(init, 0);

    while (!queue.empty()) {
        Pending cur = std::move(queue.front());
        queue.pop_front();
        int id = index.at(key_of(cur.state, cur.elapsed));

        for (auto& [label, next] : discrete_successors(n, cur.state, scale)) {
            std::int64_t elapsed = cur.elapsed + (label.is_delay ? 1 : 0);
            if (elapsed > hq) continue;
            int target = intern(next, elapsed);
            if (label.is_delay) {
                lts.delay_succ[id] = target;
            } else {
                std::uint32_t bits =
                    label.observable(n) ? channel_bit(observable, label.channel) : 0;
                lts.discrete[id].push_back({bits, target});
            }
        }
    }

    lts.max_level = hq;
    lts.by_level.assign(hq + 1, {});
    for (std::size_t i = 0; i < lts.elapsed.size(); ++i)
        lts.by_level[lts.elapsed[i]].push_back(static_cast<int>(i));

    // Unobservable-step closures, per state (same elapsed level).
    lts.eps_closure.resize(lts.elapsed.size());
    for (std::size_t i = 0; i < lts.elapsed.size(); ++i) {
        std::vector<int> closure;
        std::vector<int> stack = {static_cast<int>(i)};
        std::unordered_set<int> seen = {static_cast<int>(i)};
        while (!stack.empty()) {
            int s = stack.back();
            stack.pop_back();
            closure.push_back(s);
            for (const auto& d : lts.discrete[s])
                if (d.bits == 0 && seen.insert(d.target).second) stack.push_back(d.target);
        }
        std::sort(closure.begin(), closure.end());
        lts.eps_closure[i] = std::move(closure);
    }

    return lts;
}

}  // namespace

bool bounded_simulates(const Network& simulator, const Network& simulated,
                       const Rational& horizon, const Rational& step, const OracleCaps& caps) {
    if (simulator.observable_channels() != simulated.observable_channels())
        throw Error(ErrorKind::Prerequisite,
                    "bounded_simulates requires identical observable channel declarations");

    std::int64_t scale = require_unit_fraction(step);
    std::int64_t hq = horizon_quanta(horizon, scale);
    std::vector<std::string> observable = simulated.observable_channels();

    Lts l1 = build_lts(simulated, scale, hq, caps, observable);   // the smaller side
    Lts l2 = build_lts(simulator, scale, hq, caps, observable);   // the candidate simulator

    if (l1.initial < 0) return true;   // no behavior to match
    if (l2.initial < 0) return false;

    // rel[level] is indexed by positions within the per-level state lists.
    std::vector<std::vector<std::vector<char>>> rel(hq + 1);
    std::vector<std::unordered_map<int, int>> pos1(hq + 1), pos2(hq + 1);
    for (std::int64_t t = 0; t <= hq; ++t) {
        for (std::size_t k = 0; k < l1.by_level[t].size(); ++k) pos1[t][l1.by_level[t][k]] = k;
        for (std::size_t k = 0; k < l2.by_level[t].size(); ++k) pos2[t][l2.by_level[t][k]] = k;
        rel[t].assign(l1.by_level[t].size(),
                      std::vector<char>(l2.by_level[t].size(), 1));
    }

    auto related = [&](int s1, int s2) -> bool {
        std::int64_t t = l1.elapsed[s1];
        if (l2.elapsed[s2] != t) return false;
        return rel[t][pos1[t].at(s1)][pos2[t].at(s2)] != 0;
    };

    for (std::int64_t t = hq; t >= 0; --t) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < l1.by_level[t].size(); ++i) {
                int s1 = l1.by_level[t][i];
                for (std::size_t j = 0; j < l2.by_level[t].size(); ++j) {
                    if (!rel[t][i][j]) continue;
                    int s2 = l2.by_level[t][j];
                    bool ok = true;

                    // Delay obligation: s2 may interleave unobservable steps.
                    if (l1.delay_succ[s1] >= 0) {
                        int target = l1.delay_succ[s1];
                        bool matched = false;
                        for (int z : l2.eps_closure[s2]) {
                            if (l2.delay_succ[z] < 0) continue;
                            for (int zz : l2.eps_closure[l2.delay_succ[z]]) {
                                if (related(target, zz)) {
                                    matched = true;
                                    break;
                                }
                            }
                            if (matched) break;
                        }
                        ok = matched;
                    }

                    // Discrete obligations.
                    if (ok) {
                        for (const auto& d : l1.discrete[s1]) {
                            bool matched = false;
                            if (d.bits == 0) {
                                // Unobservable: matched by the same action or
                                // by stuttering, i.e. any unobservable path.
                                for (int z : l2.eps_closure[s2]) {
                                    if (related(d.target, z)) {
                                        matched = true;
                                        break;
                                    }
                                }
                            } else {
                                for (int z : l2.eps_closure[s2]) {
                                    for (const auto& d2 : l2.discrete[z]) {
                                        if (d2.bits != d.bits) continue;
                                        for (int zz : l2.eps_closure[d2.target]) {
                                            if (related(d.target, zz)) {
                                                matched = true;
                                                break;
                                            }
                                        }
                                        if (matched) break;
                                    }
                                    if (matched) break;
                                }
                            }
                            if (!matched) {
                                ok = false;
                                break;
                            }
                        }
                    }

                    if (!ok) {
                        rel[t][i][j] = 0;
                        changed = true;
                    }
                }
            }
        }
    }

    return related(l1.initial, l2.initial);
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

namespace {

std::pair<int, int> resolve_network_edge(const Network& n, const std::string& address) {
    auto dot = address.find('.');
    if (dot == std::string::npos)
        throw Error(ErrorKind::Address, "malformed edge address '" + address + "'");
    int ai = n.automaton_index(address.substr(0, dot));
    if (ai < 0)
        throw Error(ErrorKind::Address,
                    "edge address '" + address + "' names an unknown automaton");
    return {ai, resolve_edge_address(n.automata[ai], address)};
}

bool atom_holds_exact(const ClockAtom& atom, const std::vector<Rational>& clocks) {
    const Rational& v = clocks[atom.clock];
    Rational b(atom.bound);
    return atom.op == CmpOp::Ge ? v >= b : v <= b;
}

std::string atom_text(const Automaton& a, const ClockAtom& atom) {
    return a.clocks[atom.clock] + (atom.op == CmpOp::Ge ? " >= " : " <= ") +
           std::to_string(atom.bound);
}

}  // namespace

ReplayResult replay(const Network& n, const Witness& witness) {
    ReplayResult result;

    ReplaySnapshot cur;
    cur.time = Rational(0);
    for (const auto& a : n.automata) {
        cur.locations.push_back(a.initial);
        cur.clocks.emplace_back(a.clocks.size(), Rational(0));
    }

    auto fail = [&](int step, std::string why) {
        result.ok = false;
        result.failed_step = step;
        result.failure = std::move(why);
        return result;
    };

    for (std::size_t ai = 0; ai < n.automata.size(); ++ai) {
        const Automaton& a = n.automata[ai];
        for (const auto& atom : a.locations[cur.locations[ai]].invariant)
            if (!atom_holds_exact(atom, cur.clocks[ai]))
                return fail(0, "initial state violates invariant " + atom_text(a, atom) + " of " +
                                   a.name + "." + a.locations[cur.locations[ai]].name);
    }
    result.trajectory.push_back(cur);

    for (std::size_t si = 0; si < witness.size(); ++si) {
        const WitnessStep& step = witness[si];
        int step_no = static_cast<int>(si) + 1;

        if (step.delay < Rational(0)) return fail(step_no, "negative delay");

        // Delay phase. Constraints are closed, so checking the endpoint
        // suffices for upper bounds; lower bounds persist once established.
        for (std::size_t ai = 0; ai < n.automata.size(); ++ai)
            for (auto& v : cur.clocks[ai]) v = v + step.delay;
        cur.time = cur.time + step.delay;
        for (std::size_t ai = 0; ai < n.automata.size(); ++ai) {
            const Automaton& a = n.automata[ai];
            for (const auto& atom : a.locations[cur.locations[ai]].invariant)
                if (!atom_holds_exact(atom, cur.clocks[ai]))
                    return fail(step_no, "invariant " + atom_text(a, atom) + " of " + a.name +
                                             "." + a.locations[cur.locations[ai]].name +
                                             " violated during delay");
        }

        if (step.fired.empty()) {
            if (!step.channel.empty())
                return fail(step_no, "channel '" + step.channel + "' named but no edges fired");
            result.trajectory.push_back(cur);
            continue;
        }

        // Resolve fired edges; at most one per automaton.
        std::map<int, int> fired;  // automaton -> edge
        for (const auto& address : step.fired) {
            auto [ai, ei] = resolve_network_edge(n, address);
            if (fired.count(ai))
                return fail(step_no, "two edges fired in automaton '" + n.automata[ai].name + "'");
            if (n.automata[ai].edges[ei].source != cur.locations[ai])
                return fail(step_no, "edge " + address + " does not start at the current location");
            fired[ai] = ei;
        }

        // Sync structure.
        int sender = -1;
        std::vector<int> receivers;
        for (const auto& [ai, ei] : fired) {
            const Action& act = n.automata[ai].edges[ei].action;
            if (act.kind == ActionKind::Internal) {
                if (fired.size() != 1)
                    return fail(step_no, "internal edge fired together with other edges");
                if (!step.channel.empty())
                    return fail(step_no, "internal step must not name a channel");
            } else {
                if (act.channel != step.channel)
                    return fail(step_no, "edge channel '" + act.channel +
                                             "' does not match step channel '" + step.channel +
                                             "'");
                if (act.kind == ActionKind::Send) {
                    if (sender >= 0) return fail(step_no, "two senders in one step");
                    sender = ai;
                } else {
                    receivers.push_back(ai);
                }
            }
        }
        if (!step.channel.empty()) {
            const ChannelDecl* decl = n.find_channel(step.channel);
            if (!decl) return fail(step_no, "undeclared channel '" + step.channel + "'");
            if (sender < 0) return fail(step_no, "sync step without a sender");
            if (decl->kind == ChannelKind::Binary && receivers.size() != 1)
                return fail(step_no, "binary sync requires exactly one receiver");
            if (decl->kind == ChannelKind::Broadcast) {
                // Maximal participation: every automaton with an enabled
                // receiving edge must be part of the step.
                for (std::size_t aj = 0; aj < n.automata.size(); ++aj) {
                    if (static_cast<int>(aj) == sender || fired.count(static_cast<int>(aj)))
                        continue;
                    const Automaton& b = n.automata[aj];
                    for (const auto& e : b.edges) {
                        if (e.source != cur.locations[aj] ||
                            e.action.kind != ActionKind::Receive ||
                            e.action.channel != step.channel)
                            continue;
                        bool enabled = true;
                        for (const auto& atom : e.guard)
                            if (!atom_holds_exact(atom, cur.clocks[aj])) enabled = false;
                        if (enabled)
                            return fail(step_no, "broadcast on '" + step.channel +
                                                     "' omits enabled receiver '" + b.name + "'");
                    }
                }
            }
        }

        // Guards at the post-delay valuation.
        for (const auto& [ai, ei] : fired) {
            const Automaton& a = n.automata[ai];
            for (const auto& atom : a.edges[ei].guard)
                if (!atom_holds_exact(atom, cur.clocks[ai]))
                    return fail(step_no, "guard " + atom_text(a, atom) + " of " +
                                             edge_address(a, ei) + " violated");
        }

        // Resets, then target invariants.
        for (const auto& [ai, ei] : fired) {
            const Automaton& a = n.automata[ai];
            const Edge& e = a.edges[ei];
            for (int r : e.resets) cur.clocks[ai][r] = Rational(0);
            cur.locations[ai] = e.target;
            for (const auto& atom : a.locations[e.target].invariant)
                if (!atom_holds_exact(atom, cur.clocks[ai]))
                    return fail(step_no, "invariant " + atom_text(a, atom) + " of target " +
                                             a.name + "." + a.locations[e.target].name +
                                             " violated on entry");
        }

        result.trajectory.push_back(cur);
    }

    result.ok = true;
    return result;
}

TimedWord extract_timed_word(const Network& n, const Witness& witness) {
    std::vector<std::string> observable = n.observable_channels();
    TimedWord word;
    Rational now(0);
    for (const auto& step : witness) {
        now = now + step.delay;
        if (step.channel.empty()) continue;
        std::uint32_t bit = channel_bit(observable, step.channel);
        if (bit == 0) continue;
        if (!word.entries.empty() && word.entries.back().time == now)
            word.entries.back().bits |= bit;
        else
            word.entries.push_back({now, bit});
    }
    return word;
}

}  // namespace tamc
