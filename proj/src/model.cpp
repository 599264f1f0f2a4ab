#include "tamc/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tamc {

int Automaton::location_index(const std::string& loc_name) const {
    for (std::size_t i = 0; i < locations.size(); ++i)
        if (locations[i].name == loc_name) return static_cast<int>(i);
    return -1;
}

int Automaton::clock_index(const std::string& clock_name) const {
    for (std::size_t i = 0; i < clocks.size(); ++i)
        if (clocks[i] == clock_name) return static_cast<int>(i);
    return -1;
}

int Network::automaton_index(const std::string& name) const {
    for (std::size_t i = 0; i < automata.size(); ++i)
        if (automata[i].name == name) return static_cast<int>(i);
    return -1;
}

const ChannelDecl* Network::find_channel(const std::string& name) const {
    for (const auto& c : channels)
        if (c.name == name) return &c;
    return nullptr;
}

bool Network::is_system(int automaton_idx) const {
    const std::string& name = automata[automaton_idx].name;
    return std::find(system.begin(), system.end(), name) != system.end();
}

std::vector<std::string> Network::observable_channels() const {
    std::vector<std::string> out;
    for (const auto& c : channels)
        if (c.observable) out.push_back(c.name);
    return out;
}

// ---------------------------------------------------------------------------
// Edge addressing
// ---------------------------------------------------------------------------

std::string edge_address(const Automaton& a, int edge_idx) {
    const Edge& e = a.edges.at(edge_idx);
    int ordinal = 0;
    for (int i = 0; i < edge_idx; ++i)
        if (a.edges[i].source == e.source && a.edges[i].target == e.target) ++ordinal;
    std::ostringstream oss;
    oss << a.name << '.' << a.locations.at(e.source).name << "->"
        << a.locations.at(e.target).name << '#' << ordinal;
    return oss.str();
}

int resolve_edge_address(const Automaton& a, const std::string& address) {
    auto dot = address.find('.');
    auto arrow = address.find("->");
    auto hash = address.rfind('#');
    if (dot == std::string::npos || arrow == std::string::npos || hash == std::string::npos ||
        !(dot < arrow && arrow < hash))
        throw Error(ErrorKind::Address, "malformed edge address '" + address + "'");

    std::string automaton = address.substr(0, dot);
    std::string source = address.substr(dot + 1, arrow - dot - 1);
    std::string target = address.substr(arrow + 2, hash - arrow - 2);
    int ordinal = -1;
    try {
        ordinal = std::stoi(address.substr(hash + 1));
    } catch (const std::exception&) {
        throw Error(ErrorKind::Address, "malformed edge ordinal in '" + address + "'");
    }

    if (automaton != a.name)
        throw Error(ErrorKind::Address,
                    "edge address '" + address + "' names automaton '" + automaton +
                        "', expected '" + a.name + "'");
    int src = a.location_index(source);
    int tgt = a.location_index(target);
    if (src < 0 || tgt < 0)
        throw Error(ErrorKind::Address, "edge address '" + address + "' names unknown locations");

    int seen = 0;
    for (std::size_t i = 0; i < a.edges.size(); ++i) {
        if (a.edges[i].source == src && a.edges[i].target == tgt) {
            if (seen == ordinal) return static_cast<int>(i);
            ++seen;
        }
    }
    throw Error(ErrorKind::Address, "no edge matches address '" + address + "'");
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

// Reduces a conjunction to one atom per clock: guards keep the max lower
// bound, invariants the min upper bound. Result ordered by clock index.
std::vector<ClockAtom> normalize_conjunction(const std::vector<ClockAtom>& atoms, CmpOp expected,
                                             bool drop_zero_lower, bool* reduced) {
    std::map<int, int> best;
    for (const auto& atom : atoms) {
        auto it = best.find(atom.clock);
        if (it == best.end()) {
            best[atom.clock] = atom.bound;
        } else {
            *reduced = true;
            it->second = expected == CmpOp::Ge ? std::max(it->second, atom.bound)
                                               : std::min(it->second, atom.bound);
        }
    }
    std::vector<ClockAtom> out;
    for (const auto& [clock, bound] : best) {
        if (drop_zero_lower && expected == CmpOp::Ge && bound == 0) {
            *reduced = *reduced || true;
            continue;
        }
        out.push_back({clock, expected, bound});
    }
    return out;
}

bool mixed_ops(const std::vector<ClockAtom>& atoms, CmpOp expected) {
    for (const auto& a : atoms)
        if (a.op != expected) return true;
    return false;
}

std::string atom_str(const Automaton& a, const ClockAtom& atom) {
    std::string clock = atom.clock >= 0 && atom.clock < static_cast<int>(a.clocks.size())
                            ? a.clocks[atom.clock]
                            : "<clock#" + std::to_string(atom.clock) + ">";
    return clock + (atom.op == CmpOp::Ge ? " >= " : " <= ") + std::to_string(atom.bound);
}

}  // namespace

ValidationResult validate_automaton(const Automaton& a) {
    ValidationResult result;
    result.normalized = a;
    auto& diags = result.diagnostics;
    auto error = [&](std::string msg, std::string address) {
        diags.push_back({Severity::Error, std::move(msg), std::nullopt, std::move(address)});
    };

    std::set<std::string> seen_locations;
    for (const auto& loc : a.locations) {
        if (!seen_locations.insert(loc.name).second)
            error("duplicate location name '" + loc.name + "'", a.name);
    }
    if (a.initial < 0 || a.initial >= static_cast<int>(a.locations.size()))
        error("initial location out of range", a.name);
    std::set<std::string> seen_clocks;
    for (const auto& c : a.clocks) {
        if (!seen_clocks.insert(c).second) error("duplicate clock name '" + c + "'", a.name);
    }

    auto check_atoms = [&](const std::vector<ClockAtom>& atoms, const std::string& where) {
        for (const auto& atom : atoms) {
            if (atom.clock < 0 || atom.clock >= static_cast<int>(a.clocks.size()))
                error("constraint uses undeclared clock", where);
            if (atom.bound < 0)
                error("negative bound in " + atom_str(a, atom), where);
        }
    };

    for (std::size_t li = 0; li < a.locations.size(); ++li) {
        auto& loc = result.normalized.locations[li];
        check_atoms(loc.invariant, a.name + "." + loc.name);
        bool reduced = false;
        // Invariants may legitimately mix ops on system automata; only
        // same-op duplicates are merged here.
        if (!mixed_ops(loc.invariant, CmpOp::Le)) {
            loc.invariant = normalize_conjunction(loc.invariant, CmpOp::Le, false, &reduced);
            if (reduced)
                diags.push_back({Severity::Info,
                                 "duplicate invariant atoms reduced to the tightest bound",
                                 std::nullopt, a.name + "." + loc.name});
        }
    }

    for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
        const Edge& e = a.edges[ei];
        std::string address = e.source >= 0 && e.source < static_cast<int>(a.locations.size()) &&
                                      e.target >= 0 && e.target < static_cast<int>(a.locations.size())
                                  ? edge_address(a, static_cast<int>(ei))
                                  : a.name + ".edge#" + std::to_string(ei);
        if (e.source < 0 || e.source >= static_cast<int>(a.locations.size()))
            error("edge source is not a declared location", address);
        if (e.target < 0 || e.target >= static_cast<int>(a.locations.size()))
            error("edge target is not a declared location", address);
        for (int r : e.resets)
            if (r < 0 || r >= static_cast<int>(a.clocks.size()))
                error("reset of undeclared clock", address);
        if ((e.action.kind == ActionKind::Internal) != e.action.channel.empty())
            error("action channel must be present iff the action is a send or receive", address);
        check_atoms(e.guard, address);

        auto& edge = result.normalized.edges[ei];
        std::sort(edge.resets.begin(), edge.resets.end());
        edge.resets.erase(std::unique(edge.resets.begin(), edge.resets.end()), edge.resets.end());
        if (!mixed_ops(edge.guard, CmpOp::Ge)) {
            bool reduced = false;
            edge.guard = normalize_conjunction(edge.guard, CmpOp::Ge, true, &reduced);
            if (reduced)
                diags.push_back({Severity::Info,
                                 "guard atoms reduced to the strongest lower bound", std::nullopt,
                                 address});
        }
    }

    return result;
}

NetworkValidationResult validate_network(const Network& n) {
    NetworkValidationResult result;
    result.normalized = n;
    auto& diags = result.diagnostics;
    auto error = [&](std::string msg, std::string address) {
        diags.push_back({Severity::Error, std::move(msg), std::nullopt, std::move(address)});
    };

    std::set<std::string> names;
    for (const auto& a : n.automata)
        if (!names.insert(a.name).second)
            error("duplicate automaton name '" + a.name + "'", a.name);
    std::set<std::string> channel_names;
    for (const auto& c : n.channels)
        if (!channel_names.insert(c.name).second)
            error("duplicate channel declaration '" + c.name + "'", c.name);
    for (const auto& s : n.system)
        if (n.automaton_index(s) < 0)
            error("system marker names unknown automaton '" + s + "'", s);

    for (std::size_t ai = 0; ai < n.automata.size(); ++ai) {
        auto sub = validate_automaton(n.automata[ai]);
        result.normalized.automata[ai] = sub.normalized;
        for (auto& d : sub.diagnostics) diags.push_back(std::move(d));

        const Automaton& a = result.normalized.automata[ai];
        for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
            const Edge& e = a.edges[ei];
            if (e.action.kind == ActionKind::Internal) continue;
            const ChannelDecl* decl = n.find_channel(e.action.channel);
            std::string address = edge_address(a, static_cast<int>(ei));
            if (!decl) {
                error("edge references undeclared channel '" + e.action.channel + "'", address);
                continue;
            }
            if (decl->kind == ChannelKind::Broadcast && e.action.kind == ActionKind::Receive &&
                !e.guard.empty())
                error("receiving edge on broadcast channel '" + decl->name +
                          "' must not carry a guard",
                      address);
        }
    }

    return result;
}

// ---------------------------------------------------------------------------
// Enabled intervals, applicability
// ---------------------------------------------------------------------------

std::map<int, ClockInterval> enabled_interval(const Automaton& a, const std::string& edge_addr) {
    int ei = resolve_edge_address(a, edge_addr);
    const Edge& e = a.edges[ei];

    for (const auto& atom : e.guard)
        if (atom.op != CmpOp::Ge)
            throw Error(ErrorKind::Shape, "guard atom '" + atom_str(a, atom) + "' on " +
                                              edge_addr + " is not a lower bound");
    const Location& src = a.locations[e.source];
    for (const auto& atom : src.invariant)
        if (atom.op != CmpOp::Le)
            throw Error(ErrorKind::Shape, "invariant atom '" + atom_str(a, atom) + "' on " +
                                              a.name + "." + src.name + " is not an upper bound");

    std::map<int, ClockInterval> out;
    for (std::size_t c = 0; c < a.clocks.size(); ++c) out[static_cast<int>(c)] = ClockInterval{};
    for (const auto& atom : e.guard) out[atom.clock].lower = atom.bound;
    for (const auto& atom : src.invariant) out[atom.clock].upper = atom.bound;
    return out;
}

ApplicabilityResult check_applicability(const Network& n) {
    ApplicabilityResult result;
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai) {
        if (n.is_system(static_cast<int>(ai))) continue;
        const Automaton& a = n.automata[ai];
        for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
            std::string address = edge_address(a, static_cast<int>(ei));
            std::map<int, ClockInterval> intervals;
            try {
                intervals = enabled_interval(a, address);
            } catch (const Error& err) {
                result.diagnostics.push_back(
                    {Severity::Error, std::string(err.what()), std::nullopt, address});
                continue;
            }
            for (const auto& [clock, iv] : intervals) {
                if (iv.upper && *iv.upper < iv.lower) {
                    result.diagnostics.push_back(
                        {Severity::Error,
                         "edge is dead: enabled interval [" + std::to_string(iv.lower) + "," +
                             std::to_string(*iv.upper) + "] is empty for clock " + a.clocks[clock],
                         std::nullopt, address});
                    continue;
                }
                result.report.entries.push_back(
                    {address, a.clocks[clock], iv.lower, iv.upper});
            }
        }
    }
    if (has_errors(result.diagnostics)) result.report.entries.clear();
    return result;
}

// ---------------------------------------------------------------------------
// Structural comparison
// ---------------------------------------------------------------------------

std::optional<std::string> structure_mismatch(const Automaton& a1, const Automaton& a2) {
    if (a1.clocks != a2.clocks) return "clock lists differ";
    if (a1.locations.size() != a2.locations.size()) return "location counts differ";
    for (std::size_t i = 0; i < a1.locations.size(); ++i) {
        if (a1.locations[i].name != a2.locations[i].name)
            return "location #" + std::to_string(i) + " names differ ('" + a1.locations[i].name +
                   "' vs '" + a2.locations[i].name + "')";
        // Invariant upper bounds are erased; only the set of *constrained*
        // clocks might differ, and that is also part of M (absent = infinity),
        // so it is erased as well.
    }
    if (a1.initial != a2.initial) return "initial locations differ";
    if (a1.edges.size() != a2.edges.size()) return "edge counts differ";
    for (std::size_t i = 0; i < a1.edges.size(); ++i) {
        const Edge& e1 = a1.edges[i];
        const Edge& e2 = a2.edges[i];
        std::string where = "edge #" + std::to_string(i);
        if (e1.source != e2.source || e1.target != e2.target) return where + ": endpoints differ";
        if (e1.action != e2.action) return where + ": actions differ";
        if (e1.resets != e2.resets) return where + ": reset sets differ";
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Constants
// ---------------------------------------------------------------------------

std::vector<std::vector<int>> max_constants(const Network& n) {
    std::vector<std::vector<int>> out;
    for (const auto& a : n.automata) {
        std::vector<int> per_clock(a.clocks.size(), 0);
        auto scan = [&](const std::vector<ClockAtom>& atoms) {
            for (const auto& atom : atoms)
                if (atom.clock >= 0 && atom.clock < static_cast<int>(per_clock.size()))
                    per_clock[atom.clock] = std::max(per_clock[atom.clock], atom.bound);
        };
        for (const auto& loc : a.locations) scan(loc.invariant);
        for (const auto& e : a.edges) scan(e.guard);
        out.push_back(std::move(per_clock));
    }
    return out;
}

int max_constant(const Network& n) {
    int m = 0;
    for (const auto& per_automaton : max_constants(n))
        for (int v : per_automaton) m = std::max(m, v);
    return m;
}

Network compose(const Network& context, const Automaton& extra) {
    if (context.automaton_index(extra.name) >= 0)
        throw Error(ErrorKind::Prerequisite,
                    "cannot compose: automaton '" + extra.name + "' already present");
    Network out = context;
    out.automata.push_back(extra);
    return out;
}

}  // namespace tamc
