#include "tamc/report.hpp"

#include <sstream>

#include <json.hpp>

namespace tamc {

using json = nlohmann::ordered_json;

namespace {

json rational_json(const Rational& r) { return json{{"num", r.num}, {"den", r.den}}; }

Rational rational_from(const json& j) {
    return Rational(j.at("num").get<std::int64_t>(), j.at("den").get<std::int64_t>());
}

json atoms_json(const Automaton& a, const std::vector<ClockAtom>& atoms) {
    json out = json::array();
    for (const auto& atom : atoms)
        out.push_back(json{{"clock", a.clocks[atom.clock]},
                           {"op", atom.op == CmpOp::Ge ? ">=" : "<="},
                           {"bound", atom.bound}});
    return out;
}

std::vector<ClockAtom> atoms_from(const Automaton& a, const json& j) {
    std::vector<ClockAtom> atoms;
    for (const auto& item : j) {
        ClockAtom atom;
        atom.clock = a.clock_index(item.at("clock").get<std::string>());
        atom.op = item.at("op").get<std::string>() == ">=" ? CmpOp::Ge : CmpOp::Le;
        atom.bound = item.at("bound").get<int>();
        atoms.push_back(atom);
    }
    return atoms;
}

json automaton_json(const Automaton& a) {
    json out;
    out["name"] = a.name;
    out["clocks"] = a.clocks;
    out["init"] = a.locations.at(a.initial).name;
    out["locations"] = json::array();
    for (const auto& loc : a.locations)
        out["locations"].push_back(
            json{{"name", loc.name}, {"invariant", atoms_json(a, loc.invariant)}});
    out["edges"] = json::array();
    for (const auto& e : a.edges) {
        json edge;
        edge["source"] = a.locations[e.source].name;
        edge["target"] = a.locations[e.target].name;
        switch (e.action.kind) {
            case ActionKind::Internal: edge["action"] = json{{"kind", "internal"}}; break;
            case ActionKind::Send:
                edge["action"] = json{{"kind", "send"}, {"channel", e.action.channel}};
                break;
            case ActionKind::Receive:
                edge["action"] = json{{"kind", "receive"}, {"channel", e.action.channel}};
                break;
        }
        edge["guard"] = atoms_json(a, e.guard);
        json resets = json::array();
        for (int r : e.resets) resets.push_back(a.clocks[r]);
        edge["resets"] = resets;
        out["edges"].push_back(std::move(edge));
    }
    return out;
}

Automaton automaton_from(const json& j) {
    Automaton a;
    a.name = j.at("name").get<std::string>();
    a.clocks = j.at("clocks").get<std::vector<std::string>>();
    for (const auto& loc : j.at("locations")) {
        Location l;
        l.name = loc.at("name").get<std::string>();
        a.locations.push_back(std::move(l));
    }
    for (std::size_t i = 0; i < a.locations.size(); ++i)
        a.locations[i].invariant = atoms_from(a, j.at("locations")[i].at("invariant"));
    a.initial = a.location_index(j.at("init").get<std::string>());
    if (a.initial < 0)
        throw Error(ErrorKind::Parse, "tree automaton '" + a.name + "' has an unknown init");
    for (const auto& e : j.at("edges")) {
        Edge edge;
        edge.source = a.location_index(e.at("source").get<std::string>());
        edge.target = a.location_index(e.at("target").get<std::string>());
        if (edge.source < 0 || edge.target < 0)
            throw Error(ErrorKind::Parse,
                        "tree automaton '" + a.name + "' edge names unknown locations");
        std::string kind = e.at("action").at("kind").get<std::string>();
        if (kind == "internal")
            edge.action = {ActionKind::Internal, ""};
        else
            edge.action = {kind == "send" ? ActionKind::Send : ActionKind::Receive,
                           e.at("action").at("channel").get<std::string>()};
        edge.guard = atoms_from(a, e.at("guard"));
        for (const auto& r : e.at("resets")) {
            int idx = a.clock_index(r.get<std::string>());
            if (idx < 0)
                throw Error(ErrorKind::Parse,
                            "tree automaton '" + a.name + "' resets an unknown clock");
            edge.resets.push_back(idx);
        }
        a.edges.push_back(std::move(edge));
    }
    return a;
}

json witness_json(const Witness& witness) {
    json out = json::array();
    for (const auto& step : witness) {
        json s;
        s["delay"] = rational_json(step.delay);
        s["fired"] = step.fired;
        s["channel"] = step.channel;
        out.push_back(std::move(s));
    }
    return out;
}

Witness witness_from(const json& j) {
    Witness witness;
    for (const auto& s : j) {
        WitnessStep step;
        step.delay = rational_from(s.at("delay"));
        step.fired = s.at("fired").get<std::vector<std::string>>();
        step.channel = s.at("channel").get<std::string>();
        witness.push_back(std::move(step));
    }
    return witness;
}

json word_json(const TimedWord& word, const std::vector<std::string>& channels) {
    json out;
    out["channels"] = channels;
    out["entries"] = json::array();
    for (const auto& entry : word.entries) {
        json sigma = json::array();
        for (std::size_t c = 0; c < channels.size(); ++c)
            sigma.push_back((entry.bits >> c) & 1u);
        out["entries"].push_back(json{{"time", rational_json(entry.time)}, {"sigma", sigma}});
    }
    return out;
}

TimedWord word_from(const json& j) {
    TimedWord word;
    for (const auto& entry : j.at("entries")) {
        WordEntry e;
        e.time = rational_from(entry.at("time"));
        const auto& sigma = entry.at("sigma");
        for (std::size_t c = 0; c < sigma.size(); ++c)
            if (sigma[c].get<int>()) e.bits |= 1u << c;
        word.entries.push_back(e);
    }
    return word;
}

json statistics_json(const CheckStatistics& stats) {
    // Wall time is deliberately omitted: reports are byte-stable across runs.
    return json{{"states_explored", stats.states_explored},
                {"peak_waiting", stats.peak_waiting}};
}

json counterexample_json(const CounterExample& ce, const std::vector<std::string>& channels) {
    json out;
    if (!ce.node.empty()) out["node"] = ce.node;
    out["witness"] = witness_json(ce.witness);
    out["word"] = word_json(ce.word, channels);
    return out;
}

CounterExample counterexample_from(const json& j) {
    CounterExample ce;
    if (j.contains("node")) ce.node = j.at("node").get<std::string>();
    ce.witness = witness_from(j.at("witness"));
    ce.word = word_from(j.at("word"));
    return ce;
}

std::string verdict_name(VerdictKind kind) {
    return kind == VerdictKind::Satisfied ? "satisfied" : "violated";
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string witness_text(const Witness& witness) {
    std::ostringstream os;
    Rational now(0);
    for (std::size_t i = 0; i < witness.size(); ++i) {
        const auto& step = witness[i];
        now = now + step.delay;
        os << "    step " << i + 1 << ": delay " << step.delay.str() << " (t=" << now.str()
           << ")";
        if (!step.channel.empty()) os << " sync " << step.channel;
        for (const auto& f : step.fired) os << ' ' << f;
        os << '\n';
    }
    return os.str();
}

}  // namespace

std::string write_check_report(const Network& n, const SafetyProperty& p, const Verdict& verdict,
                               const std::string& format) {
    std::vector<std::string> channels = n.observable_channels();
    if (format == "json") {
        json out;
        out["tamc-report"] = 1;
        out["kind"] = "check";
        out["property"] = p.str();
        out["verdict"] = verdict_name(verdict.kind);
        out["statistics"] = statistics_json(verdict.statistics);
        if (verdict.counterexample)
            out["counterexample"] = counterexample_json(*verdict.counterexample, channels);
        return dump(out);
    }
    if (format == "text") {
        std::ostringstream os;
        os << "property " << p.str() << ": " << verdict_name(verdict.kind) << '\n';
        os << "  states explored: " << verdict.statistics.states_explored
           << ", peak waiting: " << verdict.statistics.peak_waiting << '\n';
        if (verdict.counterexample) {
            os << "  witness:\n" << witness_text(verdict.counterexample->witness);
            os << "  observable word: " << verdict.counterexample->word.str(channels) << '\n';
        }
        return os.str();
    }
    throw Error(ErrorKind::Usage, "unknown report format '" + format + "'");
}

std::string write_traversal_report(const AbstractionTree& tree, const SafetyProperty& p,
                                   const TraversalReport& report, const std::string& format) {
    std::vector<std::string> channels;
    for (const auto& c : tree.channels)
        if (c.observable) channels.push_back(c.name);

    if (format == "json") {
        json out;
        out["tamc-report"] = 1;
        out["kind"] = "traverse";
        out["property"] = p.str();
        out["root"] = tree.root;
        out["visited"] = report.visited;
        out["verdicts"] = json::array();
        for (const auto& v : report.verdicts)
            out["verdicts"].push_back(json{{"node", v.id},
                                           {"verdict", verdict_name(v.verdict)},
                                           {"statistics", statistics_json(v.statistics)}});
        out["counterexamples"] = json::array();
        for (const auto& ce : report.counterexamples)
            out["counterexamples"].push_back(counterexample_json(ce, channels));
        out["pruned"] = report.pruned;
        return dump(out);
    }
    if (format == "text") {
        std::ostringstream os;
        os << "property " << p.str() << '\n';
        for (const auto& v : report.verdicts)
            os << "  " << v.id << ": " << verdict_name(v.verdict) << '\n';
        os << "counter-examples returned at " << report.counterexamples.size() << " node(s)\n";
        for (const auto& ce : report.counterexamples) {
            os << "  node " << ce.node << ":\n" << witness_text(ce.witness);
            os << "    observable word: " << ce.word.str(channels) << '\n';
        }
        if (!report.pruned.empty()) {
            os << "pruned:";
            for (const auto& id : report.pruned) os << ' ' << id;
            os << '\n';
        }
        return os.str();
    }
    throw Error(ErrorKind::Usage, "unknown report format '" + format + "'");
}

// ---------------------------------------------------------------------------
// Tree files
// ---------------------------------------------------------------------------

std::string tree_to_text(const AbstractionTree& tree) {
    json out;
    out["tamc-tree"] = 1;
    out["root"] = tree.root;
    out["channels"] = json::array();
    for (const auto& c : tree.channels)
        out["channels"].push_back(
            json{{"name", c.name},
                 {"kind", c.kind == ChannelKind::Broadcast ? "broadcast" : "binary"},
                 {"observable", c.observable}});
    std::vector<std::string> channels;
    for (const auto& c : tree.channels)
        if (c.observable) channels.push_back(c.name);

    out["nodes"] = json::array();
    for (const auto& node : tree.nodes) {
        json n;
        n["id"] = node.id;
        json prov;
        prov["rule"] = rule_kind_name(node.provenance.rule);
        switch (node.provenance.rule) {
            case RuleKind::Base: prov["file"] = node.provenance.file; break;
            case RuleKind::R1: {
                prov["inputs"] = node.provenance.inputs;
                json guard = json::object();
                for (const auto& [addr, per_clock] : node.provenance.deltas.guard_deltas)
                    guard[addr] = per_clock;
                json inv = json::object();
                for (const auto& [addr, per_clock] : node.provenance.deltas.inv_deltas)
                    inv[addr] = per_clock;
                prov["guard_deltas"] = guard;
                prov["inv_deltas"] = inv;
                break;
            }
            case RuleKind::R2: prov["inputs"] = node.provenance.inputs; break;
            case RuleKind::R3:
                prov["inputs"] = node.provenance.inputs;
                prov["channel"] = node.provenance.channel;
                break;
            case RuleKind::Subtract: prov["inputs"] = node.provenance.inputs; break;
        }
        n["provenance"] = std::move(prov);
        n["children"] = node.children;
        n["automaton"] = automaton_json(node.model);
        if (node.verdict) {
            n["verdict"] = verdict_name(*node.verdict);
            n["statistics"] = statistics_json(node.statistics);
        }
        if (node.counterexample)
            n["counterexample"] = counterexample_json(*node.counterexample, channels);
        out["nodes"].push_back(std::move(n));
    }
    return dump(out);
}

AbstractionTree tree_from_text(const std::string& text, const std::string& filename) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Parse, filename + ": not a valid tree file: " + e.what());
    }
    if (!j.contains("tamc-tree") || j.at("tamc-tree").get<int>() != 1)
        throw Error(ErrorKind::Parse, filename + ": missing or unsupported tamc-tree version");

    AbstractionTree tree;
    tree.root = j.at("root").get<std::string>();
    for (const auto& c : j.at("channels")) {
        ChannelDecl decl;
        decl.name = c.at("name").get<std::string>();
        decl.kind = c.at("kind").get<std::string>() == "broadcast" ? ChannelKind::Broadcast
                                                                   : ChannelKind::Binary;
        decl.observable = c.at("observable").get<bool>();
        tree.channels.push_back(std::move(decl));
    }
    for (const auto& n : j.at("nodes")) {
        TreeNode node;
        node.id = n.at("id").get<std::string>();
        const auto& prov = n.at("provenance");
        std::string rule = prov.at("rule").get<std::string>();
        if (rule == "base") {
            node.provenance.rule = RuleKind::Base;
            node.provenance.file = prov.at("file").get<std::string>();
        } else if (rule == "r1") {
            node.provenance.rule = RuleKind::R1;
            node.provenance.inputs = prov.at("inputs").get<std::vector<std::string>>();
            for (const auto& [addr, per_clock] : prov.at("guard_deltas").items())
                node.provenance.deltas.guard_deltas[addr] =
                    per_clock.get<std::map<std::string, int>>();
            for (const auto& [addr, per_clock] : prov.at("inv_deltas").items())
                node.provenance.deltas.inv_deltas[addr] =
                    per_clock.get<std::map<std::string, int>>();
        } else if (rule == "r2") {
            node.provenance.rule = RuleKind::R2;
            node.provenance.inputs = prov.at("inputs").get<std::vector<std::string>>();
        } else if (rule == "r3") {
            node.provenance.rule = RuleKind::R3;
            node.provenance.inputs = prov.at("inputs").get<std::vector<std::string>>();
            node.provenance.channel = prov.at("channel").get<std::string>();
        } else {
            throw Error(ErrorKind::Parse, filename + ": unknown rule '" + rule + "'");
        }
        node.provenance.output = node.id;
        node.children = n.at("children").get<std::vector<std::string>>();
        node.model = automaton_from(n.at("automaton"));
        if (n.contains("verdict"))
            node.verdict = n.at("verdict").get<std::string>() == "violated"
                               ? VerdictKind::Violated
                               : VerdictKind::Satisfied;
        if (n.contains("statistics")) {
            node.statistics.states_explored =
                n.at("statistics").at("states_explored").get<std::size_t>();
            node.statistics.peak_waiting =
                n.at("statistics").at("peak_waiting").get<std::size_t>();
        }
        if (n.contains("counterexample"))
            node.counterexample = counterexample_from(n.at("counterexample"));
        tree.nodes.push_back(std::move(node));
    }
    return tree;
}

}  // namespace tamc
