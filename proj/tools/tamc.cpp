// tamc — model checking with environment abstraction for timed automata.
//
// Subcommands wire the library into the intended workflow: single closed-loop
// checks, rule application, abstraction-tree construction and traversal,
// refinement proposals, bounded-oracle spot checks and the randomized
// self-test suite.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tamc/checker.hpp"
#include "tamc/generator.hpp"
#include "tamc/parser.hpp"
#include "tamc/report.hpp"
#include "tamc/rules.hpp"
#include "tamc/tree.hpp"

namespace fs = std::filesystem;
using namespace tamc;

namespace {

constexpr const char* kVersion = "tamc 1.0.0 (report schema 1, tree schema 1)";

int exit_code_for(const Error& err) {
    switch (err.kind()) {
        case ErrorKind::Resource: return 3;
        default: return 2;
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Usage, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Usage, "cannot write '" + path + "'");
    out << content;
}

Network load_model(const std::string& path) {
    ParsedModel parsed = parse_model(read_file(path), path);
    for (const auto& d : parsed.diagnostics)
        if (d.severity != Severity::Info) std::cerr << d.str() << "\n";
    if (!parsed.ok()) throw Error(ErrorKind::Parse, "model '" + path + "' has errors");
    return parsed.network;
}

SafetyProperty load_property(const std::string& path) {
    return parse_property(read_file(path), path);
}

std::size_t default_max_states() {
    if (const char* env = std::getenv("TAMC_MAX_STATES")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        std::cerr << "warning: ignoring malformed TAMC_MAX_STATES='" << env << "'\n";
    }
    return 1000000;
}

// "ADDRESS CLOCK DELTA" triplets from repeated --guard-delta/--inv-delta.
std::tuple<std::string, std::string, int> parse_delta_spec(const std::string& spec) {
    std::istringstream in(spec);
    std::string address, clock;
    int delta = -1;
    in >> address >> clock >> delta;
    if (address.empty() || clock.empty() || delta < 0 || !in.eof())
        throw Error(ErrorKind::Usage,
                    "malformed delta '" + spec + "', expected 'ADDRESS CLOCK NONNEG'");
    return {address, clock, delta};
}

const Automaton& select_automaton(const Network& n, const std::string& name,
                                  const std::string& path) {
    if (!name.empty()) {
        int i = n.automaton_index(name);
        if (i < 0)
            throw Error(ErrorKind::Usage, "no automaton '" + name + "' in '" + path + "'");
        return n.automata[i];
    }
    if (n.automata.size() != 1)
        throw Error(ErrorKind::Usage,
                    "'" + path + "' declares several automata; pick one with --automaton");
    return n.automata.front();
}

std::map<std::string, BaseInput> load_bases(const std::vector<RuleApplication>& plan,
                                            const fs::path& plan_dir) {
    std::map<std::string, BaseInput> bases;
    for (const auto& step : plan) {
        if (step.rule != RuleKind::Base || bases.count(step.file)) continue;
        fs::path path = fs::path(step.file).is_absolute() ? fs::path(step.file)
                                                          : plan_dir / step.file;
        Network net = load_model(path.string());
        if (net.automata.size() != 1)
            throw Error(ErrorKind::Prerequisite,
                        "base model '" + step.file + "' must declare exactly one automaton");
        bases[step.file] = {net.automata.front(), net.channels};
    }
    return bases;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Timed-automata model checking with environment abstraction"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::size_t max_states = default_max_states();

    // ----- check ----------------------------------------------------------
    auto* cmd_check = app.add_subcommand("check", "Check one closed-loop model");
    std::string check_model, check_prop, check_report;
    cmd_check->add_option("model", check_model, "model file (.ta)")->required();
    cmd_check->add_option("property", check_prop, "property file (.prop)")->required();
    cmd_check->add_option("--report", check_report, "write a JSON report here");
    cmd_check->add_option("--max-states", max_states, "state cap");

    // ----- abstract -------------------------------------------------------
    auto* cmd_abs = app.add_subcommand("abstract", "Apply one abstraction rule");
    std::string abs_model, abs_rule, abs_out, abs_automaton, abs_with, abs_channel;
    std::vector<std::string> abs_guard_deltas, abs_inv_deltas;
    cmd_abs->add_option("model", abs_model, "model file (.ta)")->required();
    cmd_abs->add_option("--rule", abs_rule, "r1, r2 or r3")->required();
    cmd_abs->add_option("-o,--output", abs_out, "output model file")->required();
    cmd_abs->add_option("--automaton", abs_automaton, "automaton to abstract");
    cmd_abs->add_option("--guard-delta", abs_guard_deltas,
                        "r1: 'EDGEADDR CLOCK DELTA' (lowers the bound)");
    cmd_abs->add_option("--inv-delta", abs_inv_deltas,
                        "r1: 'AUT.LOC CLOCK DELTA' (raises the bound)");
    cmd_abs->add_option("--with", abs_with, "r2: second model file");
    cmd_abs->add_option("--channel", abs_channel, "r3: broadcast channel to erase");

    // ----- tree -----------------------------------------------------------
    auto* cmd_tree = app.add_subcommand("tree", "Abstraction-tree workflows");
    cmd_tree->require_subcommand(1);
    auto* cmd_build = cmd_tree->add_subcommand("build", "Materialize a plan into a tree");
    std::string build_plan, build_out;
    cmd_build->add_option("plan", build_plan, "plan file (.plan)")->required();
    cmd_build->add_option("-o,--output", build_out, "tree file (.json)")->required();

    auto* cmd_trav = cmd_tree->add_subcommand("traverse", "BFS model checking over a tree");
    std::string trav_tree, trav_system, trav_prop, trav_report, trav_save;
    int trav_jobs = 1;
    bool trav_force = false;
    cmd_trav->add_option("tree", trav_tree, "tree file (.json)")->required();
    cmd_trav->add_option("system", trav_system, "system + fixed environment (.ta)")->required();
    cmd_trav->add_option("property", trav_prop, "property file (.prop)")->required();
    cmd_trav->add_option("--report", trav_report, "write a JSON report here");
    cmd_trav->add_option("--save-tree", trav_save, "write the annotated tree here");
    cmd_trav->add_option("--jobs", trav_jobs, "worker threads per tree level");
    cmd_trav->add_flag("--force-all", trav_force, "check every node (disable pruning)");
    cmd_trav->add_option("--max-states", max_states, "state cap per node");

    // ----- refine ---------------------------------------------------------
    auto* cmd_refine = app.add_subcommand("refine", "Propose base models by subtraction");
    std::string refine_tree, refine_node_id, refine_dir;
    cmd_refine->add_option("tree", refine_tree, "annotated tree file (.json)")->required();
    cmd_refine->add_option("node", refine_node_id, "violated node id")->required();
    cmd_refine->add_option("-o,--output", refine_dir, "output directory")->required();

    // ----- oracle ---------------------------------------------------------
    auto* cmd_oracle = app.add_subcommand("oracle", "Bounded-horizon oracle checks");
    cmd_oracle->require_subcommand(1);
    auto* cmd_incl = cmd_oracle->add_subcommand("include", "Bounded language inclusion");
    std::string incl_a, incl_b, incl_horizon = "10", incl_step = "1";
    cmd_incl->add_option("first", incl_a, "model file (.ta)")->required();
    cmd_incl->add_option("second", incl_b, "model file (.ta)")->required();
    cmd_incl->add_option("--horizon", incl_horizon, "time horizon (rational)");
    cmd_incl->add_option("--step", incl_step, "granularity, a unit fraction like 1/2");

    // ----- selftest -------------------------------------------------------
    auto* cmd_self = app.add_subcommand("selftest", "Randomized theorem suite");
    int self_trials = 500;
    std::uint64_t self_seed = 0;
    cmd_self->add_option("--trials", self_trials, "trials per rule");
    cmd_self->add_option("--seed", self_seed, "base seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_check) {
            Network net = load_model(check_model);
            SafetyProperty prop = load_property(check_prop);
            CheckOptions options;
            options.max_states = max_states;
            Verdict verdict = check_safety(net, prop, options);
            std::cout << write_check_report(net, prop, verdict, "text");
            if (!check_report.empty())
                write_file(check_report, write_check_report(net, prop, verdict, "json"));
            return verdict.violated() ? 1 : 0;
        }

        if (*cmd_abs) {
            Network net = load_model(abs_model);
            if (abs_rule == "r1") {
                DeltaVector deltas;
                for (const auto& spec : abs_guard_deltas) {
                    auto [address, clock, delta] = parse_delta_spec(spec);
                    deltas.guard_deltas[address][clock] += delta;
                }
                for (const auto& spec : abs_inv_deltas) {
                    auto [address, clock, delta] = parse_delta_spec(spec);
                    deltas.inv_deltas[address][clock] += delta;
                }
                const Automaton& target = select_automaton(net, abs_automaton, abs_model);
                Automaton widened = apply_r1(target, deltas);
                Network out = net;
                out.automata[net.automaton_index(target.name)] = widened;
                write_file(abs_out, unparse_model(out));
            } else if (abs_rule == "r2") {
                if (abs_with.empty())
                    throw Error(ErrorKind::Usage, "r2 needs --with SECOND.ta");
                Network other = load_model(abs_with);
                const Automaton& a1 = select_automaton(net, abs_automaton, abs_model);
                const Automaton& a2 = select_automaton(other, abs_automaton, abs_with);
                Automaton merged = apply_r2(a1, a2);
                Network out = net;
                out.automata[net.automaton_index(a1.name)] = merged;
                write_file(abs_out, unparse_model(out));
            } else if (abs_rule == "r3") {
                if (abs_channel.empty())
                    throw Error(ErrorKind::Usage, "r3 needs --channel NAME");
                write_file(abs_out, unparse_model(apply_r3(net, abs_channel)));
            } else {
                throw Error(ErrorKind::Usage, "unknown rule '" + abs_rule + "'");
            }
            return 0;
        }

        if (*cmd_build) {
            auto plan = parse_plan(read_file(build_plan), build_plan);
            auto bases = load_bases(plan, fs::path(build_plan).parent_path());
            AbstractionTree tree = build_tree(plan, bases);
            write_file(build_out, tree_to_text(tree));
            std::cout << "tree: " << tree.nodes.size() << " nodes, root " << tree.root << "\n";
            return 0;
        }

        if (*cmd_trav) {
            AbstractionTree tree = tree_from_text(read_file(trav_tree), trav_tree);
            Network context = load_model(trav_system);
            SafetyProperty prop = load_property(trav_prop);
            TraversalOptions options;
            options.check.max_states = max_states;
            options.jobs = trav_jobs;
            options.force_check_all = trav_force;
            TraversalReport report = traverse_bfs(tree, context, prop, options);
            std::cout << write_traversal_report(tree, prop, report, "text");
            if (!trav_report.empty())
                write_file(trav_report, write_traversal_report(tree, prop, report, "json"));
            if (!trav_save.empty()) write_file(trav_save, tree_to_text(tree));
            bool any_violated = false;
            for (const auto& v : report.verdicts)
                if (v.verdict == VerdictKind::Violated) any_violated = true;
            return any_violated ? 1 : 0;
        }

        if (*cmd_refine) {
            AbstractionTree tree = tree_from_text(read_file(refine_tree), refine_tree);
            auto proposals = refine_node(tree, refine_node_id);
            fs::create_directories(refine_dir);
            for (std::size_t i = 0; i < proposals.size(); ++i) {
                Network out;
                out.channels = tree.channels;
                out.automata.push_back(proposals[i].model);
                std::string name =
                    refine_node_id + "_refine_" + std::to_string(i) + ".ta";
                write_file((fs::path(refine_dir) / name).string(), unparse_model(out));
                std::cout << name << ":";
                for (const auto& dim : proposals[i].dimensions)
                    std::cout << ' ' << dim.edge << ' ' << dim.clock << ' ' << dim.piece.str();
                std::cout << "\n";
            }
            if (proposals.empty())
                std::cout << "children tile the node; nothing to propose\n";
            return 0;
        }

        if (*cmd_incl) {
            Network a = load_model(incl_a);
            Network b = load_model(incl_b);
            Rational horizon = Rational::parse(incl_horizon);
            Rational step = Rational::parse(incl_step);
            OracleCaps caps{max_states};
            InclusionResult result = bounded_inclusion(a, b, horizon, step, caps);
            if (result.included) {
                std::cout << "included up to horizon " << horizon.str() << " at step "
                          << step.str() << "\n";
                return 0;
            }
            std::cout << "not included; witness word "
                      << result.witness->str(a.observable_channels()) << "\n";
            return 1;
        }

        if (*cmd_self) {
            GenConfig cfg;
            cfg.seed = self_seed;
            TheoremSummary summary = theorem_suite(cfg, self_trials, &std::cerr);
            std::cout << "r1: " << (summary.r1_failures == 0 ? "pass" : "FAIL") << "\n"
                      << "r2: " << (summary.r2_failures == 0 ? "pass" : "FAIL") << "\n"
                      << "r3: " << (summary.r3_failures == 0 ? "pass" : "FAIL") << "\n"
                      << "simulation=>inclusion: "
                      << (summary.sim_implies_incl_failures == 0 ? "pass" : "FAIL") << "\n"
                      << "mutation control: "
                      << (summary.mutation_inclusion_failures >= 1 ? "pass" : "FAIL") << " ("
                      << summary.mutation_inclusion_failures << " induced failures)\n";
            for (const auto& note : summary.failure_notes) std::cout << "note: " << note << "\n";
            return summary.ok() ? 0 : 1;
        }
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return exit_code_for(err);
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << "\n";
        return 2;
    }

    return 2;
}
