#include "tamc/tree.hpp"

#include <algorithm>
#include <set>
#include <thread>

namespace tamc {

int AbstractionTree::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id) return static_cast<int>(i);
    return -1;
}

const TreeNode& AbstractionTree::node(const std::string& id) const {
    int i = index_of(id);
    if (i < 0) throw Error(ErrorKind::Address, "unknown tree node '" + id + "'");
    return nodes[i];
}

TreeNode& AbstractionTree::node(const std::string& id) {
    int i = index_of(id);
    if (i < 0) throw Error(ErrorKind::Address, "unknown tree node '" + id + "'");
    return nodes[i];
}

// ---------------------------------------------------------------------------
// build_tree
// ---------------------------------------------------------------------------

namespace {

void merge_channels(std::vector<ChannelDecl>& into, const std::vector<ChannelDecl>& from,
                    const std::string& origin) {
    for (const auto& decl : from) {
        bool found = false;
        for (const auto& existing : into) {
            if (existing.name != decl.name) continue;
            found = true;
            if (existing.kind != decl.kind || existing.observable != decl.observable)
                throw Error(ErrorKind::Prerequisite,
                            "channel '" + decl.name + "' declared inconsistently by " + origin);
        }
        if (!found) into.push_back(decl);
    }
}

}  // namespace

AbstractionTree build_tree(const std::vector<RuleApplication>& plan,
                           const std::map<std::string, BaseInput>& bases) {
    AbstractionTree tree;
    auto step_error = [](std::size_t k, const std::string& msg) {
        return Error(ErrorKind::Prerequisite,
                     "plan step " + std::to_string(k + 1) + ": " + msg);
    };

    for (std::size_t k = 0; k < plan.size(); ++k) {
        const RuleApplication& app = plan[k];
        if (tree.index_of(app.output) >= 0)
            throw step_error(k, "node '" + app.output + "' already defined");

        TreeNode node;
        node.id = app.output;
        node.provenance = app;
        node.children = app.inputs;

        auto input_model = [&](const std::string& id) -> const Automaton& {
            int i = tree.index_of(id);
            if (i < 0) throw step_error(k, "reference to undefined node '" + id + "'");
            return tree.nodes[i].model;
        };

        try {
            switch (app.rule) {
                case RuleKind::Base: {
                    auto it = bases.find(app.file);
                    if (it == bases.end())
                        throw Error(ErrorKind::Prerequisite,
                                    "no base model loaded for '" + app.file + "'");
                    merge_channels(tree.channels, it->second.channels, "base '" + app.file + "'");
                    node.model = it->second.automaton;
                    break;
                }
                case RuleKind::R1:
                    node.model = apply_r1(input_model(app.inputs.at(0)), app.deltas);
                    break;
                case RuleKind::R2:
                    node.model =
                        apply_r2(input_model(app.inputs.at(0)), input_model(app.inputs.at(1)));
                    break;
                case RuleKind::R3: {
                    Network wrapper;
                    wrapper.channels = tree.channels;
                    wrapper.automata.push_back(input_model(app.inputs.at(0)));
                    Network transformed = apply_r3(wrapper, app.channel);
                    node.model = transformed.automata.at(0);
                    break;
                }
                case RuleKind::Subtract:
                    throw Error(ErrorKind::Prerequisite,
                                "subtraction is a refinement step, not a plan rule");
            }
        } catch (const Error& err) {
            if (err.kind() == ErrorKind::Prerequisite || err.kind() == ErrorKind::Address ||
                err.kind() == ErrorKind::Shape)
                throw step_error(k, err.what());
            throw;
        }

        tree.nodes.push_back(std::move(node));
    }

    if (tree.nodes.empty()) throw Error(ErrorKind::Prerequisite, "empty plan");

    // The root is the unique node never used as an input.
    std::set<std::string> used;
    for (const auto& node : tree.nodes)
        for (const auto& child : node.children) used.insert(child);
    std::vector<std::string> roots;
    for (const auto& node : tree.nodes)
        if (!used.count(node.id)) roots.push_back(node.id);
    if (roots.size() != 1) {
        std::string all;
        for (const auto& r : roots) all += (all.empty() ? "" : ", ") + r;
        throw Error(ErrorKind::Prerequisite,
                    "plan must produce exactly one root, found " + std::to_string(roots.size()) +
                        (all.empty() ? "" : " (" + all + ")"));
    }
    tree.root = roots.front();
    return tree;
}

// ---------------------------------------------------------------------------
// traverse_bfs
// ---------------------------------------------------------------------------

TraversalReport traverse_bfs(AbstractionTree& tree, const Network& context,
                             const SafetyProperty& property, const TraversalOptions& options) {
    TraversalReport report;
    std::set<std::string> enqueued;
    std::vector<std::string> level = {tree.root};
    enqueued.insert(tree.root);

    while (!level.empty()) {
        // Check the whole level, optionally with a worker pool. Results are
        // assembled in level order, so the report does not depend on `jobs`.
        std::vector<Verdict> verdicts(level.size());
        std::vector<std::exception_ptr> failures(level.size());
        auto check_one = [&](std::size_t i) {
            try {
                Network composed = compose(context, tree.node(level[i]).model);
                verdicts[i] = check_safety(composed, property, options.check);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        };
        int jobs = std::max(1, options.jobs);
        if (jobs == 1 || level.size() == 1) {
            for (std::size_t i = 0; i < level.size(); ++i) check_one(i);
        } else {
            for (std::size_t begin = 0; begin < level.size(); begin += jobs) {
                std::size_t end = std::min(level.size(), begin + jobs);
                std::vector<std::thread> workers;
                for (std::size_t i = begin; i < end; ++i)
                    workers.emplace_back(check_one, i);
                for (auto& w : workers) w.join();
            }
        }
        for (std::size_t i = 0; i < level.size(); ++i) {
            if (!failures[i]) continue;
            try {
                std::rethrow_exception(failures[i]);
            } catch (const Error& err) {
                throw Error(err.kind(),
                            "node '" + level[i] + "': " + err.what());
            }
        }

        std::vector<std::string> next;
        for (std::size_t i = 0; i < level.size(); ++i) {
            TreeNode& node = tree.node(level[i]);
            node.verdict = verdicts[i].kind;
            node.statistics = verdicts[i].statistics;
            if (verdicts[i].counterexample) {
                node.counterexample = std::move(verdicts[i].counterexample);
                node.counterexample->node = node.id;
            }
            report.visited.push_back(node.id);
            report.verdicts.push_back({node.id, verdicts[i].kind, verdicts[i].statistics});

            if (node.verdict == VerdictKind::Violated || options.force_check_all)
                for (const auto& child : node.children)
                    if (enqueued.insert(child).second) next.push_back(child);
        }

        // Within a level, nodes are visited in plan-declaration order.
        std::sort(next.begin(), next.end(), [&](const std::string& a, const std::string& b) {
            return tree.index_of(a) < tree.index_of(b);
        });
        level = std::move(next);
    }

    // Counter-examples are returned at the most refined violated nodes:
    // violated leaves, and violated nodes all of whose children are satisfied.
    for (const auto& id : report.visited) {
        const TreeNode& node = tree.node(id);
        if (node.verdict != VerdictKind::Violated || !node.counterexample) continue;
        bool refined = true;
        for (const auto& child : node.children)
            if (tree.node(child).verdict != VerdictKind::Satisfied) refined = false;
        if (refined) report.counterexamples.push_back(*node.counterexample);
    }

    for (const auto& node : tree.nodes)
        if (!enqueued.count(node.id)) report.pruned.push_back(node.id);

    return report;
}

// ---------------------------------------------------------------------------
// refine_node
// ---------------------------------------------------------------------------

std::vector<SubtractionProposal> refine_node(const AbstractionTree& tree, const std::string& id) {
    const TreeNode& node = tree.node(id);
    if (node.verdict != VerdictKind::Violated)
        throw Error(ErrorKind::Prerequisite,
                    "node '" + id + "' is not violated; nothing to refine");
    if (node.children.empty())
        throw Error(ErrorKind::Prerequisite,
                    "node '" + id + "' is a leaf; nothing to subtract");
    std::vector<Automaton> satisfied;
    for (const auto& child : node.children)
        if (tree.node(child).verdict == VerdictKind::Satisfied)
            satisfied.push_back(tree.node(child).model);
    if (satisfied.empty())
        throw Error(ErrorKind::Prerequisite,
                    "node '" + id + "' has no satisfied children to subtract");
    return subtract_models(node.model, satisfied);
}

}  // namespace tamc
