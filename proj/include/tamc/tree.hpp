#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tamc/checker.hpp"
#include "tamc/model.hpp"
#include "tamc/rules.hpp"

namespace tamc {

// ---------------------------------------------------------------------------
// Abstraction tree of environment models.
//
// Nodes hold the abstracted environment automaton; all other environment
// components are held fixed and live in the context network supplied at
// traversal time. Edges carry rule provenance: a node's children are the
// inputs of the rule application that produced it, so every base model is a
// leaf and the unique underived node is the root.
// ---------------------------------------------------------------------------

struct TreeNode {
    std::string id;
    Automaton model;
    RuleApplication provenance;         // rule == Base for leaves
    std::vector<std::string> children;  // node ids

    std::optional<VerdictKind> verdict;
    std::optional<CounterExample> counterexample;
    CheckStatistics statistics;
};

struct AbstractionTree {
    std::vector<TreeNode> nodes;  // plan declaration order
    std::vector<ChannelDecl> channels;
    std::string root;

    int index_of(const std::string& id) const;
    const TreeNode& node(const std::string& id) const;
    TreeNode& node(const std::string& id);
};

struct BaseInput {
    Automaton automaton;
    std::vector<ChannelDecl> channels;
};

/// Executes a topologically ordered plan, materializing every intermediate
/// model. `bases` maps the file names used in base(...) steps to parsed
/// models. Throws Error(Prerequisite) citing the failing step when a rule
/// prerequisite does not hold, the plan has no or several roots, or base
/// channel tables conflict.
AbstractionTree build_tree(const std::vector<RuleApplication>& plan,
                           const std::map<std::string, BaseInput>& bases);

struct TraversalOptions {
    CheckOptions check;
    int jobs = 1;                  // worker threads per tree level
    bool force_check_all = false;  // disable pruning (used by soundness tests)
};

struct NodeVerdict {
    std::string id;
    VerdictKind verdict = VerdictKind::Satisfied;
    CheckStatistics statistics;
};

struct TraversalReport {
    std::vector<std::string> visited;          // BFS order
    std::vector<NodeVerdict> verdicts;         // same order
    std::vector<CounterExample> counterexamples;  // most refined violated nodes
    std::vector<std::string> pruned;           // nodes never visited, plan order
};

/// Level-order traversal over the violated frontier: the root is checked
/// against `context` composed with the node model; children are checked only
/// when their parent is violated. Counter-examples are returned exactly at
/// violated nodes that are leaves or whose children are all satisfied, and
/// are attached to the tree. Deterministic for any `jobs`.
TraversalReport traverse_bfs(AbstractionTree& tree, const Network& context,
                             const SafetyProperty& property, const TraversalOptions& options = {});

/// Subtraction proposals for a violated node with at least one satisfied
/// child; does not mutate the tree. Throws Error(Prerequisite) when the node
/// is not violated, is a leaf, or has no satisfied children.
std::vector<SubtractionProposal> refine_node(const AbstractionTree& tree, const std::string& id);

}  // namespace tamc
