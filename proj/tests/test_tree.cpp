#include <doctest.h>

#include "fixtures.hpp"
#include "oracle_helpers.hpp"
#include "tamc/report.hpp"
#include "tamc/tree.hpp"

using namespace tamc;
using namespace tamc_test;

TEST_CASE("the crossing plan builds the six-node tree rooted at the merge") {
    AbstractionTree tree = build_corpus_tree();
    CHECK(tree.nodes.size() == 6);
    CHECK(tree.root == "Pedestrian3_1");
    CHECK(tree.node("Pedestrian3_1").children ==
          std::vector<std::string>{"Pedestrian1_1", "Pedestrian2_1"});
    CHECK(tree.node("Pedestrian1_1").children == std::vector<std::string>{"Pedestrian0_1"});
    CHECK(tree.node("Pedestrian2_1").children == std::vector<std::string>{"Pedestrian1_2"});
    CHECK(tree.node("Pedestrian1_2").children == std::vector<std::string>{"Pedestrian0_2"});
    CHECK(tree.node("Pedestrian0_1").children.empty());
    CHECK(tree.node("Pedestrian0_2").children.empty());
}

TEST_CASE("a single base with an empty remainder is a single-node tree") {
    Network net = load_corpus_model("pedestrian0_2.ta");
    std::map<std::string, BaseInput> bases;
    bases["pedestrian0_2.ta"] = {net.automata[0], net.channels};
    auto plan = parse_plan("Only = base(pedestrian0_2.ta)");
    AbstractionTree tree = build_tree(plan, bases);
    CHECK(tree.nodes.size() == 1);
    CHECK(tree.root == "Only");
}

TEST_CASE("merging structurally different models fails with the step index") {
    Network p01 = load_corpus_model("pedestrian0_1.ta");
    Network p02 = load_corpus_model("pedestrian0_2.ta");
    std::map<std::string, BaseInput> bases;
    bases["pedestrian0_1.ta"] = {p01.automata[0], p01.channels};
    bases["pedestrian0_2.ta"] = {p02.automata[0], p02.channels};
    auto plan = parse_plan(
        "A = base(pedestrian0_1.ta)\nB = base(pedestrian0_2.ta)\nBad = r2(A, B)");
    try {
        build_tree(plan, bases);
        FAIL("expected a prerequisite error");
    } catch (const Error& err) {
        CHECK(std::string(err.what()).find("step 3") != std::string::npos);
    }
}

TEST_CASE("plans with several roots are rejected") {
    Network p02 = load_corpus_model("pedestrian0_2.ta");
    std::map<std::string, BaseInput> bases;
    bases["pedestrian0_2.ta"] = {p02.automata[0], p02.channels};
    auto plan = parse_plan("A = base(pedestrian0_2.ta)\nB = base(pedestrian0_2.ta)");
    CHECK_THROWS_AS(build_tree(plan, bases), Error);
}

TEST_CASE("the faulty car traversal matches the expected frontier") {
    AbstractionTree tree = build_corpus_tree();
    Network context = load_corpus_model("context.ta");
    TraversalReport report = traverse_bfs(tree, context, corpus_property());

    CHECK(report.visited ==
          std::vector<std::string>{"Pedestrian3_1", "Pedestrian1_1", "Pedestrian2_1",
                                   "Pedestrian0_1", "Pedestrian1_2", "Pedestrian0_2"});
    REQUIRE(report.verdicts.size() == 6);
    for (const auto& v : report.verdicts) {
        bool expect_satisfied = v.id == "Pedestrian0_2";
        CHECK((v.verdict == VerdictKind::Satisfied) == expect_satisfied);
    }
    REQUIRE(report.counterexamples.size() == 2);
    CHECK(report.counterexamples[0].node == "Pedestrian0_1");
    CHECK(report.counterexamples[1].node == "Pedestrian1_2");
    CHECK(report.pruned.empty());

    // Every attached counter-example replays against its own closed loop.
    for (const auto& ce : report.counterexamples) {
        Network closed = corpus_closed_loop(context, tree.node(ce.node).model);
        CHECK(replay(closed, ce.witness).ok);
    }

    // The two returned counter-examples show the two distinct mechanisms.
    Network loop01 = corpus_closed_loop(context, tree.node("Pedestrian0_1").model);
    CHECK(mechanism_red_light_crossing(loop01, report.counterexamples[0].witness));
    Network loop12 = corpus_closed_loop(context, tree.node("Pedestrian1_2").model);
    CHECK(mechanism_green_green_switch(loop12, report.counterexamples[1].witness));
}

TEST_CASE("a satisfied root prunes the whole tree") {
    AbstractionTree tree = build_corpus_tree();
    Network safecar = load_corpus_model("safecar.ta");
    TraversalReport report = traverse_bfs(tree, safecar, corpus_property());
    CHECK(report.visited == std::vector<std::string>{"Pedestrian3_1"});
    CHECK(report.counterexamples.empty());
    CHECK(report.pruned.size() == 5);
}

TEST_CASE("pruning never hides a violated node") {
    for (const std::string context_name : {"context.ta", "safecar.ta"}) {
        Network context = load_corpus_model(context_name);

        AbstractionTree pruned_tree = build_corpus_tree();
        TraversalReport pruned = traverse_bfs(pruned_tree, context, corpus_property());

        AbstractionTree full_tree = build_corpus_tree();
        TraversalOptions all;
        all.force_check_all = true;
        TraversalReport full = traverse_bfs(full_tree, context, corpus_property(), all);
        CHECK(full.pruned.empty());

        for (const auto& v : full.verdicts) {
            // Nodes both runs visited agree; skipped nodes are satisfied.
            bool visited = false;
            for (const auto& pv : pruned.verdicts)
                if (pv.id == v.id) {
                    visited = true;
                    CHECK(pv.verdict == v.verdict);
                }
            if (!visited) CHECK(v.verdict == VerdictKind::Satisfied);
        }
    }
}

TEST_CASE("traversal reports are byte-identical across runs and worker counts") {
    Network context = load_corpus_model("context.ta");
    std::string first, second, parallel;
    for (std::string* out : {&first, &second, &parallel}) {
        AbstractionTree tree = build_corpus_tree();
        TraversalOptions options;
        options.jobs = out == &parallel ? 3 : 1;
        TraversalReport report = traverse_bfs(tree, context, corpus_property(), options);
        *out = write_traversal_report(tree, corpus_property(), report, "json");
    }
    CHECK(first == second);
    CHECK(first == parallel);
}

TEST_CASE("parents bounded-simulate their children along tree edges") {
    AbstractionTree tree = build_corpus_tree();
    Network light_only = parse_ok(read_file(corpus_path("context.ta")), "context.ta");
    // Environment fragment: the light plus the pedestrian (no system).
    Network env;
    env.channels = light_only.channels;
    env.automata.push_back(light_only.automata[0]);

    for (const auto& node : tree.nodes) {
        Network parent_env = compose(env, node.model);
        for (const auto& child_id : node.children) {
            Network child_env = compose(env, tree.node(child_id).model);
            CHECK(bounded_simulates(parent_env, child_env, Rational(24), Rational(1)));
            CHECK(bounded_simulates(parent_env, child_env, Rational(12), Rational(1, 2)));
        }
    }
}

TEST_CASE("refinement proposes the long-crossing base model") {
    AbstractionTree tree = build_corpus_tree();
    Network context = load_corpus_model("context.ta");
    traverse_bfs(tree, context, corpus_property());

    auto proposals = refine_node(tree, "Pedestrian1_2");
    REQUIRE(proposals.size() == 2);
    CHECK(proposals[1].dimensions[0].piece == IntervalPiece{5, 10});

    // The [5,10] proposal is violated through the same mechanism.
    Network closed = corpus_closed_loop(context, proposals[1].model);
    Verdict v = check_safety(closed, corpus_property());
    REQUIRE(v.violated());
    CHECK(mechanism_green_green_switch(closed, v.counterexample->witness));

    // The degenerate [0,0] proposal is safe: the pedestrian's zero-length
    // crossings never overlap the car's window.
    Network zero = corpus_closed_loop(context, proposals[0].model);
    CHECK(!check_safety(zero, corpus_property()).violated());
}

TEST_CASE("refinement preconditions") {
    AbstractionTree tree = build_corpus_tree();
    Network context = load_corpus_model("context.ta");
    CHECK_THROWS_AS(refine_node(tree, "Pedestrian1_2"), Error);  // no verdicts yet
    traverse_bfs(tree, context, corpus_property());
    CHECK_THROWS_AS(refine_node(tree, "Pedestrian0_1"), Error);  // violated leaf
    CHECK_THROWS_AS(refine_node(tree, "Pedestrian2_1"), Error);  // child violated
    CHECK_THROWS_AS(refine_node(tree, "Nowhere"), Error);
}

TEST_CASE("golden corpus reports regenerate byte-identically") {
    AbstractionTree tree = build_corpus_tree();
    Network context = load_corpus_model("context.ta");
    TraversalReport report = traverse_bfs(tree, context, corpus_property());
    CHECK(write_traversal_report(tree, corpus_property(), report, "json") ==
          read_file(corpus_path("expected_traverse.json")));

    Network casestudy = load_corpus_model("casestudy.ta");
    Verdict v = check_safety(casestudy, corpus_property());
    CHECK(write_check_report(casestudy, corpus_property(), v, "json") ==
          read_file(corpus_path("expected_check.json")));
}

TEST_CASE("trees round-trip through their file format") {
    AbstractionTree tree = build_corpus_tree();
    Network context = load_corpus_model("context.ta");
    traverse_bfs(tree, context, corpus_property());

    std::string text = tree_to_text(tree);
    AbstractionTree loaded = tree_from_text(text);
    CHECK(loaded.nodes.size() == tree.nodes.size());
    CHECK(loaded.root == tree.root);
    for (const auto& node : tree.nodes) {
        const TreeNode& other = loaded.node(node.id);
        CHECK(other.model == node.model);
        CHECK(other.children == node.children);
        CHECK(other.verdict == node.verdict);
        CHECK(other.provenance == node.provenance);
    }
    CHECK(tree_to_text(loaded) == text);

    // Refinement works from the reloaded annotated tree.
    auto proposals = refine_node(loaded, "Pedestrian1_2");
    CHECK(proposals.size() == 2);
}
