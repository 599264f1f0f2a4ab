#include <doctest.h>

#include "fixtures.hpp"
#include "tamc/generator.hpp"
#include "tamc/rules.hpp"

using namespace tamc;
using namespace tamc_test;

namespace {

ClockInterval crossing_interval(const Automaton& p) {
    auto intervals = enabled_interval(p, "P.Crossing->Idle#0");
    return intervals.at(0);
}

}  // namespace

TEST_CASE("r1 widens the crossing interval from [1,4] to [1,15]") {
    Network net = load_corpus_model("pedestrian0_1.ta");
    DeltaVector d;
    d.inv_deltas["P.Crossing"]["t"] = 11;
    Automaton widened = apply_r1(net.automata[0], d);
    ClockInterval iv = crossing_interval(widened);
    CHECK(iv.lower == 1);
    CHECK(*iv.upper == 15);
}

TEST_CASE("r1 with zero deltas is the identity") {
    Network net = speaker();
    CHECK(apply_r1(net.automata[0], {}) == net.automata[0]);
    DeltaVector zero;
    zero.guard_deltas["Speaker.L0->L0#0"]["t"] = 0;
    zero.inv_deltas["Speaker.L0"]["t"] = 0;
    CHECK(apply_r1(net.automata[0], zero) == net.automata[0]);
}

TEST_CASE("r1 widens both ends: [5,10] to [3,13]") {
    Network net = speaker();
    DeltaVector d;
    d.guard_deltas["Speaker.L0->L0#0"]["t"] = 2;
    d.inv_deltas["Speaker.L0"]["t"] = 3;
    Automaton widened = apply_r1(net.automata[0], d);
    auto intervals = enabled_interval(widened, "Speaker.L0->L0#0");
    CHECK(intervals.at(0).lower == 3);
    CHECK(*intervals.at(0).upper == 13);
}

TEST_CASE("r1 saturates guard bounds at zero and keeps absent invariants unbounded") {
    Network net = speaker();
    DeltaVector d;
    d.guard_deltas["Speaker.L0->L0#0"]["t"] = 99;
    Automaton widened = apply_r1(net.automata[0], d);
    CHECK(widened.edges[0].guard.empty());  // lower bound 0 is implicit

    Network bare = parse_ok("automaton A { clock t; init L0; loc L0; edge L0 -> L0 { }; }");
    DeltaVector inv_only;
    inv_only.inv_deltas["A.L0"]["t"] = 4;
    CHECK(apply_r1(bare.automata[0], inv_only) == bare.automata[0]);
}

TEST_CASE("r1 rejects unknown addresses") {
    Network net = speaker();
    DeltaVector bad_edge;
    bad_edge.guard_deltas["Speaker.L0->L9#0"]["t"] = 1;
    CHECK_THROWS_AS(apply_r1(net.automata[0], bad_edge), Error);
    DeltaVector bad_clock;
    bad_clock.inv_deltas["Speaker.L0"]["zz"] = 1;
    CHECK_THROWS_AS(apply_r1(net.automata[0], bad_clock), Error);
    DeltaVector bad_loc;
    bad_loc.inv_deltas["Speaker.Lx"]["t"] = 1;
    CHECK_THROWS_AS(apply_r1(net.automata[0], bad_loc), Error);
}

TEST_CASE("r1 composes additively with guard-floor saturation") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        GenConfig cfg;
        cfg.seed = seed;
        Automaton a = gen_automaton(cfg);
        Network wrapped = gen_wrap(a, cfg.max_channels);
        DeltaVector d1 = gen_deltas(a, wrapped, seed * 2 + 1, 3);
        DeltaVector d2 = gen_deltas(a, wrapped, seed * 2 + 2, 3);
        DeltaVector sum = d1;
        for (const auto& [addr, per_clock] : d2.guard_deltas)
            for (const auto& [clock, delta] : per_clock) sum.guard_deltas[addr][clock] += delta;
        for (const auto& [addr, per_clock] : d2.inv_deltas)
            for (const auto& [clock, delta] : per_clock) sum.inv_deltas[addr][clock] += delta;
        CHECK(apply_r1(apply_r1(a, d1), d2) == apply_r1(a, sum));
    }
}

TEST_CASE("r2 merges [1,15] and [0,10] into [0,15]") {
    AbstractionTree tree = build_corpus_tree();
    const Automaton& merged = tree.node("Pedestrian3_1").model;
    ClockInterval iv = crossing_interval(merged);
    CHECK(iv.lower == 0);
    CHECK(*iv.upper == 15);
}

TEST_CASE("r2 is idempotent, commutative, and componentwise") {
    Network n1 = speaker(5, 10);
    Network n2 = speaker(3, 8);
    const Automaton& a1 = n1.automata[0];
    const Automaton& a2 = n2.automata[0];
    CHECK(apply_r2(a1, a1) == a1);
    CHECK(apply_r2(a1, a2) == apply_r2(a2, a1));
    Automaton merged = apply_r2(a1, a2);
    auto iv = enabled_interval(merged, "Speaker.L0->L0#0").at(0);
    CHECK(iv.lower == 3);
    CHECK(*iv.upper == 10);
}

TEST_CASE("an absent invariant dominates the r2 merge") {
    Network n1 = parse_ok(
        "automaton A { clock t; init L0; loc L0 { inv t <= 9; }; edge L0 -> L0 { }; }");
    Network n2 = parse_ok("automaton A { clock t; init L0; loc L0; edge L0 -> L0 { }; }");
    Automaton merged = apply_r2(n1.automata[0], n2.automata[0]);
    CHECK(merged.locations[0].invariant.empty());
}

TEST_CASE("r2 reports the first structural difference") {
    Network n1 = load_corpus_model("pedestrian0_1.ta");
    Network n2 = load_corpus_model("pedestrian0_2.ta");
    try {
        apply_r2(n1.automata[0], n2.automata[0]);
        FAIL("expected a prerequisite error");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::Prerequisite);
        CHECK(std::string(err.what()).find("actions differ") != std::string::npos);
    }
}

TEST_CASE("r3 erases unobservable broadcast receives") {
    AbstractionTree tree = build_corpus_tree();
    const Automaton& p12 = tree.node("Pedestrian1_2").model;
    const Automaton& p21 = tree.node("Pedestrian2_1").model;
    CHECK(p12.edges[0].action.kind == ActionKind::Receive);
    CHECK(p21.edges[0].action.kind == ActionKind::Internal);
    // Everything else unchanged, including bounds.
    CHECK(p21.edges[0].resets == p12.edges[0].resets);
    CHECK(p21.locations == p12.locations);
    CHECK(crossing_interval(p21).lower == crossing_interval(p12).lower);
}

TEST_CASE("r3 leaves networks without receiving edges unchanged") {
    Network net = load_corpus_model("pedestrian0_1.ta");  // no greenP listener
    CHECK(apply_r3(net, "greenP") == net);
}

TEST_CASE("r3 prerequisites: broadcast, unobservable, guard-free receives") {
    Network net = speaker_translator(false, true);  // a1 is a binary channel
    CHECK_THROWS_AS(apply_r3(net, "a1"), Error);
    CHECK_THROWS_AS(apply_r3(net, "a2"), Error);  // observable
    CHECK_THROWS_AS(apply_r3(net, "zz"), Error);  // undeclared

    Network guarded = parse_ok(
        "broadcast chan b;\n"
        "automaton S { clock t; init L0; loc L0; edge L0 -> L0 { sync b!; }; }\n"
        "automaton R { clock s; init L0; loc L0; edge L0 -> L0 { sync b?; }; }\n");
    guarded.automata[1].edges[0].guard.push_back({0, CmpOp::Ge, 1});
    CHECK_THROWS_AS(apply_r3(guarded, "b"), Error);
}

TEST_CASE("subtraction computes integer complements: [0,10] minus [1,4]") {
    AbstractionTree tree = build_corpus_tree();
    const Automaton& parent = tree.node("Pedestrian1_2").model;
    const Automaton& child = tree.node("Pedestrian0_2").model;
    auto proposals = subtract_models(parent, {child});
    REQUIRE(proposals.size() == 2);
    CHECK(proposals[0].dimensions[0].piece == IntervalPiece{0, 0});
    CHECK(proposals[1].dimensions[0].piece == IntervalPiece{5, 10});
    ClockInterval iv = crossing_interval(proposals[1].model);
    CHECK(iv.lower == 5);
    CHECK(*iv.upper == 10);
}

TEST_CASE("subtraction of a perfect tiling or of the model itself is empty") {
    Network net = load_corpus_model("pedestrian0_2.ta");
    const Automaton& p = net.automata[0];
    CHECK(subtract_models(p, {p}).empty());

    // children exactly tile the parent's [1,4]: [1,2] and [3,4]
    Automaton low = p;
    Automaton high = p;
    low.locations[p.location_index("Crossing")].invariant = {{0, CmpOp::Le, 2}};
    high.edges[2].guard = {{0, CmpOp::Ge, 3}};
    CHECK(subtract_models(p, {low, high}).empty());
}

TEST_CASE("subtraction rejects children outside the parent") {
    Network parent = speaker(5, 10);
    Network child = speaker(3, 10);  // lower bound escapes the parent
    CHECK_THROWS_AS(subtract_models(parent.automata[0], {child.automata[0]}), Error);
}

TEST_CASE("unbounded parents leave an unbounded upper complement") {
    Network parent = parse_ok(
        "automaton A { clock t; init L0; loc L0; edge L0 -> L0 { guard t >= 1; }; }");
    Network child = parse_ok(
        "automaton A { clock t; init L0; loc L0 { inv t <= 6; };"
        " edge L0 -> L0 { guard t >= 2; }; }");
    // Child [2,6] within parent [1,inf): complements are [1,1] and [7,inf).
    auto proposals = subtract_models(parent.automata[0], {child.automata[0]});
    REQUIRE(proposals.size() == 2);
    CHECK(proposals[0].dimensions[0].piece == IntervalPiece{1, 1});
    CHECK(proposals[1].dimensions[0].piece == IntervalPiece{7, std::nullopt});
}

TEST_CASE("multi-dimension subtraction emits the cross product") {
    Network parent = parse_ok(
        "automaton A { clock t; init L0; loc L0 { inv t <= 8; }; loc L1 { inv t <= 8; };\n"
        "  edge L0 -> L1 { guard t >= 0; };\n"
        "  edge L1 -> L0 { guard t >= 0; reset t; }; }");
    Network child = parse_ok(
        "automaton A { clock t; init L0; loc L0 { inv t <= 8; }; loc L1 { inv t <= 8; };\n"
        "  edge L0 -> L1 { guard t >= 4; };\n"
        "  edge L1 -> L0 { guard t >= 4; reset t; }; }");
    auto proposals = subtract_models(parent.automata[0], {child.automata[0]});
    // Each differing dimension has one complement piece [0,3]; the shared
    // location invariants are untouched, so the cross product has one entry
    // per combination.
    REQUIRE(proposals.size() == 1);
    CHECK(proposals[0].dimensions.size() == 2);
}
