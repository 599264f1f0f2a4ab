#include <doctest.h>

#include "fixtures.hpp"
#include "tamc/discrete.hpp"
#include "tamc/generator.hpp"

using namespace tamc;
using namespace tamc_test;

namespace {

TimedWord word(std::initializer_list<std::pair<Rational, std::uint32_t>> entries) {
    TimedWord w;
    for (const auto& [t, bits] : entries) w.entries.push_back({t, bits});
    return w;
}

}  // namespace

TEST_CASE("successors of the speaker at t=5: delay and the firing edge") {
    Network net = speaker();
    OracleState state = initial_oracle_state(net);
    state.clock_quanta[0][0] = 5;
    auto successors = discrete_successors(net, state, 1);
    REQUIRE(successors.size() == 2);
    CHECK(successors[0].first.is_delay);
    CHECK(successors[0].second.clock_quanta[0][0] == 6);
    CHECK(successors[1].first.channel == "a1");
    CHECK(successors[1].second.clock_quanta[0][0] == 0);
}

TEST_CASE("the invariant boundary blocks delays") {
    Network net = speaker();
    OracleState state = initial_oracle_state(net);
    state.clock_quanta[0][0] = 10;
    auto successors = discrete_successors(net, state, 1);
    REQUIRE(successors.size() == 1);
    CHECK(!successors[0].first.is_delay);
    CHECK(successors[0].first.channel == "a1");
}

TEST_CASE("binary sync moves speaker and translator together") {
    Network net = speaker_translator(true, true);
    OracleState state = initial_oracle_state(net);
    state.clock_quanta[0][0] = 5;
    state.clock_quanta[1][0] = 5;
    auto successors = discrete_successors(net, state, 1);
    bool sync_found = false;
    for (const auto& [label, next] : successors) {
        if (label.is_delay) continue;
        CHECK(label.channel == "a1");
        REQUIRE(label.fired.size() == 2);
        CHECK(next.locations[1] == 1);  // translator moved to Send
        sync_found = true;
    }
    CHECK(sync_found);
}

TEST_CASE("speaker language at horizon 10 step 1") {
    Network net = speaker();
    BoundedLanguage lang = bounded_language(net, Rational(10), Rational(1));
    std::set<TimedWord> expected;
    expected.insert(word({}));  // the empty word
    for (int t = 5; t <= 10; ++t) expected.insert(word({{Rational(t), 1}}));
    expected.insert(word({{Rational(5), 1}, {Rational(10), 1}}));
    CHECK(lang.words == expected);
}

TEST_CASE("without observable channels only the empty word remains") {
    Network net = parse_ok(
        "broadcast chan a1;\n"
        "automaton Speaker {\n  clock t;\n  init L0;\n  loc L0 { inv t <= 10; };\n"
        "  edge L0 -> L0 { guard t >= 5; sync a1!; reset t; };\n}\n");
    BoundedLanguage lang = bounded_language(net, Rational(10), Rational(1));
    CHECK(lang.words.size() == 1);
    CHECK(lang.words.count(word({})));
}

TEST_CASE("a2 fires at the same instant as the unobservable a1") {
    Network net = speaker_translator(false, true);
    BoundedLanguage lang = bounded_language(net, Rational(6), Rational(1));
    CHECK(lang.words.count(word({{Rational(5), 1}})));
}

TEST_CASE("simultaneous observables merge into one bit-vector entry") {
    Network net = speaker_translator(true, true);
    BoundedLanguage lang = bounded_language(net, Rational(5), Rational(1));
    // a1 and a2 at instant 5 end up in one entry <1,1>.
    CHECK(lang.words.count(word({{Rational(5), 3}})));
}

TEST_CASE("bounded inclusion is reflexive and detects widening direction") {
    Network narrow = speaker(5, 10);
    Network wide = speaker(3, 13);
    CHECK(bounded_inclusion(narrow, narrow, Rational(20), Rational(1)).included);
    CHECK(bounded_inclusion(narrow, wide, Rational(20), Rational(1)).included);
    CHECK(bounded_inclusion(narrow, wide, Rational(20), Rational(1, 2)).included);

    InclusionResult reverse = bounded_inclusion(wide, narrow, Rational(20), Rational(1));
    CHECK(!reverse.included);
    REQUIRE(reverse.witness.has_value());
    CHECK(*reverse.witness == word({{Rational(3), 1}}));
}

TEST_CASE("bounded inclusion requires matching observable declarations") {
    Network a = speaker();
    Network b = parse_ok(
        "broadcast chan observable other;\n"
        "automaton Speaker { clock t; init L0; loc L0; }\n");
    CHECK_THROWS_AS(bounded_inclusion(a, b, Rational(4), Rational(1)), Error);
}

TEST_CASE("bounded simulation matches the widening direction") {
    Network narrow = speaker(5, 10);
    Network wide = speaker(3, 13);
    Network inner = speaker(6, 9);
    CHECK(bounded_simulates(narrow, narrow, Rational(20), Rational(1)));
    CHECK(bounded_simulates(wide, narrow, Rational(20), Rational(1)));
    CHECK(bounded_simulates(wide, narrow, Rational(20), Rational(1, 2)));
    CHECK(!bounded_simulates(inner, narrow, Rational(20), Rational(1)));
    CHECK(!bounded_simulates(narrow, wide, Rational(20), Rational(1)));
}

TEST_CASE("languages are monotone in horizon and granularity") {
    Network net = speaker();
    BoundedLanguage short_h = bounded_language(net, Rational(8), Rational(1));
    BoundedLanguage long_h = bounded_language(net, Rational(12), Rational(1));
    for (const auto& w : short_h.words) CHECK(long_h.words.count(w));

    BoundedLanguage coarse = bounded_language(net, Rational(8), Rational(1));
    BoundedLanguage fine = bounded_language(net, Rational(8), Rational(1, 2));
    for (const auto& w : coarse.words) CHECK(fine.words.count(w));
}

TEST_CASE("the state cap raises a resource error naming the cap") {
    Network net = speaker();
    OracleCaps caps{5};
    try {
        bounded_language(net, Rational(10), Rational(1), caps);
        FAIL("expected a resource error");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::Resource);
        CHECK(std::string(err.what()).find("5") != std::string::npos);
    }
}

TEST_CASE("replay accepts the boundary witness and reports violations") {
    Network net = speaker();
    Witness good = {{Rational(5), {"Speaker.L0->L0#0"}, "a1"}};
    ReplayResult ok = replay(net, good);
    CHECK(ok.ok);
    CHECK(ok.final_state().locations[0] == 0);
    CHECK(ok.final_state().clocks[0][0] == Rational(0));

    Witness early = {{Rational(4), {"Speaker.L0->L0#0"}, "a1"}};
    ReplayResult guard_fail = replay(net, early);
    CHECK(!guard_fail.ok);
    CHECK(guard_fail.failed_step == 1);
    CHECK(guard_fail.failure.find("guard") != std::string::npos);

    Witness overstay = {{Rational(11), {}, ""}};
    ReplayResult inv_fail = replay(net, overstay);
    CHECK(!inv_fail.ok);
    CHECK(inv_fail.failure.find("invariant") != std::string::npos);
}

TEST_CASE("replay validates sync structure and broadcast maximality") {
    Network net = speaker_translator(true, true);
    // a1 is binary: firing the sender alone is not a valid step.
    Witness solo = {{Rational(5), {"Speaker.L0->L0#0"}, "a1"}};
    CHECK(!replay(net, solo).ok);

    Witness both = {
        {Rational(5), {"Speaker.L0->L0#0", "Translator.Idle->Send#0"}, "a1"},
        {Rational(0), {"Translator.Send->Idle#0"}, "a2"}};
    ReplayResult run = replay(net, both);
    CHECK(run.ok);

    // Broadcast greenC must carry the enabled car with it.
    Network crossing = load_corpus_model("casestudy.ta");
    Witness omitted = {{Rational(10), {"L.CarGreen->SwitchP#0"}, "redC"},
                       {Rational(0), {"L.SwitchP->PedGreen#0"}, "greenP"},
                       {Rational(10), {"L.PedGreen->SwitchC#0"}, "redP"},
                       {Rational(0), {"L.SwitchC->CarGreen#0"}, "greenC"}};
    ReplayResult bad = replay(crossing, omitted);
    CHECK(!bad.ok);
    CHECK(bad.failed_step == 4);
    CHECK(bad.failure.find("omits enabled receiver") != std::string::npos);
}

TEST_CASE("extract_timed_word projects and merges instants") {
    Network net = speaker_translator(true, true);
    Witness w = {{Rational(5), {"Speaker.L0->L0#0", "Translator.Idle->Send#0"}, "a1"},
                 {Rational(0), {"Translator.Send->Idle#0"}, "a2"}};
    TimedWord projected = extract_timed_word(net, w);
    CHECK(projected == word({{Rational(5), 3}}));

    Network unobserved = speaker_translator(false, true);
    TimedWord only_a2 = extract_timed_word(unobserved, w);
    CHECK(only_a2 == word({{Rational(5), 1}}));

    Network none = parse_ok(
        "chan a1;\nbroadcast chan a2;\n"
        "automaton Speaker { clock t; init L0; loc L0 { inv t <= 10; };\n"
        "  edge L0 -> L0 { guard t >= 5; sync a1!; reset t; }; }\n"
        "automaton Translator { clock s; init Idle; loc Idle; loc Send { inv s <= 0; };\n"
        "  edge Idle -> Send { sync a1?; reset s; };\n"
        "  edge Send -> Idle { sync a2!; }; }\n");
    CHECK(extract_timed_word(none, w).entries.empty());
}

TEST_CASE("theorem suite holds on a small deterministic run") {
    GenConfig cfg;
    cfg.seed = 424242;
    TheoremSummary summary = theorem_suite(cfg, 12, nullptr);
    CHECK(summary.r1_failures == 0);
    CHECK(summary.r2_failures == 0);
    CHECK(summary.r3_failures == 0);
    CHECK(summary.sim_implies_incl_failures == 0);
    CHECK(summary.r1_strict >= 1);
}
