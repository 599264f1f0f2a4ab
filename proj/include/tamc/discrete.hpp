#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tamc/model.hpp"
#include "tamc/rational.hpp"

namespace tamc {

// ---------------------------------------------------------------------------
// Bounded-horizon discretized executor.
//
// This module is the independent falsifier used to test the abstraction
// theorems at desk scale: it enumerates observable timed words of a network
// under step-granular delays, decides bounded language inclusion, and checks
// bounded timed simulation. It can refute inclusion, never prove the
// unbounded statement.
// ---------------------------------------------------------------------------

/// One instant of a timed word: the set of observable channels seen at
/// `time`, as a bit-vector in the order of `Network::observable_channels()`.
struct WordEntry {
    Rational time;
    std::uint32_t bits = 0;

    friend bool operator==(const WordEntry& a, const WordEntry& b) {
        return a.time == b.time && a.bits == b.bits;
    }
    friend bool operator<(const WordEntry& a, const WordEntry& b) {
        if (a.time != b.time) return a.time < b.time;
        return a.bits < b.bits;
    }
};

struct TimedWord {
    std::vector<WordEntry> entries;

    friend bool operator==(const TimedWord& a, const TimedWord& b) {
        return a.entries == b.entries;
    }
    friend bool operator<(const TimedWord& a, const TimedWord& b) {
        return std::lexicographical_compare(a.entries.begin(), a.entries.end(),
                                            b.entries.begin(), b.entries.end());
    }

    std::string str(const std::vector<std::string>& channels) const;
};

struct BoundedLanguage {
    Rational horizon;
    Rational step;
    std::vector<std::string> observable;  // channel order backing the bit-vectors
    std::set<TimedWord> words;            // prefix-closed; contains the empty word
};

// ---------------------------------------------------------------------------
// Concrete states and successor enumeration
// ---------------------------------------------------------------------------

/// A concrete state at granularity 1/scale: clock values are integer
/// multiples of the step, stored as quanta counts per automaton.
struct OracleState {
    std::vector<int> locations;
    std::vector<std::vector<std::int64_t>> clock_quanta;

    bool operator==(const OracleState&) const = default;
};

OracleState initial_oracle_state(const Network& n);

struct StepLabel {
    bool is_delay = false;
    std::string channel;                       // empty for delays and internal steps
    std::vector<std::pair<int, int>> fired;    // (automaton, edge) pairs, automaton-ordered

    bool observable(const Network& n) const;
};

/// Delay successor (+1 quantum, when all location invariants keep holding)
/// plus every discrete successor: internal edges, binary sync pairs, and
/// broadcasts moving the sender with every enabled receiver. With
/// `value_cap`, clock quanta saturate there (digitization-style searches).
std::vector<std::pair<StepLabel, OracleState>> discrete_successors(
    const Network& n, const OracleState& state, std::int64_t scale,
    std::optional<std::int64_t> value_cap = std::nullopt);

// ---------------------------------------------------------------------------
// Bounded language, inclusion, simulation
// ---------------------------------------------------------------------------

struct OracleCaps {
    std::size_t max_states = 1000000;
};

/// Exact set of observable words of all runs of duration <= horizon under
/// step-granular delays. Simultaneous observable actions merge into one
/// entry. The step must be a unit fraction 1/k; Error(Resource) when the
/// state cap is exceeded.
BoundedLanguage bounded_language(const Network& n, const Rational& horizon, const Rational& step,
                                 const OracleCaps& caps = {});

struct InclusionResult {
    bool included = true;
    std::optional<TimedWord> witness;  // some word of n1 missing from n2
};

/// Bounded language inclusion L(n1) <= L(n2); both networks must declare the
/// same observable channels.
InclusionResult bounded_inclusion(const Network& n1, const Network& n2, const Rational& horizon,
                                  const Rational& step, const OracleCaps& caps = {});

/// True iff `simulator` can match every move of `simulated` on the bounded
/// step-granular unfoldings: delays by equal delays, observable actions
/// exactly, unobservable actions by the same action or by stuttering
/// (sequences of unobservable steps at the same instant are allowed).
bool bounded_simulates(const Network& simulator, const Network& simulated,
                       const Rational& horizon, const Rational& step, const OracleCaps& caps = {});

// ---------------------------------------------------------------------------
// Witness replay
// ---------------------------------------------------------------------------

struct WitnessStep {
    Rational delay;
    std::vector<std::string> fired;  // edge addresses, at most one per automaton
    std::string channel;             // synced channel; empty for internal steps

    bool operator==(const WitnessStep&) const = default;
};

using Witness = std::vector<WitnessStep>;

struct ReplaySnapshot {
    Rational time;
    std::vector<int> locations;
    std::vector<std::vector<Rational>> clocks;
};

struct ReplayResult {
    bool ok = false;
    int failed_step = -1;        // 1-based step index when !ok
    std::string failure;         // violated constraint description
    std::vector<ReplaySnapshot> trajectory;  // initial state plus one snapshot per step

    const ReplaySnapshot& final_state() const { return trajectory.back(); }
};

/// Executes a witness step by step, checking every guard, invariant and sync
/// constraint; reports the first violation or the reached state.
ReplayResult replay(const Network& n, const Witness& witness);

/// Observable projection of a witness: cumulative timestamps, observable
/// channels only, same-instant entries merged.
TimedWord extract_timed_word(const Network& n, const Witness& witness);

}  // namespace tamc
