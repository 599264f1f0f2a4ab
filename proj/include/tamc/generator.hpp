#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tamc/discrete.hpp"
#include "tamc/model.hpp"
#include "tamc/rules.hpp"

namespace tamc {

// ---------------------------------------------------------------------------
// Random model generation and the randomized theorem suite: the desk-scale
// soundness harness for the abstraction rules. Generation is a pure function
// of the seed; failed candidates (dead initial state, oracle blowups) are
// resampled deterministically.
// ---------------------------------------------------------------------------

struct GenConfig {
    std::uint64_t seed = 0;
    int max_locations = 4;  // hard cap 5
    int max_clocks = 2;     // hard cap 2
    int max_constant = 5;   // hard cap 8
    int max_edges = 6;      // hard cap 8
    int max_channels = 2;   // hard cap 3
};

/// Interval-shaped automaton over broadcast channels a0..a{k-1}: valid,
/// applicability-clean, enabled intervals non-empty, initial state not
/// deadlocked. Send edges on observable channels carry a lower-bound guard
/// on a clock they reset, which keeps bounded languages finite-friendly.
Automaton gen_automaton(const GenConfig& cfg);

/// Wraps an automaton in a network declaring its channels; even-indexed
/// channels are observable.
Network gen_wrap(const Automaton& a, int channel_count);

/// Same-structure variant with re-randomized guard/invariant bounds
/// (presence patterns preserved).
Automaton gen_rebound(const Automaton& a, std::uint64_t seed, const GenConfig& cfg);

/// Nonnegative deltas addressed at existing edges/locations/clocks. Guard
/// deltas keep observable-send lower bounds at >= 1 to avoid free-firing
/// blowups; invariant deltas are unrestricted within max_delta.
DeltaVector gen_deltas(const Automaton& a, const Network& wrapped, std::uint64_t seed,
                       int max_delta);

/// Two-component network whose receiver listens on the unobservable
/// broadcast channel a1 with guard-free receiving edges (R3 trials).
Network gen_r3_network(const GenConfig& cfg);

/// R1 variant that subtracts invariant deltas instead of adding them; the
/// mutation control of the theorem suite, expected to break inclusion.
Automaton apply_r1_shrinking_invariants(const Automaton& a, const DeltaVector& deltas);

struct TheoremSummary {
    int trials = 0;
    int r1_failures = 0;
    int r2_failures = 0;
    int r3_failures = 0;
    int sim_implies_incl_failures = 0;
    int mutation_inclusion_failures = 0;  // the control; healthy runs have >= 1
    int r1_strict = 0;                    // trials refuting the reverse inclusion
    int rejected = 0;                     // candidates resampled due to caps
    std::vector<std::string> failure_notes;

    bool ok() const {
        return r1_failures == 0 && r2_failures == 0 && r3_failures == 0 &&
               sim_implies_incl_failures == 0 && mutation_inclusion_failures >= 1;
    }
};

/// Runs `trials` independent trials per rule: generate models and deltas,
/// apply the rule, assert bounded language inclusion and bounded simulation
/// at horizon 2*max_const with steps 1 and 1/2. Every failure note carries
/// the reproducing seed. `log` (optional) receives one line per 100 trials.
TheoremSummary theorem_suite(const GenConfig& cfg, int trials, std::ostream* log = nullptr);

}  // namespace tamc
