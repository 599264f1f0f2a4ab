#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check:
//   * GridZone      — explicit half-integer valuation sets for DBM ops
//   * digitized_reachable — brute-force integer-step location reachability
//     (exact for the closed-constraint models in scope)

#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "tamc/dbm.hpp"
#include "tamc/discrete.hpp"
#include "tamc/model.hpp"
#include "tamc/rational.hpp"

namespace tamc_test {

using namespace tamc;

/// Explicit set of clock valuations on the half-integer grid
/// {0, 1/2, ..., max_value}. Mirrors the zone semantics of every DBM
/// operation by direct set manipulation.
class GridZone {
public:
    static constexpr int kScale = 2;  // half-integer grid

    GridZone(int clocks, int max_value)
        : clocks_(clocks), axis_(max_value * kScale + 1), bits_(size_of(clocks, axis_), false) {}

    static GridZone universal(int clocks, int max_value) {
        GridZone z(clocks, max_value);
        std::fill(z.bits_.begin(), z.bits_.end(), true);
        return z;
    }

    int clocks() const { return clocks_; }
    int axis() const { return axis_; }

    bool member(const std::vector<int>& quanta) const { return bits_[index(quanta)]; }

    bool empty() const {
        for (bool b : bits_)
            if (b) return false;
        return true;
    }

    void constrain(const ClockAtom& atom) {
        for_each_point([&](const std::vector<int>& p, std::size_t i) {
            if (!bits_[i]) return;
            int v = p[atom.clock];
            int bound = atom.bound * kScale;
            bool ok = atom.op == CmpOp::Ge ? v >= bound : v <= bound;
            if (!ok) bits_[i] = false;
        });
    }

    /// Future closure restricted to the grid: p is reachable iff some
    /// p - d*(1,...,1) with d >= 0 grid-valued is in the set.
    void up() {
        std::vector<char> out(bits_.begin(), bits_.end());
        for_each_point([&](const std::vector<int>& p, std::size_t i) {
            if (out[i]) return;
            bool any = false;
            std::vector<int> q = p;
            while (!any) {
                bool underflow = false;
                for (int c = 0; c < clocks_; ++c) {
                    if (--q[c] < 0) underflow = true;
                }
                if (underflow) break;
                if (bits_[index(q)]) any = true;
            }
            out[i] = any;
        });
        bits_.assign(out.begin(), out.end());
    }

    void reset(const std::vector<int>& clocks) {
        for (int axis : clocks) {
            std::vector<char> out(bits_.size(), false);
            for_each_point([&](const std::vector<int>& p, std::size_t i) {
                if (!bits_[i]) return;
                std::vector<int> q = p;
                q[axis] = 0;
                out[index(q)] = true;
            });
            bits_.assign(out.begin(), out.end());
        }
    }

    bool subset_of(const GridZone& other) const {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] && !other.bits_[i]) return false;
        return true;
    }

    void for_each_point(const std::function<void(const std::vector<int>&, std::size_t)>& fn) const {
        std::vector<int> p(clocks_, 0);
        std::size_t i = 0;
        while (true) {
            fn(p, i);
            int c = clocks_ - 1;
            while (c >= 0) {
                if (++p[c] < axis_) break;
                p[c] = 0;
                --c;
            }
            if (c < 0) break;
            i = index(p);
        }
    }

    std::size_t index(const std::vector<int>& p) const {
        std::size_t i = 0;
        for (int c = 0; c < clocks_; ++c) i = i * axis_ + p[c];
        return i;
    }

    static Rational value_of(int quanta) { return Rational(quanta, kScale); }

private:
    static std::size_t size_of(int clocks, int axis) {
        std::size_t s = 1;
        for (int c = 0; c < clocks; ++c) s *= axis;
        return s;
    }

    int clocks_;
    int axis_;
    std::vector<char> bits_;
};

/// Agreement of a DBM with a grid zone on every grid point.
inline bool agrees_on_grid(const Dbm& dbm, const GridZone& grid) {
    bool ok = true;
    grid.for_each_point([&](const std::vector<int>& p, std::size_t i) {
        if (!ok) return;
        if (dbm.contains_scaled(p, GridZone::kScale) != grid.member(p)) ok = false;
        (void)i;
    });
    return ok;
}

/// Random DBM-vs-enumeration sequences. Every sequence keeps its zones
/// inside the grid (delays are immediately re-bounded), which makes the grid
/// semantics of every operation exact; unbounded behavior is covered by the
/// example-based tests. Returns the number of failing sequences.
inline int run_dbm_grid_sequences(std::uint64_t seed, int sequences, int* includes_checks) {
    constexpr int kMaxBound = 12;
    constexpr int kGridMax = kMaxBound + 1;
    std::mt19937_64 rng(seed);
    auto below = [&](int n) { return n <= 1 ? 0 : static_cast<int>(rng() % n); };
    int failures = 0;

    for (int s = 0; s < sequences; ++s) {
        int clocks = 1 + below(3);
        Dbm dbm = Dbm::universal(clocks);
        GridZone grid = GridZone::universal(clocks, kGridMax);
        // Start bounded.
        for (int c = 0; c < clocks; ++c) {
            ClockAtom atom{c, CmpOp::Le, kMaxBound};
            dbm.constrain(atom);
            grid.constrain(atom);
        }

        std::vector<Dbm> history = {dbm};
        bool sequence_ok = agrees_on_grid(dbm, grid);

        int ops = 4 + below(5);
        for (int op = 0; op < ops && sequence_ok; ++op) {
            switch (below(4)) {
                case 0: {  // constrain
                    ClockAtom atom{below(clocks), below(2) ? CmpOp::Ge : CmpOp::Le,
                                   below(kMaxBound + 1)};
                    dbm.constrain(atom);
                    grid.constrain(atom);
                    break;
                }
                case 1: {  // bounded delay: up, then fresh upper bounds
                    dbm.delay_up();
                    grid.up();
                    for (int c = 0; c < clocks; ++c) {
                        ClockAtom atom{c, CmpOp::Le, 6 + below(kMaxBound - 5)};
                        dbm.constrain(atom);
                        grid.constrain(atom);
                    }
                    break;
                }
                case 2: {  // reset a nonempty subset
                    std::vector<int> subset;
                    for (int c = 0; c < clocks; ++c)
                        if (below(2)) subset.push_back(c);
                    if (subset.empty()) subset.push_back(below(clocks));
                    if (!dbm.empty()) {
                        dbm.reset(subset);
                        grid.reset(subset);
                    }
                    break;
                }
                case 3: {  // canonicalize is idempotent
                    Dbm again = dbm;
                    again.canonicalize();
                    if (!(again == dbm)) sequence_ok = false;
                    break;
                }
            }
            if (!agrees_on_grid(dbm, grid)) sequence_ok = false;
            if (dbm.empty() != grid.empty()) sequence_ok = false;
            history.push_back(dbm);
        }

        // includes agrees with pointwise subsets for bounded zones.
        if (sequence_ok && history.size() >= 2) {
            const Dbm& z1 = history[below(static_cast<int>(history.size()))];
            const Dbm& z2 = history.back();
            bool subset = true;
            grid.for_each_point([&](const std::vector<int>& p, std::size_t) {
                if (z2.contains_scaled(p, GridZone::kScale) &&
                    !z1.contains_scaled(p, GridZone::kScale))
                    subset = false;
            });
            if (z1.includes(z2) != subset) sequence_ok = false;
            if (includes_checks) ++*includes_checks;
        }

        if (!sequence_ok) ++failures;
    }
    return failures;
}

// ---------------------------------------------------------------------------
// Counter-example mechanism predicates for the crossing corpus, evaluated on
// a replayed witness. Red-for-pedestrian covers the transitional all-red
// locations as well.
// ---------------------------------------------------------------------------

inline bool location_is(const Network& n, const ReplaySnapshot& s, const std::string& automaton,
                        const std::string& location) {
    int ai = n.automaton_index(automaton);
    if (ai < 0) return false;
    return n.automata[ai].locations[s.locations[ai]].name == location;
}

/// Mechanism 1: the pedestrian enters Crossing while its light shows red and
/// the car is already crossing.
inline bool mechanism_red_light_crossing(const Network& n, const Witness& witness) {
    ReplayResult run = replay(n, witness);
    if (!run.ok) return false;
    for (std::size_t i = 0; i < witness.size(); ++i) {
        const ReplaySnapshot& after = run.trajectory[i + 1];
        if (witness[i].channel != "crossP") continue;
        bool ped_red = location_is(n, after, "L", "CarGreen") ||
                       location_is(n, after, "L", "SwitchP") ||
                       location_is(n, after, "L", "SwitchC");
        if (ped_red && location_is(n, after, "C", "Crossing")) return true;
    }
    return false;
}

/// Mechanism 2: both parties start crossing under their own green light and
/// the light switches away from the pedestrian mid-crossing.
inline bool mechanism_green_green_switch(const Network& n, const Witness& witness) {
    ReplayResult run = replay(n, witness);
    if (!run.ok) return false;
    bool ped_entered_on_green = false;
    bool switched_mid_crossing = false;
    bool car_entered_while_ped_crossing = false;
    for (std::size_t i = 0; i < witness.size(); ++i) {
        const ReplaySnapshot& after = run.trajectory[i + 1];
        if (witness[i].channel == "crossP" && location_is(n, after, "L", "PedGreen"))
            ped_entered_on_green = true;
        if (witness[i].channel == "redP" && location_is(n, after, "P", "Crossing"))
            switched_mid_crossing = true;
        if (witness[i].channel == "greenC" && location_is(n, after, "C", "Crossing") &&
            location_is(n, after, "P", "Crossing"))
            car_entered_while_ped_crossing = true;
    }
    return ped_entered_on_green && switched_mid_crossing && car_entered_while_ped_crossing;
}

/// Brute-force location reachability at integer steps with clock values
/// saturated just above the largest constant. Exact for closed-constraint
/// networks; the independent verdict oracle for check_safety.
inline bool digitized_reachable(const Network& n,
                                const std::vector<std::pair<int, int>>& forbidden) {
    std::int64_t cap = max_constant(n) + 1;
    auto is_forbidden = [&](const OracleState& s) {
        for (const auto& [ai, li] : forbidden)
            if (s.locations[ai] != li) return false;
        return true;
    };

    OracleState init = initial_oracle_state(n);
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai) {
        const Automaton& a = n.automata[ai];
        for (const auto& atom : a.locations[a.initial].invariant)
            if (atom.op == CmpOp::Ge && atom.bound > 0) return false;
        for (const auto& atom : a.locations[a.initial].invariant)
            if (atom.op == CmpOp::Le && atom.bound < 0) return false;
    }

    auto encode = [](const OracleState& s) {
        std::vector<std::int64_t> key;
        for (int loc : s.locations) key.push_back(loc);
        for (const auto& clocks : s.clock_quanta)
            for (auto v : clocks) key.push_back(v);
        return key;
    };

    std::set<std::vector<std::int64_t>> visited;
    std::deque<OracleState> queue;
    visited.insert(encode(init));
    queue.push_back(init);
    if (is_forbidden(init)) return true;

    while (!queue.empty()) {
        OracleState cur = std::move(queue.front());
        queue.pop_front();
        for (auto& [label, next] : discrete_successors(n, cur, 1, cap)) {
            if (!visited.insert(encode(next)).second) continue;
            if (is_forbidden(next)) return true;
            queue.push_back(next);
        }
    }
    return false;
}

}  // namespace tamc_test
