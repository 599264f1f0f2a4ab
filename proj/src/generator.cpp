#include "tamc/generator.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <set>
#include <thread>

namespace tamc {

namespace {

// mt19937_64 is fully specified by the standard; raw modulo keeps the
// generation portable across library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    int below(int n) { return n <= 1 ? 0 : static_cast<int>(engine_() % n); }
    int in(int lo, int hi) { return lo + below(hi - lo + 1); }
    bool chance(int num, int den) { return below(den) < num; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

GenConfig clamp_config(GenConfig cfg) {
    cfg.max_locations = std::clamp(cfg.max_locations, 1, 5);
    cfg.max_clocks = std::clamp(cfg.max_clocks, 1, 2);
    cfg.max_constant = std::clamp(cfg.max_constant, 1, 8);
    cfg.max_edges = std::clamp(cfg.max_edges, 1, 8);
    cfg.max_channels = std::clamp(cfg.max_channels, 1, 3);
    return cfg;
}

std::optional<int> invariant_bound_of(const Automaton& a, int loc, int clock) {
    for (const auto& atom : a.locations[loc].invariant)
        if (atom.clock == clock) return atom.bound;
    return std::nullopt;
}

bool channel_observable(int index) { return index % 2 == 0; }

// Send edges on observable channels must keep a positive lower bound on a
// clock they reset; otherwise a reachable free-firing loop makes the bounded
// language explode combinatorially.
void enforce_spacing(Automaton& a, Rng& rng, int max_constant) {
    for (auto& e : a.edges) {
        if (e.action.kind != ActionKind::Send) continue;
        int clock;
        if (!e.guard.empty() && e.guard.front().bound >= 1) {
            clock = e.guard.front().clock;
        } else {
            clock = rng.below(static_cast<int>(a.clocks.size()));
            int bound = rng.in(1, std::max(1, max_constant));
            if (auto m = invariant_bound_of(a, e.source, clock))
                bound = std::min(bound, std::max(1, *m));
            e.guard.clear();
            e.guard.push_back({clock, CmpOp::Ge, bound});
        }
        if (std::find(e.resets.begin(), e.resets.end(), clock) == e.resets.end())
            e.resets.push_back(clock);
        std::sort(e.resets.begin(), e.resets.end());
    }
}

Automaton gen_candidate(Rng& rng, const GenConfig& cfg, const std::string& name,
                        const std::vector<std::string>& send_channels,
                        const std::vector<std::string>& receive_channels) {
    Automaton a;
    a.name = name;
    int nloc = rng.in(1, cfg.max_locations);
    int nclk = rng.in(1, cfg.max_clocks);
    for (int i = 0; i < nclk; ++i) a.clocks.push_back("x" + std::to_string(i));
    for (int i = 0; i < nloc; ++i) {
        Location loc;
        loc.name = "L" + std::to_string(i);
        for (int c = 0; c < nclk; ++c)
            if (rng.chance(1, 2)) loc.invariant.push_back({c, CmpOp::Le, rng.in(1, cfg.max_constant)});
        a.locations.push_back(std::move(loc));
    }
    a.initial = 0;

    int nedges = rng.in(1, cfg.max_edges);
    for (int i = 0; i < nedges; ++i) {
        Edge e;
        e.source = rng.below(nloc);
        e.target = rng.below(nloc);
        int roll = rng.below(10);
        if (roll < 4 && !send_channels.empty()) {
            e.action = {ActionKind::Send, send_channels[rng.below(send_channels.size())]};
        } else if (roll < 6 && !receive_channels.empty()) {
            e.action = {ActionKind::Receive,
                        receive_channels[rng.below(receive_channels.size())]};
        } else {
            e.action = {ActionKind::Internal, ""};
        }
        if (e.action.kind != ActionKind::Receive) {
            for (int c = 0; c < nclk; ++c)
                if (rng.chance(1, 2)) e.guard.push_back({c, CmpOp::Ge, rng.in(0, cfg.max_constant)});
        }
        for (int c = 0; c < nclk; ++c)
            if (rng.chance(1, 2)) e.resets.push_back(c);
        a.edges.push_back(std::move(e));
    }

    enforce_spacing(a, rng, cfg.max_constant);

    // Clamp guards into the source invariant so every enabled interval is
    // non-empty.
    for (auto& e : a.edges)
        for (auto& atom : e.guard)
            if (auto m = invariant_bound_of(a, e.source, atom.clock))
                atom.bound = std::min(atom.bound, *m);

    return validate_automaton(a).normalized;
}

bool initial_state_live(const Network& n) {
    OracleState init = initial_oracle_state(n);
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai) {
        const Automaton& a = n.automata[ai];
        for (const auto& atom : a.locations[a.initial].invariant)
            if (atom.op == CmpOp::Ge && atom.bound > 0) return false;
    }
    return !discrete_successors(n, init, 1).empty();
}

}  // namespace

Network gen_wrap(const Automaton& a, int channel_count) {
    Network n;
    for (int i = 0; i < channel_count; ++i)
        n.channels.push_back(
            {"a" + std::to_string(i), ChannelKind::Broadcast, channel_observable(i)});
    n.automata.push_back(a);
    return n;
}

Automaton gen_automaton(const GenConfig& raw_cfg) {
    GenConfig cfg = clamp_config(raw_cfg);
    std::vector<std::string> sends;
    for (int i = 0; i < cfg.max_channels; ++i) sends.push_back("a" + std::to_string(i));

    for (std::uint64_t attempt = 0; attempt < 200; ++attempt) {
        Rng rng(mix(cfg.seed, attempt));
        Automaton a = gen_candidate(rng, cfg, "A", sends, {});
        auto validated = validate_automaton(a);
        if (!validated.ok()) continue;
        Network wrapped = gen_wrap(validated.normalized, cfg.max_channels);
        if (!validate_network(wrapped).ok()) continue;
        if (!check_applicability(wrapped).ok()) continue;
        if (!initial_state_live(wrapped)) continue;
        return validated.normalized;
    }
    throw Error(ErrorKind::Internal,
                "gen_automaton could not produce a live model from seed " +
                    std::to_string(cfg.seed));
}

Automaton gen_rebound(const Automaton& a, std::uint64_t seed, const GenConfig& raw_cfg) {
    GenConfig cfg = clamp_config(raw_cfg);
    Rng rng(mix(seed, 0xb0d));
    Automaton out = a;
    for (auto& loc : out.locations)
        for (auto& atom : loc.invariant) atom.bound = rng.in(1, cfg.max_constant);
    for (std::size_t ei = 0; ei < out.edges.size(); ++ei) {
        for (auto& atom : out.edges[ei].guard) {
            bool observable_send = out.edges[ei].action.kind == ActionKind::Send;
            atom.bound = rng.in(observable_send ? 1 : 0, cfg.max_constant);
            if (auto m = invariant_bound_of(out, out.edges[ei].source, atom.clock))
                atom.bound = std::min(atom.bound, std::max(*m, observable_send ? 1 : 0));
        }
    }
    return validate_automaton(out).normalized;
}

DeltaVector gen_deltas(const Automaton& a, const Network& wrapped, std::uint64_t seed,
                       int max_delta) {
    Rng rng(mix(seed, 0xde17a));
    DeltaVector deltas;
    for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
        const Edge& e = a.edges[ei];
        bool observable_send = false;
        if (e.action.kind == ActionKind::Send) {
            const ChannelDecl* decl = wrapped.find_channel(e.action.channel);
            observable_send = decl && decl->observable;
        }
        for (const auto& atom : e.guard) {
            if (!rng.chance(1, 2)) continue;
            int delta = rng.in(0, max_delta);
            if (observable_send) delta = std::min(delta, std::max(0, atom.bound - 1));
            if (delta > 0)
                deltas.guard_deltas[edge_address(a, static_cast<int>(ei))][a.clocks[atom.clock]] =
                    delta;
        }
    }
    for (const auto& loc : a.locations)
        for (const auto& atom : loc.invariant) {
            if (!rng.chance(1, 2)) continue;
            int delta = rng.in(0, max_delta);
            if (delta > 0) deltas.inv_deltas[a.name + "." + loc.name][a.clocks[atom.clock]] = delta;
        }
    return deltas;
}

Network gen_r3_network(const GenConfig& raw_cfg) {
    GenConfig cfg = clamp_config(raw_cfg);

    for (std::uint64_t attempt = 0; attempt < 200; ++attempt) {
        Rng rng(mix(cfg.seed, mix(attempt, 0x53)));
        // a0 observable, a1 the unobservable broadcast channel targeted by R3.
        Automaton sender = gen_candidate(rng, cfg, "S", {"a0", "a1"}, {});
        Automaton receiver = gen_candidate(rng, cfg, "R", {"a0"}, {"a1"});

        bool sender_sends = false;
        for (const auto& e : sender.edges)
            if (e.action.kind == ActionKind::Send && e.action.channel == "a1") sender_sends = true;
        bool receiver_receives = false;
        for (const auto& e : receiver.edges)
            if (e.action.kind == ActionKind::Receive && e.action.channel == "a1")
                receiver_receives = true;
        if (!sender_sends || !receiver_receives) continue;

        Network n;
        n.channels.push_back({"a0", ChannelKind::Broadcast, true});
        n.channels.push_back({"a1", ChannelKind::Broadcast, false});
        n.automata.push_back(validate_automaton(sender).normalized);
        n.automata.push_back(validate_automaton(receiver).normalized);
        if (!validate_network(n).ok()) continue;
        if (!check_applicability(n).ok()) continue;
        if (!initial_state_live(n)) continue;
        return n;
    }
    throw Error(ErrorKind::Internal,
                "gen_r3_network could not produce a live model from seed " +
                    std::to_string(cfg.seed));
}

Automaton apply_r1_shrinking_invariants(const Automaton& a, const DeltaVector& deltas) {
    // Guard handling matches apply_r1; invariant deltas are subtracted, the
    // sign the theorem suite uses as its mutation control.
    DeltaVector guards_only;
    guards_only.guard_deltas = deltas.guard_deltas;
    Automaton out = apply_r1(a, guards_only);
    for (const auto& [loc_addr, per_clock] : deltas.inv_deltas) {
        auto dot = loc_addr.find('.');
        int li = out.location_index(loc_addr.substr(dot + 1));
        if (li < 0) throw Error(ErrorKind::Address, "unknown location '" + loc_addr + "'");
        for (const auto& [clock_name, delta] : per_clock) {
            int clock = out.clock_index(clock_name);
            if (clock < 0) throw Error(ErrorKind::Address, "unknown clock '" + clock_name + "'");
            for (auto& atom : out.locations[li].invariant)
                if (atom.clock == clock) atom.bound = std::max(0, atom.bound - delta);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Theorem suite
// ---------------------------------------------------------------------------

namespace {

struct TrialContext {
    OracleCaps caps{200000};
    std::vector<Rational> steps = {Rational(1), Rational(1, 2)};
};

int combined_horizon(const Network& n1, const Network& n2) {
    return 2 * std::max({max_constant(n1), max_constant(n2), 1});
}

bool subset(const BoundedLanguage& small, const BoundedLanguage& big) {
    for (const auto& w : small.words)
        if (!big.words.count(w)) return false;
    return true;
}

}  // namespace

TheoremSummary theorem_suite(const GenConfig& base_cfg, int trials, std::ostream* log) {
    GenConfig cfg = clamp_config(base_cfg);
    TrialContext ctx;

    // Trials are independent pure computations; workers run strided shares
    // into local summaries, so the merged result does not depend on
    // scheduling.
    auto run_trial = [&cfg, &ctx](int trial, TheoremSummary& summary) {
        auto note = [&](const std::string& what, std::uint64_t seed) {
            summary.failure_notes.push_back("trial " + std::to_string(trial) + ": " + what +
                                            " (seed " + std::to_string(seed) + ")");
        };

        // ----- R1: widening covers the original ---------------------------
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt >= 50) {
                note("r1 trial exhausted resampling budget", cfg.seed);
                ++summary.r1_failures;
                break;
            }
            std::uint64_t seed = mix(cfg.seed, mix(trial, attempt * 2 + 1));
            GenConfig trial_cfg = cfg;
            trial_cfg.seed = seed;
            try {
                Automaton a = gen_automaton(trial_cfg);
                Network n1 = gen_wrap(a, cfg.max_channels);
                DeltaVector deltas = gen_deltas(a, n1, seed, 3);
                Automaton widened = apply_r1(a, deltas);
                Network n2 = gen_wrap(widened, cfg.max_channels);
                if (deltas.empty() && !(widened == a)) {
                    note("r1 identity violated for empty deltas", seed);
                    ++summary.r1_failures;
                    break;
                }
                Rational horizon(combined_horizon(n1, n2));

                bool failed = false;
                for (const auto& step : ctx.steps) {
                    BoundedLanguage l1 = bounded_language(n1, horizon, step, ctx.caps);
                    BoundedLanguage l2 = bounded_language(n2, horizon, step, ctx.caps);
                    if (!subset(l1, l2)) {
                        note("r1 bounded inclusion failed at step " + step.str(), seed);
                        failed = true;
                    }
                    if (!bounded_simulates(n2, n1, horizon, step, ctx.caps)) {
                        note("r1 bounded simulation failed at step " + step.str(), seed);
                        failed = true;
                    }
                    if (step.den == 1) {
                        if (!subset(l2, l1)) ++summary.r1_strict;
                        Automaton mutant = apply_r1_shrinking_invariants(a, deltas);
                        Network nm = gen_wrap(mutant, cfg.max_channels);
                        BoundedLanguage lm = bounded_language(nm, horizon, step, ctx.caps);
                        if (!subset(l1, lm)) ++summary.mutation_inclusion_failures;
                    }
                }
                if (failed) ++summary.r1_failures;
                break;
            } catch (const Error& err) {
                if (err.kind() == ErrorKind::Resource) {
                    ++summary.rejected;
                    continue;
                }
                throw;
            }
        }

        // ----- R2: merge covers both inputs -------------------------------
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt >= 50) {
                note("r2 trial exhausted resampling budget", cfg.seed);
                ++summary.r2_failures;
                break;
            }
            std::uint64_t seed = mix(cfg.seed, mix(trial, attempt * 2 + 0x1000));
            GenConfig trial_cfg = cfg;
            trial_cfg.seed = seed;
            try {
                Automaton a1 = gen_automaton(trial_cfg);
                Automaton a2 = gen_rebound(a1, seed, cfg);
                Automaton merged = apply_r2(a1, a2);
                Network n1 = gen_wrap(a1, cfg.max_channels);
                Network n2 = gen_wrap(a2, cfg.max_channels);
                Network n3 = gen_wrap(merged, cfg.max_channels);

                bool failed = false;
                if (!(apply_r2(a1, a2) == apply_r2(a2, a1))) {
                    note("r2 commutativity violated", seed);
                    failed = true;
                }
                if (!(apply_r2(a1, a1) == a1)) {
                    note("r2 idempotence violated", seed);
                    failed = true;
                }
                // The merge is expressible as an R1 widening of either input when
                // bound presence patterns match (they do here by construction).
                DeltaVector delta;
                for (std::size_t ei = 0; ei < a1.edges.size(); ++ei) {
                    std::set<int> clocks;
                    for (const auto& atom : a1.edges[ei].guard) clocks.insert(atom.clock);
                    for (const auto& atom : a2.edges[ei].guard) clocks.insert(atom.clock);
                    for (int c : clocks) {
                        int nb1 = 0, nb2 = 0;
                        for (const auto& atom : a1.edges[ei].guard)
                            if (atom.clock == c) nb1 = atom.bound;
                        for (const auto& atom : a2.edges[ei].guard)
                            if (atom.clock == c) nb2 = atom.bound;
                        if (nb1 - std::min(nb1, nb2) > 0)
                            delta.guard_deltas[edge_address(a1, static_cast<int>(ei))]
                                              [a1.clocks[c]] = nb1 - std::min(nb1, nb2);
                    }
                }
                for (std::size_t li = 0; li < a1.locations.size(); ++li)
                    for (const auto& atom : a1.locations[li].invariant) {
                        int mb2 = atom.bound;
                        for (const auto& other : a2.locations[li].invariant)
                            if (other.clock == atom.clock) mb2 = other.bound;
                        int widened = std::max(atom.bound, mb2) - atom.bound;
                        if (widened > 0)
                            delta.inv_deltas[a1.name + "." + a1.locations[li].name]
                                            [a1.clocks[atom.clock]] = widened;
                    }
                if (!(apply_r1(a1, delta) == merged)) {
                    note("r2 is not the constructed r1 widening", seed);
                    failed = true;
                }

                Rational horizon(std::max(combined_horizon(n1, n3), combined_horizon(n2, n3)));
                for (const auto& step : ctx.steps) {
                    BoundedLanguage l1 = bounded_language(n1, horizon, step, ctx.caps);
                    BoundedLanguage l2 = bounded_language(n2, horizon, step, ctx.caps);
                    BoundedLanguage l3 = bounded_language(n3, horizon, step, ctx.caps);
                    if (!subset(l1, l3) || !subset(l2, l3)) {
                        note("r2 bounded union inclusion failed at step " + step.str(), seed);
                        failed = true;
                    }
                    if (!bounded_simulates(n3, n1, horizon, step, ctx.caps) ||
                        !bounded_simulates(n3, n2, horizon, step, ctx.caps)) {
                        note("r2 bounded simulation failed at step " + step.str(), seed);
                        failed = true;
                    }
                }
                if (failed) ++summary.r2_failures;
                break;
            } catch (const Error& err) {
                if (err.kind() == ErrorKind::Resource) {
                    ++summary.rejected;
                    continue;
                }
                throw;
            }
        }

        // ----- R3: erasing unobservable receives covers the original ------
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt >= 50) {
                note("r3 trial exhausted resampling budget", cfg.seed);
                ++summary.r3_failures;
                break;
            }
            std::uint64_t seed = mix(cfg.seed, mix(trial, attempt * 2 + 0x2000));
            GenConfig trial_cfg = cfg;
            trial_cfg.seed = seed;
            try {
                Network n1 = gen_r3_network(trial_cfg);
                Network n2 = apply_r3(n1, "a1");
                if (!(apply_r3(n2, "a1") == n2)) {
                    note("r3 idempotence violated", seed);
                    ++summary.r3_failures;
                    break;
                }
                Rational horizon(combined_horizon(n1, n2));
                bool failed = false;
                for (const auto& step : ctx.steps) {
                    BoundedLanguage l1 = bounded_language(n1, horizon, step, ctx.caps);
                    BoundedLanguage l2 = bounded_language(n2, horizon, step, ctx.caps);
                    if (!subset(l1, l2)) {
                        note("r3 bounded inclusion failed at step " + step.str(), seed);
                        failed = true;
                    }
                    if (!bounded_simulates(n2, n1, horizon, step, ctx.caps)) {
                        note("r3 bounded simulation failed at step " + step.str(), seed);
                        failed = true;
                    }
                }
                if (failed) ++summary.r3_failures;
                break;
            } catch (const Error& err) {
                if (err.kind() == ErrorKind::Resource) {
                    ++summary.rejected;
                    continue;
                }
                throw;
            }
        }

        // ----- simulation implies language inclusion ----------------------
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt >= 50) {
                note("simulation/inclusion trial exhausted resampling budget", cfg.seed);
                ++summary.sim_implies_incl_failures;
                break;
            }
            std::uint64_t seed = mix(cfg.seed, mix(trial, attempt * 2 + 0x3000));
            GenConfig trial_cfg = cfg;
            trial_cfg.seed = seed;
            try {
                Automaton a1 = gen_automaton(trial_cfg);
                Automaton a2 = gen_rebound(a1, mix(seed, 7), cfg);
                Network n1 = gen_wrap(a1, cfg.max_channels);
                Network n2 = gen_wrap(a2, cfg.max_channels);
                Rational horizon(combined_horizon(n1, n2));
                for (const auto& step : ctx.steps) {
                    if (!bounded_simulates(n2, n1, horizon, step, ctx.caps)) continue;
                    if (!bounded_inclusion(n1, n2, horizon, step, ctx.caps).included) {
                        note("simulation held but inclusion failed at step " + step.str(), seed);
                        ++summary.sim_implies_incl_failures;
                    }
                }
                break;
            } catch (const Error& err) {
                if (err.kind() == ErrorKind::Resource) {
                    ++summary.rejected;
                    continue;
                }
                throw;
            }
        }
    };

    TheoremSummary summary;
    summary.trials = trials;
    unsigned workers = std::max(1u, std::min(4u, std::thread::hardware_concurrency()));
    if (workers <= 1 || trials < 8) {
        for (int trial = 0; trial < trials; ++trial) {
            if (log && trial % 100 == 0)
                *log << "theorem suite: trial " << trial << "/" << trials << "\n";
            run_trial(trial, summary);
        }
    } else {
        std::vector<TheoremSummary> locals(workers);
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&run_trial, &locals, trials, workers, w] {
                for (int trial = static_cast<int>(w); trial < trials;
                     trial += static_cast<int>(workers))
                    run_trial(trial, locals[w]);
            });
        for (auto& worker : pool) worker.join();
        for (const auto& local : locals) {
            summary.r1_failures += local.r1_failures;
            summary.r2_failures += local.r2_failures;
            summary.r3_failures += local.r3_failures;
            summary.sim_implies_incl_failures += local.sim_implies_incl_failures;
            summary.mutation_inclusion_failures += local.mutation_inclusion_failures;
            summary.r1_strict += local.r1_strict;
            summary.rejected += local.rejected;
            for (const auto& n : local.failure_notes) summary.failure_notes.push_back(n);
        }
        std::sort(summary.failure_notes.begin(), summary.failure_notes.end());
    }

    if (log) {
        *log << "theorem suite: " << trials << " trials/rule, r1 failures "
             << summary.r1_failures << ", r2 failures " << summary.r2_failures
             << ", r3 failures " << summary.r3_failures << ", sim=>incl failures "
             << summary.sim_implies_incl_failures << ", mutation control failures "
             << summary.mutation_inclusion_failures << " (>=1 expected), strict r1 widenings "
             << summary.r1_strict << ", resampled " << summary.rejected << "\n";
    }
    return summary;
}

}  // namespace tamc
