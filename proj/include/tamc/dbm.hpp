#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tamc/model.hpp"
#include "tamc/rational.hpp"

namespace tamc {

// ---------------------------------------------------------------------------
// Difference-bound matrices over clock valuations.
//
// Entry (i, j) bounds x_i - x_j, index 0 is the reference clock (constant 0).
// Bounds are exact integers with a strictness flag and a +infinity sentinel;
// addition saturates at infinity.
// ---------------------------------------------------------------------------

struct Bound {
    std::int32_t value = 0;
    bool strict = false;

    static constexpr std::int32_t kInf = INT32_MAX;

    static Bound infinity() { return {kInf, true}; }
    static Bound le(std::int32_t v) { return {v, false}; }
    static Bound lt(std::int32_t v) { return {v, true}; }

    bool is_inf() const { return value == kInf; }

    friend bool operator==(const Bound& a, const Bound& b) {
        if (a.is_inf() || b.is_inf()) return a.is_inf() && b.is_inf();
        return a.value == b.value && a.strict == b.strict;
    }
    // (v1,s1) < (v2,s2)  iff  v1 < v2, or v1 == v2 and strict-but-not.
    friend bool operator<(const Bound& a, const Bound& b) {
        if (b.is_inf()) return !a.is_inf();
        if (a.is_inf()) return false;
        return a.value < b.value || (a.value == b.value && a.strict && !b.strict);
    }
    friend bool operator<=(const Bound& a, const Bound& b) { return a < b || a == b; }

    friend Bound operator+(const Bound& a, const Bound& b) {
        if (a.is_inf() || b.is_inf()) return infinity();
        return {a.value + b.value, a.strict || b.strict};
    }

    std::string str() const;
};

class Dbm {
public:
    /// Zero-dimensional matrices are not used; `clocks` >= 1.
    explicit Dbm(int clocks);

    /// The universal zone over nonnegative clocks.
    static Dbm universal(int clocks);
    /// The single valuation with every clock at zero.
    static Dbm zero(int clocks);

    int clocks() const { return dim_ - 1; }
    bool empty() const { return empty_; }

    Bound at(int i, int j) const { return m_[i * dim_ + j]; }
    void set(int i, int j, Bound b) { m_[i * dim_ + j] = b; }

    /// All-pairs tightening; detects emptiness via a negative diagonal.
    void canonicalize();

    /// Future closure: drops single-clock upper bounds. Keeps canonical form.
    void delay_up();

    /// Intersection with a single-clock atom, re-canonicalized.
    void constrain(const ClockAtom& atom);

    /// Pins the listed clocks (1-based DBM indexes NOT used here: clock k is
    /// row k+1) to zero, relations recomputed. Input must be canonical.
    void reset(const std::vector<int>& clock_indexes);

    /// True iff every valuation of `inner` lies in *this (entrywise compare
    /// on canonical forms; the empty zone is included in everything).
    bool includes(const Dbm& inner) const;

    /// Classic per-clock maximal-constant extrapolation; `max_const[k]` is
    /// the largest constant comparing clock k. Result is canonical.
    void extrapolate(const std::vector<int>& max_const);

    /// Membership of an exact rational valuation (size == clocks()).
    bool contains(const std::vector<Rational>& valuation) const;

    /// Membership of a valuation given as quanta of 1/scale.
    bool contains_scaled(const std::vector<int>& quanta, int scale) const;

    bool operator==(const Dbm& other) const { return m_ == other.m_ && empty_ == other.empty_; }

    std::string str(const std::vector<std::string>& clock_names = {}) const;

private:
    int dim_;
    bool empty_ = false;
    std::vector<Bound> m_;
};

}  // namespace tamc
