#include "tamc/dbm.hpp"

#include <sstream>

namespace tamc {

std::string Bound::str() const {
    if (is_inf()) return "inf";
    return std::string(strict ? "<" : "<=") + std::to_string(value);
}

Dbm::Dbm(int clocks) : dim_(clocks + 1), m_(dim_ * dim_, Bound::infinity()) {
    for (int i = 0; i < dim_; ++i) set(i, i, Bound::le(0));
}

Dbm Dbm::universal(int clocks) {
    Dbm z(clocks);
    for (int j = 1; j < z.dim_; ++j) z.set(0, j, Bound::le(0));  // x_j >= 0
    return z;
}

Dbm Dbm::zero(int clocks) {
    Dbm z(clocks);
    for (int i = 0; i < z.dim_; ++i)
        for (int j = 0; j < z.dim_; ++j) z.set(i, j, Bound::le(0));
    return z;
}

void Dbm::canonicalize() {
    if (empty_) return;
    for (int k = 0; k < dim_; ++k)
        for (int i = 0; i < dim_; ++i) {
            if (at(i, k).is_inf()) continue;
            for (int j = 0; j < dim_; ++j) {
                Bound via = at(i, k) + at(k, j);
                if (via < at(i, j)) set(i, j, via);
            }
        }
    for (int i = 0; i < dim_; ++i) {
        if (at(i, i) < Bound::le(0)) {
            empty_ = true;
            return;
        }
    }
}

void Dbm::delay_up() {
    if (empty_) return;
    for (int i = 1; i < dim_; ++i) set(i, 0, Bound::infinity());
    // Canonical form is preserved: only upper rows were relaxed to infinity.
}

void Dbm::constrain(const ClockAtom& atom) {
    if (empty_) return;
    int x = atom.clock + 1;
    if (atom.op == CmpOp::Le) {
        // x - 0 <= bound
        Bound b = Bound::le(atom.bound);
        if (b < at(x, 0)) {
            set(x, 0, b);
            canonicalize();
        }
    } else {
        // 0 - x <= -bound
        Bound b = Bound::le(-atom.bound);
        if (b < at(0, x)) {
            set(0, x, b);
            canonicalize();
        }
    }
}

void Dbm::reset(const std::vector<int>& clock_indexes) {
    if (empty_) return;
    for (int clock : clock_indexes) {
        int x = clock + 1;
        for (int j = 0; j < dim_; ++j) {
            set(x, j, at(0, j));
            set(j, x, at(j, 0));
        }
        set(x, x, Bound::le(0));
        set(x, 0, Bound::le(0));
        set(0, x, Bound::le(0));
    }
    // Resetting preserves canonicity of a canonical input.
}

bool Dbm::includes(const Dbm& inner) const {
    if (inner.empty_) return true;
    if (empty_) return false;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            if (!(inner.at(i, j) <= at(i, j))) return false;
    return true;
}

void Dbm::extrapolate(const std::vector<int>& max_const) {
    if (empty_) return;
    bool changed = false;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
            if (i == j) continue;
            Bound b = at(i, j);
            if (b.is_inf()) continue;
            if (i != 0 && Bound::le(max_const[i - 1]) < b) {
                set(i, j, Bound::infinity());
                changed = true;
            } else if (j != 0 && b < Bound::le(-max_const[j - 1])) {
                set(i, j, Bound::lt(-max_const[j - 1]));
                changed = true;
            }
        }
    if (changed) canonicalize();
}

bool Dbm::contains(const std::vector<Rational>& valuation) const {
    if (empty_) return false;
    auto value = [&](int i) { return i == 0 ? Rational(0) : valuation[i - 1]; };
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
            Bound b = at(i, j);
            if (b.is_inf()) continue;
            Rational diff = value(i) - value(j);
            if (b.strict ? !(diff < Rational(b.value)) : !(diff <= Rational(b.value)))
                return false;
        }
    return true;
}

bool Dbm::contains_scaled(const std::vector<int>& quanta, int scale) const {
    if (empty_) return false;
    auto value = [&](int i) { return i == 0 ? 0 : quanta[i - 1]; };
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
            Bound b = at(i, j);
            if (b.is_inf()) continue;
            std::int64_t diff = value(i) - value(j);
            std::int64_t limit = static_cast<std::int64_t>(b.value) * scale;
            if (b.strict ? diff >= limit : diff > limit) return false;
        }
    return true;
}

std::string Dbm::str(const std::vector<std::string>& clock_names) const {
    if (empty_) return "(empty)";
    auto name = [&](int i) -> std::string {
        if (i == 0) return "0";
        if (i - 1 < static_cast<int>(clock_names.size())) return clock_names[i - 1];
        return "x" + std::to_string(i);
    };
    std::ostringstream oss;
    bool first = true;
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) {
            if (i == j || at(i, j).is_inf()) continue;
            if (i == 0 && at(i, j) == Bound::le(0)) continue;  // implicit nonnegativity
            if (!first) oss << " & ";
            first = false;
            oss << name(i) << '-' << name(j) << ' ' << at(i, j).str();
        }
    if (first) oss << "true";
    return oss.str();
}

}  // namespace tamc
