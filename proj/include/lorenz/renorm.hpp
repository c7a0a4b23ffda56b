#pragma once
// Monotone (a,b) renormalization on the base map.
//
// Level-n branches are compositions of base branches along the cycle
// words W_n^-, W_n^+ with
//   W_0^- = L, W_0^+ = R,
//   W_{n+1}^- = W_n^- (W_n^+)^{a_{n+1}},  W_{n+1}^+ = W_n^+ (W_n^-)^{b_{n+1}}.
// Deep return maps are never fitted; every level is evaluated on the
// original map.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lorenz/map_core.hpp"

namespace lorenz {

struct TypePair {
    int a = 1;
    int b = 1;
    bool operator==(const TypePair&) const = default;
};

using Schedule = std::vector<TypePair>;

Schedule parse_schedule(const std::string& text);  // "2,3;4,5"
std::string format_schedule(const Schedule& s);

enum class RenormReason { ok, no_interval, wrong_itinerary, not_contained, trivial };
const char* reason_name(RenormReason r);

// word lengths T_n^- and T_n^+ (fits 64 bits for any geometric depth)
std::uint64_t word_length(const Schedule& s, int level, Side side);

// Calls fn(Side) for each symbol of W_level^side, optionally skipping the first.
template <class F>
void for_each_symbol(const Schedule& s, int level, Side side, bool skip_first, F&& fn)
{
    if (level == 0) {
        if (!skip_first) fn(side);
        return;
    }
    const TypePair& t = s[level - 1];
    Side other = side == Side::L ? Side::R : Side::L;
    int reps = side == Side::L ? t.a : t.b;
    for_each_symbol(s, level - 1, side, skip_first, fn);
    for (int i = 0; i < reps; ++i) for_each_symbol(s, level - 1, other, false, fn);
}

ItineraryWord cycle_word(const Schedule& s, int level, Side side);

template <class T> struct LevelGeom {
    T p = 0, q = 1;  // return interval C_n
    T um = 0, up = 0;  // images of c^-, c^+ under the full level-n return
    T res_p = 0, res_q = 0;  // periodicity residuals |W(p)-p|, |W(q)-q|

    T length() const { return q - p; }
    T cprime(T c) const { return (c - p) / (q - p); }
    // critical values of the rescaled return map: u' and 1-v'
    T uprime() const { return (um - p) / (q - p); }
    T lowprime() const { return (up - p) / (q - p); }
    // fullness residuals
    T r1() const { return (um - q) / (q - p); }
    T r2() const { return (up - p) / (q - p); }
};

template <class T> struct Geometry {
    std::vector<LevelGeom<T>> levels;
    RenormReason reason = RenormReason::ok;
    int failed_level = 0;
    bool ok() const { return reason == RenormReason::ok; }
};

constexpr double kContainTol = 1e-11;

template <class T> class Tower {
public:
    Tower(const BasicMap<T>& f, const Schedule& s) : f_(f), s_(s) {}

    const BasicMap<T>& map() const { return f_; }
    const Schedule& schedule() const { return s_; }

    // Applies the level-k branch to x. Returns 0 on success, otherwise the
    // direction of the first base step that fell on the wrong side of c:
    // -1 means x was too low, +1 too high.
    int apply(int k, Side side, T& x, bool skip_first = false) const
    {
        if (k == 0) {
            if (skip_first) return 0;
            if (side == Side::L) {
                if (!(x < f_.c)) return 1;
                x = f_.left(x);
            } else {
                if (!(x > f_.c)) return -1;
                x = f_.right(x);
            }
            return 0;
        }
        const TypePair& t = s_[k - 1];
        Side other = side == Side::L ? Side::R : Side::L;
        int reps = side == Side::L ? t.a : t.b;
        if (int e = apply(k - 1, side, x, skip_first)) return e;
        for (int i = 0; i < reps; ++i)
            if (int e = apply(k - 1, other, x, false)) return e;
        return 0;
    }

    // Same, accumulating the derivative of the composition into d.
    int apply_d(int k, Side side, T& x, T& d) const
    {
        if (k == 0) {
            if (side == Side::L) {
                if (!(x < f_.c)) return 1;
                d *= f_.dleft(x);
                x = f_.left(x);
            } else {
                if (!(x > f_.c)) return -1;
                d *= f_.dright(x);
                x = f_.right(x);
            }
            return 0;
        }
        const TypePair& t = s_[k - 1];
        Side other = side == Side::L ? Side::R : Side::L;
        int reps = side == Side::L ? t.a : t.b;
        if (int e = apply_d(k - 1, side, x, d)) return e;
        for (int i = 0; i < reps; ++i)
            if (int e = apply_d(k - 1, other, x, d)) return e;
        return 0;
    }

    // Fixed point of the level-k branch inside [lo,hi]; the branch is
    // increasing and expanding there so the sign of W(x)-x (extended by the
    // escape direction) changes once.
    std::optional<T> fixed_point(int k, Side side, T lo, T hi) const
    {
        auto sgn = [&](T x) {
            T y = x;
            int e = apply(k, side, y);
            if (e) return e;
            return y > x ? 1 : (y < x ? -1 : 0);
        };
        int slo = sgn(lo), shi = sgn(hi);
        if (slo == 0) return lo;
        if (shi == 0) return hi;
        if (!(slo < 0 && shi > 0)) return std::nullopt;
        const T eps = num::epsilon<T>();
        T x = (lo + hi) / 2;
        for (int it = 0; it < 600; ++it) {
            T y = x, d = 1;
            int e = apply_d(k, side, y, d);
            bool newton = false;
            T xn = x;
            if (e) {
                if (e < 0) lo = x; else hi = x;
            } else {
                T g = y - x;
                if (g == 0) return x;
                if (g < 0) lo = x; else hi = x;
                if (d > 1 && d < T(1e250)) {
                    xn = x - g / (d - 1);
                    newton = xn > lo && xn < hi;
                    if (newton && num::abs(xn - x) <= 4 * eps * num::abs(x)) return xn;
                }
            }
            if (hi - lo <= 2 * eps * num::abs(hi)) return (lo + hi) / 2;
            x = newton ? xn : (lo + hi) / 2;
        }
        return (lo + hi) / 2;
    }

    // Level geometry up to `depth`. With strict=false only the periodic
    // points and the critical itineraries are required (used by solvers
    // that step slightly outside an island).
    Geometry<T> geometry(int depth, bool strict = true) const
    {
        Geometry<T> g;
        T lo = 0, hi = 1;
        const T tol = T(kContainTol);
        for (int k = 1; k <= depth; ++k) {
            LevelGeom<T> lv;
            auto p = fixed_point(k, Side::L, lo, f_.c);
            auto q = p ? fixed_point(k, Side::R, f_.c, hi) : std::nullopt;
            if (!p || !q) {
                g.reason = RenormReason::no_interval;
                g.failed_level = k;
                return g;
            }
            lv.p = *p;
            lv.q = *q;
            T y = lv.p;
            apply(k, Side::L, y);
            lv.res_p = num::abs(y - lv.p);
            y = lv.q;
            apply(k, Side::R, y);
            lv.res_q = num::abs(y - lv.q);
            // past a saddle-node the bracket collapses onto c instead of a fixed point
            if (!(std::max(lv.res_p, lv.res_q) <= T(1e-3) * lv.length())) {
                g.reason = RenormReason::no_interval;
                g.failed_level = k;
                return g;
            }
            lv.um = f_.u;
            lv.up = 1 - f_.v;
            if (apply(k, Side::L, lv.um, true) || apply(k, Side::R, lv.up, true)) {
                g.reason = RenormReason::wrong_itinerary;
                g.failed_level = k;
                return g;
            }
            if (strict) {
                T L = lv.length();
                if (lv.um > lv.q + tol * L || lv.up < lv.p - tol * L) {
                    g.reason = RenormReason::not_contained;
                    g.failed_level = k;
                    return g;
                }
                T cp = lv.cprime(f_.c);
                if (!(lv.uprime() > cp && lv.lowprime() < cp)) {
                    g.reason = RenormReason::trivial;
                    g.failed_level = k;
                    return g;
                }
            }
            g.levels.push_back(lv);
            lo = lv.p;
            hi = lv.q;
        }
        return g;
    }

private:
    BasicMap<T> f_;
    Schedule s_;
};

struct ReturnInterval {
    double p = 0, q = 1;
    int a = 1, b = 1;
};

struct RenormRecord {
    ReturnInterval interval;
    double c_prime = 0.5;
    std::uint64_t t_minus = 1, t_plus = 1;
    double crit_left = 1, crit_right = 0;  // u' and 1-v' of the rescaled return map
};

struct RenormCheck {
    bool ok = false;
    RenormReason reason = RenormReason::no_interval;
    ItineraryWord witness;  // itinerary of c^- through one return when ok
};

ReturnInterval find_return_interval(const StandardLorenzMap& f, int a, int b);
RenormCheck is_renormalizable(const StandardLorenzMap& f, int a, int b);

// Return map of the level-n renormalization, rescaled to [0,1].
template <class T> class ReturnMap {
public:
    ReturnMap(const BasicMap<T>& f, const Schedule& s, int level, const LevelGeom<T>& g)
        : tower_(f, s), level_(level), g_(g) {}
    T c_prime() const { return g_.cprime(tower_.map().c); }
    T operator()(T x) const
    {
        T X = g_.p + x * g_.length();
        Side side = X < tower_.map().c ? Side::L : Side::R;
        if (tower_.apply(level_, side, X)) throw NotRenormalizable("return orbit left the cycle");
        return (X - g_.p) / g_.length();
    }

private:
    Tower<T> tower_;
    int level_;
    LevelGeom<T> g_;
};

struct Renormalized {
    RenormRecord record;
    ReturnMap<double> map;
};

Renormalized renormalize(const StandardLorenzMap& f, int a, int b);

struct Interval {
    double lo = 0, hi = 0;
    double length() const { return hi - lo; }
};

struct CycleLevel {
    int level = 0;
    std::vector<Interval> minus_intervals, plus_intervals;
    Interval gap_left, gap_right;  // empty at level 0
    double total_length = 0;
};

// Cycles Lambda_0..Lambda_depth. Computed in T, reported in double.
template <class T>
std::vector<CycleLevel> cycles(const BasicMap<T>& f, const Schedule& s, int depth);

struct GapRatio {
    int level;
    double left, right;  // |C_n|/|G_n^-|, |C_n|/|G_n^+|
};

std::vector<GapRatio> gap_ratios(const std::vector<CycleLevel>& cyc);

template <class T>
std::vector<GapRatio> gap_ratios(const BasicMap<T>& f, const Schedule& s, int depth)
{
    return gap_ratios(cycles(f, s, depth));
}

// Disjointness and nesting checks on computed cycles; throws
// InvariantViolation with the offending level.
void check_cycles(const std::vector<CycleLevel>& cyc, double slack = 1e-12);

extern template std::vector<CycleLevel> cycles<double>(const BasicMap<double>&, const Schedule&, int);
extern template std::vector<CycleLevel> cycles<quad>(const BasicMap<quad>&, const Schedule&, int);

} // namespace lorenz
