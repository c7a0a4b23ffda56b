#pragma once
// Brute-force reference computations for the tests. Nothing here calls
// into the library except the plain map struct.

#include <cmath>
#include <string>

#include "lorenz/renorm.hpp"

namespace oracle {

// cycle words built by literal string concatenation
inline std::string word(const lorenz::Schedule& s, int level, char side)
{
    std::string m = "L", p = "R";
    for (int k = 0; k < level; ++k) {
        std::string nm = m, np = p;
        for (int i = 0; i < s[k].a; ++i) nm += p;
        for (int i = 0; i < s[k].b; ++i) np += m;
        m = nm;
        p = np;
    }
    return side == 'L' ? m : p;
}

// left and right branches written out directly, in long double
struct Map {
    long double c, alpha, u, v;
    long double left(long double x) const { return u * (1 - std::pow((c - x) / c, alpha)); }
    long double right(long double x) const { return 1 + v * (-1 + std::pow((x - c) / (1 - c), alpha)); }
};

inline Map from(const lorenz::BasicMap<lorenz::quad>& f)
{
    return {(long double)f.c, (long double)f.alpha, (long double)f.u, (long double)f.v};
}

// Applies the branches named by w (skipping the first symbol if asked).
// Returns NAN when a step lands on the wrong side of c.
inline long double compose(const Map& f, const std::string& w, long double x, bool skip_first = false)
{
    for (std::size_t i = skip_first ? 1 : 0; i < w.size(); ++i) {
        if (w[i] == 'L') {
            if (!(x <= f.c)) return NAN;
            x = f.left(x);
        } else {
            if (!(x >= f.c)) return NAN;
            x = f.right(x);
        }
    }
    return x;
}

// Fixed point of x -> compose(w, x) on [lo,hi] by a grid scan for a sign
// change of g(x) = compose - x followed by plain bisection.
inline long double fixed_point(const Map& f, const std::string& w, long double lo, long double hi, int grid = 4000)
{
    auto g = [&](long double x) { return compose(f, w, x) - x; };
    long double a = NAN, b = NAN;
    for (int i = 0; i < grid; ++i) {
        long double x0 = lo + (hi - lo) * i / grid, x1 = lo + (hi - lo) * (i + 1) / grid;
        long double g0 = g(x0), g1 = g(x1);
        if (std::isfinite(g0) && std::isfinite(g1) && g0 <= 0 && g1 >= 0) {
            a = x0;
            b = x1;
            break;
        }
    }
    if (std::isnan(a)) return NAN;
    for (int it = 0; it < 200; ++it) {
        long double m = (a + b) / 2, gm = g(m);
        if (!std::isfinite(gm)) return NAN;
        (gm < 0 ? a : b) = m;
    }
    return (a + b) / 2;
}

} // namespace oracle
