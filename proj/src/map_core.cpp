#include "lorenz/map_core.hpp"

#include <algorithm>
#include <cmath>

namespace lorenz {

double eval(const StandardLorenzMap& f, double x, double tol)
{
    if (std::fabs(x - f.c) < tol) throw CriticalPointHit("x within exclusion tolerance of c");
    double y = x < f.c ? f.left(x) : f.right(x);
    return std::clamp(y, 0.0, 1.0);
}

double deriv(const StandardLorenzMap& f, double x, double tol)
{
    if (std::fabs(x - f.c) < tol) throw CriticalPointHit("x within exclusion tolerance of c");
    return x < f.c ? f.dleft(x) : f.dright(x);
}

double branch_inverse(const StandardLorenzMap& f, Side side, double y)
{
    if (side == Side::L) {
        if (!(y >= 0 && y <= f.u)) throw OutOfRange("y outside [0,u]");
        if (y == f.u) return f.c;
        return f.inv_left(y);
    }
    if (!(y >= 1 - f.v && y <= 1)) throw OutOfRange("y outside [1-v,1]");
    if (y == 1) return 1.0;
    return f.inv_right(y);
}

double crit_preimage(const StandardLorenzMap& f, Side side, int k)
{
    if (k < 1) throw OutOfRange("k must be positive");
    double x = f.c;
    for (int i = 0; i < k; ++i) x = branch_inverse(f, side, x);
    return x;
}

Orbit iterate(const StandardLorenzMap& f, double x, std::size_t n, double tol)
{
    Orbit o;
    o.points.reserve(n + 1);
    o.points.push_back(x);
    for (std::size_t k = 0; k < n; ++k) {
        if (std::fabs(x - f.c) < tol) {
            o.hit_critical = k;
            break;
        }
        x = eval(f, x, tol);
        o.points.push_back(x);
    }
    return o;
}

ItineraryWord itinerary(const StandardLorenzMap& f, double x, std::size_t n, double tol)
{
    ItineraryWord w;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::fabs(x - f.c) < tol) break;
        w.push_back(x < f.c ? 'L' : 'R');
        x = eval(f, x, tol);
    }
    return w;
}

double beta_left(const StandardLorenzMap& f)
{
    return std::min(f.dleft(0.0), f.u / f.c);
}

} // namespace lorenz
