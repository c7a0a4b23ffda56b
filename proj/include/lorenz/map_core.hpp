#pragma once
// Standard Lorenz maps
//
//   x <  c :  u * (1 - ((c - x)/c)^alpha)
//   x >  c :  1 + v * (-1 + ((x - c)/(1 - c))^alpha)
//
// Everything is templated on the scalar so the solvers can run in
// __float128 while orbit statistics stay in double.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lorenz/errors.hpp"
#include "lorenz/real.hpp"

namespace lorenz {

enum class Side : std::uint8_t { L = 0, R = 1 };

inline char symbol(Side s) { return s == Side::L ? 'L' : 'R'; }

constexpr double kCritTol = 1e-14;

template <class T> struct BasicMap {
    T c = 0.5, alpha = 2, u = 1, v = 1;
    int qalpha = 8;   // 4*alpha when that is a small integer, else 0

    BasicMap() = default;
    BasicMap(T c_, T alpha_, T u_, T v_) : c(c_), alpha(alpha_), u(u_), v(v_)
    {
        if (!(c > 0 && c < 1)) throw InvalidMap("c must lie in (0,1)");
        if (!(alpha > 1 && alpha <= 100)) throw InvalidMap("alpha must lie in (1,100]");
        if (!(u > 0 && u <= 1)) throw InvalidMap("u must lie in (0,1]");
        if (!(v > 0 && v <= 1)) throw InvalidMap("v must lie in (0,1]");
        qalpha = 0;
        for (int k = 5; k <= 64; ++k)
            if (4 * alpha == T(k)) qalpha = k;
    }

    template <class U> BasicMap<U> cast() const
    {
        return BasicMap<U>(U(c), U(alpha), U(u), U(v));
    }

    // s^alpha and s^(alpha-1); quarter-integer exponents avoid pow()
    T power(T s) const { return qalpha ? qpow(s, qalpha) : num::pow(s, alpha); }
    T power_m1(T s) const { return qalpha ? qpow(s, qalpha - 4) : num::pow(s, alpha - 1); }

    static T qpow(T s, int m)
    {
        T r = num::ipow(s, m >> 2);
        switch (m & 3) {
        case 1: return r * num::sqrt(num::sqrt(s));
        case 2: return r * num::sqrt(s);
        case 3: {
            T q = num::sqrt(num::sqrt(s));
            return r * q * q * q;
        }
        }
        return r;
    }

    // raw branch formulas, no domain checks
    T left(T x) const { return u * (1 - power((c - x) / c)); }
    T right(T x) const { return 1 + v * (-1 + power((x - c) / (1 - c))); }
    T branch(Side s, T x) const { return s == Side::L ? left(x) : right(x); }

    T dleft(T x) const { return u * alpha / c * power_m1((c - x) / c); }
    T dright(T x) const { return v * alpha / (1 - c) * power_m1((x - c) / (1 - c)); }
    T dbranch(Side s, T x) const { return s == Side::L ? dleft(x) : dright(x); }

    T inv_left(T y) const { return c * (1 - num::pow(1 - y / u, 1 / alpha)); }
    T inv_right(T y) const { return c + (1 - c) * num::pow((y - 1 + v) / v, 1 / alpha); }

    // f_+(c) < c < f_-(c)
    bool nontrivial() const { return 1 - v < c && c < u; }
};

using StandardLorenzMap = BasicMap<double>;

struct Orbit {
    std::vector<double> points;
    std::optional<std::size_t> hit_critical;
};

// Word over {L,R}, stored as a string of 'L'/'R'.
using ItineraryWord = std::string;

double eval(const StandardLorenzMap& f, double x, double tol = kCritTol);
double deriv(const StandardLorenzMap& f, double x, double tol = kCritTol);
double branch_inverse(const StandardLorenzMap& f, Side side, double y);
double crit_preimage(const StandardLorenzMap& f, Side side, int k);
Orbit iterate(const StandardLorenzMap& f, double x, std::size_t n, double tol = kCritTol);
ItineraryWord itinerary(const StandardLorenzMap& f, double x, std::size_t n, double tol = kCritTol);

// beta_f = min{f'(0), f_-(c)/c}, the expansion used in the preimage bound
double beta_left(const StandardLorenzMap& f);

} // namespace lorenz
