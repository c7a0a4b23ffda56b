#pragma once
// Scalar helpers shared by double, long double and __float128 code paths.

#include <cmath>
#include <string>

extern "C" {
#include <quadmath.h>
}

namespace lorenz {

using quad = __float128;

namespace num {

inline double pow(double x, double y) { return std::pow(x, y); }
inline long double pow(long double x, long double y) { return std::pow(x, y); }
inline quad pow(quad x, quad y) { return powq(x, y); }

inline double log(double x) { return std::log(x); }
inline long double log(long double x) { return std::log(x); }
inline quad log(quad x) { return logq(x); }

inline double exp(double x) { return std::exp(x); }
inline long double exp(long double x) { return std::exp(x); }
inline quad exp(quad x) { return expq(x); }

inline double abs(double x) { return std::fabs(x); }
inline long double abs(long double x) { return std::fabs(x); }
inline quad abs(quad x) { return fabsq(x); }

inline double sqrt(double x) { return std::sqrt(x); }
inline long double sqrt(long double x) { return std::sqrt(x); }
inline quad sqrt(quad x) { return sqrtq(x); }

template <class T> constexpr T epsilon();
template <> constexpr double epsilon<double>() { return 2.220446049250313e-16; }
template <> constexpr long double epsilon<long double>() { return 1.0842021724855044340e-19L; }
template <> constexpr quad epsilon<quad>() { return quad(0x1p-112L); }

// x^k for small non-negative integer k
template <class T> inline T ipow(T x, int k)
{
    T r = 1;
    while (k) {
        if (k & 1) r *= x;
        x *= x;
        k >>= 1;
    }
    return r;
}

std::string to_string(quad x, int digits = 36);
std::string to_string(double x);  // shortest round trip
quad parse_quad(const std::string& s);

} // namespace num
} // namespace lorenz
