#pragma once
// Winding matrices, return times and the level-n basis measures.
//
// mu_n^- (mu_n^+) gives equal mass to every interval of Lambda_n^-
// (Lambda_n^+). Push-forwards and half-weights are exact rationals.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lorenz/map_core.hpp"
#include "lorenz/renorm.hpp"

namespace lorenz {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

struct WindingMatrix {
    std::array<std::array<int, 2>, 2> m{{{1, 1}, {1, 1}}};
    bool operator==(const WindingMatrix&) const = default;
};

WindingMatrix winding(int a, int b);

struct TimePair {
    BigInt minus = 1, plus = 1;
    bool operator==(const TimePair&) const = default;
};

// T_0..T_n for a schedule of length n
using ReturnTimes = std::vector<TimePair>;

TimePair apply_transpose(const WindingMatrix& w, const TimePair& t);
ReturnTimes return_times(const Schedule& s);

struct MeasureVector {
    int level = 0;
    Rational minus = 1, plus = 0;  // coefficients on mu_n^-, mu_n^+
    ReturnTimes times;             // T_0..T_level
    double minus_d() const { return minus.convert_to<double>(); }
    double plus_d() const { return plus.convert_to<double>(); }
};

// Basis vector mu_n^side at level n of the schedule.
MeasureVector basis(const Schedule& s, int level, Side side);

// Level n+1 -> level n.
MeasureVector pushforward(const MeasureVector& mv, int a_next, int b_next);

// Projection all the way to level 0: weights on [0,c] and [c,1].
MeasureVector project_to_base(const MeasureVector& mv, const Schedule& s);

struct HalfWeights {
    Rational left = 0, right = 0;  // mass on [0,c] and [c,1]
    double left_d() const { return left.convert_to<double>(); }
    double right_d() const { return right.convert_to<double>(); }
};

// Counts the level-n cycle intervals on each side of c. Geometry in quad.
HalfWeights half_weights(const StandardLorenzMap& f, const Schedule& s, int level, Side side);
HalfWeights half_weights(const BasicMap<quad>& f, const Schedule& s, int level, Side side);
HalfWeights half_weights(const std::vector<CycleLevel>& cyc, double c, int level, Side side);

// Same count from the cycle word: the k-th interval of Lambda_n^side lies
// left of c exactly when the k-th symbol of W_n^side is L.
HalfWeights word_half_weights(const Schedule& s, int level, Side side);

// Parity pattern: on even levels mu_n^- sits on [0,c] and mu_n^+ on [c,1]
// up to eps; on odd levels the sides swap.
bool parity_holds(const Schedule& s, const std::vector<double>& eps);

struct KCalibration {
    std::vector<int> K;
    double box_ratio = 2;      // a_n, b_n tested on corners of [K_n, ratio*K_n]
    std::vector<std::string> trace;
    BigInt max_return_time = 0;
};

struct CalibrateOptions {
    double box_ratio = 2;
    int max_K = 1 << 14;
    BigInt return_time_cap = BigInt(1) << 62;
};

// eps has one entry per level (a single entry is repeated).
KCalibration calibrate_K(double alpha, double c, const std::vector<double>& eps, int depth,
                         const CalibrateOptions& opt = {});

struct AcimEstimate {
    double left = 0, right = 0;
    double half_width = 0;  // bootstrap 95% half-width of the left weight
    int samples = 0;
    std::uint64_t iterations = 0;
    int restarts = 0;  // orbits that landed on a fixed point or c in floating point
};

struct AcimOptions {
    int samples = 64;
    std::uint64_t iterations = 200000;
    std::uint64_t burn_in = 1000;
    int bootstrap = 400;
    double max_half_width = 0.02;
    int workers = 1;
};

AcimEstimate acim_half_weights(const StandardLorenzMap& f, std::uint64_t seed, const AcimOptions& opt = {});

std::string to_string(const BigInt& x);
std::string to_string(const Rational& x);

} // namespace lorenz
