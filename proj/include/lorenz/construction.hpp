#pragma once
// Inductive construction of a deep-renormalizable standard map whose
// right-side frequencies swing between levels, plus the orbit statistics
// used to observe the swings.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lorenz/family_search.hpp"
#include "lorenz/measures.hpp"

namespace lorenz {

// plus: next critical point in [2/3, 7/8]; minus: in [1/8, 1/3]
enum class Flip { plus, minus };
const char* flip_name(Flip f);
Flip parse_flip(const std::string& s);

struct Band {
    double lo, hi;
    bool contains(double x) const { return x >= lo && x <= hi; }
};
Band flip_band(Flip f);

struct ScheduleLevel {
    TypePair type;
    Flip flip = Flip::plus;
    int K = 1;
    double theta = 1;   // of the standard full map at the previous critical point
    int offset = 0;     // floor(theta a) - b
    double predicted_c = 0.5;
    double measured_c = 0.5;
    double interval_length = 1;  // |C_n| at the level vertex
};

struct CombinatoricsSchedule {
    std::vector<ScheduleLevel> levels;
    std::vector<double> eps;
    std::vector<int> K;
    std::vector<std::string> trace;

    Schedule types() const;
    int depth() const { return int(levels.size()); }
};

// calibrated: a_n, b_n >= K_n from calibrate_K.
// parity: the parity estimates are required of the chosen schedule itself.
// fixed: a_n, b_n >= fixed_K[n-1] (last entry repeats); eps is not used.
enum class KMode { calibrated, parity, fixed };

struct SchedulerOptions {
    int max_depth = 4;
    KMode k_mode = KMode::calibrated;
    std::vector<int> fixed_K{1};
    Flip first = Flip::plus;
    int max_entry = 48;
    BigInt return_time_cap = 10000000;
    double min_interval = 1e-8;  // smallest |C_n| the orbit statistics can resolve
    int max_candidates = 16;
};

CombinatoricsSchedule schedule_combinatorics(const FamilySpec& spec, int depth, const std::vector<double>& eps,
                                             const SchedulerOptions& opt = {});

struct ConstructionState {
    FamilySpec spec;
    Schedule schedule;
    std::vector<Flip> flips;
    std::vector<IslandRecord> islands;  // with boxes
    std::vector<double> c_chain;        // c, c'_1, ..., c'_n
    ReturnTimes times;
    std::vector<double> interval_lengths;  // |C_0| = 1, |C_1|, ...
    std::vector<GapRatio> gaps;            // at the deepest vertex
    std::vector<double> attractor;         // total length of Lambda_0..Lambda_n
    std::vector<double> kappa;             // T_n^+ / T_n^-
    ParamPoint final_point;
    bool boxes_nested = false;
    bool verified = false;
    bool complete = false;
    std::string error;

    int depth() const { return int(islands.size()); }
    BasicMap<quad> final_map() const { return spec.at(final_point.du, final_point.dv); }
};

ConstructionState build_example(const FamilySpec& spec, const CombinatoricsSchedule& schedule);
ConstructionState build_example(const FamilySpec& spec, const Schedule& types, const std::vector<Flip>& flips);

// T^+_{n+2}/T^-_{n+2} >= theta_alpha^2 T^+_n/T^-_n for consecutive pairs of levels
std::vector<bool> ratio_growth(const ReturnTimes& t, double alpha);

std::vector<double> attractor_length(const BasicMap<quad>& f, const Schedule& s, int depth);

// Orbit statistics -----------------------------------------------------------

struct OrbitStats {
    int sample_id = 0;
    double x0 = 0;
    std::vector<std::uint64_t> t;
    std::vector<double> right_frequency;
    int resamples = 0;
};

struct BirkhoffOptions {
    int samples = 1000;
    std::vector<std::uint64_t> checkpoints;
    int workers = 0;
    double crit_tol = kCritTol;
};

OrbitStats orbit_stats(const BasicMap<long double>& f, long double x0, const std::vector<std::uint64_t>& checkpoints,
                       double crit_tol = kCritTol);

std::vector<OrbitStats> birkhoff_stats(const BasicMap<long double>& f, std::uint64_t seed, const BirkhoffOptions& opt);

// Expected time scales of the successive levels: an orbit spends roughly
// |C_k|/|C_{k+1}| level-k returns in Lambda_k before it reaches C_{k+1}.
struct Phase {
    int level = 0;
    double begin = 0, end = 0;
    double mean_return = 1;
    double left_visits = 0.5;  // share of level-k returns that start in C_k^-
    double predicted_right = 0.5;
    std::uint64_t checkpoint = 1;
};

struct PhasePlan {
    std::vector<Phase> phases;
    int plus_phase = 0, minus_phase = 0;
    std::uint64_t plus_checkpoint = 1, minus_checkpoint = 1;
    std::vector<std::uint64_t> checkpoints() const;
};

PhasePlan phase_plan(const ConstructionState& st, std::uint64_t seed, std::uint64_t max_t = 20000000);

struct Oscillation {
    std::uint64_t t_plus = 0, t_minus = 0;
    double median_plus = 0, median_minus = 0;
    double fraction = 0;  // samples with r(t_plus) >= hi and r(t_minus) <= lo
    int samples = 0;
};

Oscillation oscillation(const std::vector<OrbitStats>& stats, std::uint64_t t_plus, std::uint64_t t_minus,
                        double hi = 0.7, double lo = 0.3);

} // namespace lorenz
