#pragma once
// Distinguished parameters in the standard family {Q_{u,v}} at fixed (c, alpha):
// full vertices of (nested) islands, island boxes, and the asymptotic
// predictions for the renormalized critical point.
//
// Parameters are carried as (du, dv) = (1-u, 1-v) in __float128; islands of
// depth n shrink roughly like a product of D^{-a_k} and double runs out
// of digits quickly.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lorenz/map_core.hpp"
#include "lorenz/renorm.hpp"

namespace lorenz {

struct FamilySpec {
    double c = 0.5;
    double alpha = 2;

    BasicMap<quad> at(quad du, quad dv) const { return BasicMap<quad>(quad(c), quad(alpha), 1 - du, 1 - dv); }
};

struct ParamPoint {
    quad du = 0, dv = 0;
};

struct ParamBox {
    quad du_lo = 0, du_hi = 0, dv_lo = 0, dv_hi = 0;
    bool contains(const ParamPoint& x) const
    {
        return x.du >= du_lo && x.du <= du_hi && x.dv >= dv_lo && x.dv <= dv_hi;
    }
    bool strictly_inside(const ParamBox& o) const
    {
        return du_lo > o.du_lo && du_hi < o.du_hi && dv_lo > o.dv_lo && dv_hi < o.dv_hi;
    }
    quad width_u() const { return du_hi - du_lo; }
    quad width_v() const { return dv_hi - dv_lo; }
};

struct IslandRecord {
    Schedule schedule;  // types of levels 1..depth; the island is D at the last one
    ParamPoint vertex;
    quad r1 = 0, r2 = 0;  // fullness residuals at the vertex (rescaled units)
    quad c_prime = 0.5;
    std::optional<ParamBox> box;
    int newton_iterations = 0;

    TypePair type() const { return schedule.back(); }
    int depth() const { return int(schedule.size()); }
    StandardLorenzMap map_double(const FamilySpec& s) const
    {
        return StandardLorenzMap(s.c, s.alpha, double(1 - vertex.du), double(1 - vertex.dv));
    }
};

struct GammaEstimate {
    double gamma_minus = 1, gamma_plus = 1;
    int truncation = 0;
    double tail_bound = 0;
};

struct SolveOptions {
    int max_iterations = 60;
    double tolerance = 1e-25;  // on max |r_i|
};

StandardLorenzMap full_map(const FamilySpec& spec);

// Residual pair (r1, r2) of the deepest level; nullopt if the level
// geometry cannot be computed at this parameter.
std::optional<std::array<quad, 2>> fullness_residuals(const FamilySpec& spec, const Schedule& s, const ParamPoint& x);

// Solves residuals(x) = target by damped Newton from x0.
std::optional<IslandRecord> solve_vertex(const FamilySpec& spec, const Schedule& s, ParamPoint x0,
                                         std::array<quad, 2> target = {0, 0}, const SolveOptions& opt = {});

// (du, dv) of the full vertex of D_{a,b} for a standard map with critical
// point c, from the leading-order expansion at the fixed points.
ParamPoint standard_guess(double c, double alpha, int a, int b);

IslandRecord full_vertex(const FamilySpec& spec, int a, int b);

// Full vertex of the level-n island inside the level-(n-1) island `prev`.
IslandRecord nested_vertex(const FamilySpec& spec, const IslandRecord& prev, TypePair next);

// Convenience: all vertices along a schedule.
std::vector<IslandRecord> vertex_chain(const FamilySpec& spec, const Schedule& s);

// Jacobian of the renormalized critical-value defects (du', dv') = (-r1, r2)
// with respect to (du, dv).
std::array<std::array<quad, 2>, 2> defect_jacobian(const FamilySpec& spec, const Schedule& s, const ParamPoint& x);

// Island box around a vertex (see README for the probing scheme).
ParamBox island_box(const FamilySpec& spec, const IslandRecord& rec);
IslandRecord with_box(const FamilySpec& spec, IslandRecord rec);

bool renormalizable_at(const FamilySpec& spec, const Schedule& s, const ParamPoint& x);

GammaEstimate gamma_estimates(const StandardLorenzMap& full, int truncation);

double theta(const StandardLorenzMap& full);
double theta_alpha(double alpha);
double g_alpha(double alpha);

// log of the predicted c'/(1-c') for a full map with critical point chat,
// fixed-point derivatives df0, df1 and gamma ratio.
double predicted_log_odds(double chat, double alpha, double df0, double df1, double log_gamma, int a, int b);
double predicted_crit(const FamilySpec& spec, int a, int b, int truncation = 60);

enum class FlipDirection { lower, raise };

struct FlipOffsets {
    int n = 0;  // b = floor(theta a) - n gives c' in [1/8,1/3]
    int m = 0;  // b = floor(theta a) - m gives c' >= 2/3
    double theta = 1;
    std::vector<int> tested_a;
    std::vector<double> measured_lower, measured_raise;
    std::string trace;
};

FlipOffsets flip_offsets(const FamilySpec& spec, const std::vector<int>& a_values);

} // namespace lorenz
