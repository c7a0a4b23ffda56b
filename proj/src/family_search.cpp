#include "lorenz/family_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace lorenz {

namespace {

using Vec2 = std::array<quad, 2>;
using Mat2 = std::array<std::array<quad, 2>, 2>;

std::optional<Vec2> solve2(const Mat2& J, const Vec2& r)
{
    quad det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (det == 0 || !(num::abs(det) < quad(1e4000L))) return std::nullopt;
    return Vec2{(J[1][1] * r[0] - J[0][1] * r[1]) / det, (J[0][0] * r[1] - J[1][0] * r[0]) / det};
}

quad norm_inf(const Vec2& v) { return std::max(num::abs(v[0]), num::abs(v[1])); }

bool valid_param(const ParamPoint& x) { return x.du >= 0 && x.dv >= 0 && x.du < 1 && x.dv < 1; }

std::optional<Vec2> defect(const FamilySpec& spec, const Schedule& s, const ParamPoint& x, const Vec2& target)
{
    auto r = fullness_residuals(spec, s, x);
    if (!r) return std::nullopt;
    return Vec2{(*r)[0] - target[0], (*r)[1] - target[1]};
}

// Forward differences with a step sized so the residual moves by ~1e-12.
std::optional<Mat2> fd_jacobian(const FamilySpec& spec, const Schedule& s, const ParamPoint& x, const Vec2& r0)
{
    Mat2 J{};
    for (int j = 0; j < 2; ++j) {
        quad base = j == 0 ? x.du : x.dv;
        // u = 1 - du is stored in quad, so steps below a few ulps of 1 vanish
        const quad floor = 64 * num::epsilon<quad>();
        quad h = std::max(std::max(base, quad(1e-30)) * quad(1e-20), floor);
        for (int pass = 0; pass < 2; ++pass) {
            std::optional<Vec2> r;
            quad hh = h;
            for (int sign = 0; sign < 2 && !r; ++sign) {
                hh = sign ? -h : h;
                ParamPoint y = x;
                (j == 0 ? y.du : y.dv) += hh;
                if (valid_param(y)) r = fullness_residuals(spec, s, y);
            }
            if (!r) return std::nullopt;
            J[0][j] = ((*r)[0] - r0[0]) / hh;
            J[1][j] = ((*r)[1] - r0[1]) / hh;
            quad col = std::max(num::abs(J[0][j]), num::abs(J[1][j]));
            if (col == 0) return std::nullopt;
            quad h2 = quad(1e-12) / col;
            h2 = std::max(std::min(h2, std::max(base, quad(1e-30)) * quad(1e-3)), floor);
            if (pass == 0) h = h2;
        }
    }
    return J;
}

IslandRecord make_record(const FamilySpec& spec, const Schedule& s, const ParamPoint& x, const Vec2& r, int it)
{
    IslandRecord rec;
    rec.schedule = s;
    rec.vertex = x;
    rec.r1 = r[0];
    rec.r2 = r[1];
    rec.newton_iterations = it;
    auto g = Tower<quad>(spec.at(x.du, x.dv), s).geometry(int(s.size()), false);
    rec.c_prime = g.levels.back().cprime(quad(spec.c));
    return rec;
}

struct Probe {
    Vec2 r;
    ParamPoint x;
};

// Damped Newton on y -> residuals with finite differences in y; y is a
// log-scale coordinate so steps are capped at a factor e. Finishes with a
// direct solve when that converges, else returns the log-space point.
template <class Eval, class Warm>
std::optional<IslandRecord> log_newton(const FamilySpec& spec, const Schedule& s, Vec2 y, Eval&& eval, Warm&& warm)
{
    auto cur = eval(y);
    int it = 0;
    for (; cur && it < 40 && norm_inf(cur->r) > quad(1e-20); ++it) {
        warm(*cur);
        Mat2 J{};
        bool ok = true;
        for (int j = 0; j < 2 && ok; ++j) {
            Vec2 yj = y;
            yj[j] += quad(1e-7);
            auto ej = eval(yj);
            if (!ej) {
                yj[j] = y[j] - quad(1e-7);
                ej = eval(yj);
            }
            if (!ej) {
                ok = false;
                break;
            }
            for (int i = 0; i < 2; ++i) J[i][j] = (ej->r[i] - cur->r[i]) / (yj[j] - y[j]);
        }
        if (!ok) break;
        auto d = solve2(J, Vec2{-cur->r[0], -cur->r[1]});
        if (!d) break;
        quad big = std::max(num::abs((*d)[0]), num::abs((*d)[1]));
        quad lam = big > 1 ? 1 / big : quad(1);
        bool moved = false;
        quad before = norm_inf(cur->r);
        for (int ls = 0; ls < 12; ++ls, lam /= 2) {
            Vec2 yn{y[0] + lam * (*d)[0], y[1] + lam * (*d)[1]};
            auto en = eval(yn);
            if (en && norm_inf(en->r) < before) {
                y = yn;
                cur = en;
                moved = true;
                break;
            }
        }
        // at the noise floor of the parent solves progress becomes marginal
        if (!moved || (before < quad(1e-9) && norm_inf(cur->r) > before / 10)) break;
    }
    if (!cur) return std::nullopt;
    SolveOptions polish;
    polish.max_iterations = 8;
    auto rec = solve_vertex(spec, s, cur->x, Vec2{0, 0}, polish);
    // deep levels: the direct (du, dv) Newton can stall where this one did not
    if (!rec && norm_inf(cur->r) <= quad(1e-9)) rec = make_record(spec, s, cur->x, cur->r, it);
    return rec;
}

} // namespace

StandardLorenzMap full_map(const FamilySpec& spec) { return StandardLorenzMap(spec.c, spec.alpha, 1.0, 1.0); }

std::optional<std::array<quad, 2>> fullness_residuals(const FamilySpec& spec, const Schedule& s, const ParamPoint& x)
{
    if (!valid_param(x)) return std::nullopt;
    BasicMap<quad> f;
    try {
        f = spec.at(x.du, x.dv);
    } catch (const InvalidMap&) {
        return std::nullopt;
    }
    int depth = int(s.size());
    auto g = Tower<quad>(f, s).geometry(depth, false);
    if (int(g.levels.size()) < depth) return std::nullopt;
    const auto& lv = g.levels.back();
    return Vec2{lv.r1(), lv.r2()};
}

bool renormalizable_at(const FamilySpec& spec, const Schedule& s, const ParamPoint& x)
{
    if (!valid_param(x)) return false;
    BasicMap<quad> f;
    try {
        f = spec.at(x.du, x.dv);
    } catch (const InvalidMap&) {
        return false;
    }
    if (!f.nontrivial()) return false;
    return Tower<quad>(f, s).geometry(int(s.size()), true).ok();
}

std::optional<IslandRecord> solve_vertex(const FamilySpec& spec, const Schedule& s, ParamPoint x, Vec2 target,
                                         const SolveOptions& opt)
{
    auto r = defect(spec, s, x, target);
    if (!r) return std::nullopt;
    const quad tol = quad(opt.tolerance);
    int it = 0;
    for (; it < opt.max_iterations && norm_inf(*r) > tol; ++it) {
        auto J = fd_jacobian(spec, s, x, Vec2{(*r)[0] + target[0], (*r)[1] + target[1]});
        if (!J) return std::nullopt;
        auto d = solve2(*J, Vec2{-(*r)[0], -(*r)[1]});
        if (!d) return std::nullopt;
        quad lam = 1;
        bool moved = false;
        for (int ls = 0; ls < 40; ++ls, lam /= 2) {
            ParamPoint y{x.du + lam * (*d)[0], x.dv + lam * (*d)[1]};
            auto ry = defect(spec, s, y, target);
            if (ry && norm_inf(*ry) < norm_inf(*r)) {
                x = y;
                r = ry;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    if (norm_inf(*r) > quad(1e-9)) return std::nullopt;
    return make_record(spec, s, x, Vec2{(*r)[0] + target[0], (*r)[1] + target[1]}, it);
}

namespace {

// Near the quad resolution of u the solved corner can sit a rounding step
// outside the island; move it inward by a residual of order the tolerance.
std::optional<IslandRecord> settle_inside(const FamilySpec& spec, const Schedule& s, IslandRecord rec)
{
    if (renormalizable_at(spec, s, rec.vertex)) return rec;
    for (quad d : {quad(1e-11), quad(1e-10)}) {
        auto in = solve_vertex(spec, s, rec.vertex, Vec2{-d, d});
        if (in && renormalizable_at(spec, s, in->vertex)) return in;
    }
    return std::nullopt;
}

} // namespace

ParamPoint standard_guess(double c, double alpha, int a, int b)
{
    quad cq = c, al = alpha;
    return {(1 - cq) * num::pow(al / (1 - cq), quad(-a)), cq * num::pow(al / cq, quad(-b))};
}

IslandRecord full_vertex(const FamilySpec& spec, int a, int b)
{
    if (a < 1 || b < 1) throw Infeasible("a and b must be >= 1");
    Schedule s{{a, b}};
    auto rec = solve_vertex(spec, s, standard_guess(spec.c, spec.alpha, a, b));
    if (!rec) {
        // the leading-order guess is poor for small a, b; walk in from the full map
        for (quad t : {quad(0.5), quad(0.25), quad(0.1)}) {
            ParamPoint g = standard_guess(spec.c, spec.alpha, a, b);
            rec = solve_vertex(spec, s, {g.du * t, g.dv * t});
            if (rec) break;
        }
    }
    if (!rec) {
        ParamPoint g = standard_guess(spec.c, spec.alpha, a, b);
        auto eval = [&](const Vec2& y) -> std::optional<Probe> {
            ParamPoint x{num::exp(y[0]), num::exp(y[1])};
            auto r = fullness_residuals(spec, s, x);
            if (!r) return std::nullopt;
            return Probe{*r, x};
        };
        rec = log_newton(spec, s, Vec2{num::log(g.du), num::log(g.dv)}, eval, [](const Probe&) {});
    }
    if (!rec) throw NotFound("full vertex of D_{" + std::to_string(a) + "," + std::to_string(b) + "} not found");
    auto in = settle_inside(spec, s, *rec);
    if (!in) throw InvariantViolation("solved vertex is not renormalizable");
    return *in;
}

std::array<std::array<quad, 2>, 2> defect_jacobian(const FamilySpec& spec, const Schedule& s, const ParamPoint& x)
{
    auto r = fullness_residuals(spec, s, x);
    if (!r) throw NotFound("residuals undefined at Jacobian point");
    auto J = fd_jacobian(spec, s, x, *r);
    if (!J) throw NotFound("Jacobian not computable");
    // (du', dv') = (-r1, r2)
    Mat2 D = *J;
    D[0][0] = -D[0][0];
    D[0][1] = -D[0][1];
    return D;
}

IslandRecord nested_vertex(const FamilySpec& spec, const IslandRecord& prev, TypePair next)
{
    Schedule s = prev.schedule;
    s.push_back(next);
    auto D = defect_jacobian(spec, prev.schedule, prev.vertex);
    ParamPoint t = standard_guess(double(prev.c_prime), spec.alpha, next.a, next.b);
    auto step = solve2(D, Vec2{t.du, t.dv});
    if (!step) throw NotFound("singular renormalization Jacobian");
    ParamPoint x0{prev.vertex.du + (*step)[0], prev.vertex.dv + (*step)[1]};
    auto rec = solve_vertex(spec, s, x0);
    if (!rec) {
        // Newton in the log of the parent-level defects; each evaluation is a
        // parent solve, which stays well conditioned when the child residuals
        // are strongly nonlinear in (du, dv)
        ParamPoint warm = x0;
        auto eval = [&](const Vec2& y) -> std::optional<Probe> {
            Vec2 target{-num::exp(y[0]), num::exp(y[1])};
            SolveOptions po;
            po.tolerance = double(std::min(-target[0], target[1]) * quad(1e-15));
            auto mid = solve_vertex(spec, prev.schedule, warm, target, po);
            if (!mid) return std::nullopt;
            auto r = fullness_residuals(spec, s, mid->vertex);
            if (!r) return std::nullopt;
            return Probe{*r, mid->vertex};
        };
        rec = log_newton(spec, s, Vec2{num::log(t.du), num::log(t.dv)}, eval, [&](const Probe& p) { warm = p.x; });
    }
    if (!rec) {
        // move the parent renormalization exactly onto the guess, then retry
        for (quad scale : {quad(1), quad(0.5), quad(0.25)}) {
            auto mid = solve_vertex(spec, prev.schedule, x0, Vec2{-t.du * scale, t.dv * scale});
            if (!mid) continue;
            rec = solve_vertex(spec, s, mid->vertex);
            if (rec) break;
        }
    }
    if (!rec) throw NotFound("nested vertex for level " + std::to_string(s.size()) + " type (" +
                             std::to_string(next.a) + "," + std::to_string(next.b) + ") not found");
    auto in = settle_inside(spec, s, *rec);
    if (!in) throw InvariantViolation("nested vertex is not renormalizable");
    return *in;
}

std::vector<IslandRecord> vertex_chain(const FamilySpec& spec, const Schedule& s)
{
    std::vector<IslandRecord> out;
    for (std::size_t k = 0; k < s.size(); ++k)
        out.push_back(k == 0 ? full_vertex(spec, s[0].a, s[0].b) : nested_vertex(spec, out.back(), s[k]));
    return out;
}

ParamBox island_box(const FamilySpec& spec, const IslandRecord& rec)
{
    const Schedule& s = rec.schedule;
    quad cp = rec.c_prime;
    auto D = defect_jacobian(spec, s, rec.vertex);
    std::vector<ParamPoint> pts{rec.vertex};

    // corners of the island: images of the corners of the nontrivial square
    // 0 <= du' <= 1-c', 0 <= dv' <= c' (slightly shrunk)
    const quad shrink = quad(0.98);
    const Vec2 corners[3] = {{(1 - cp) * shrink, 0}, {0, cp * shrink}, {(1 - cp) * shrink, cp * shrink}};
    for (const auto& cor : corners) {
        auto step = solve2(D, cor);
        if (!step) continue;
        ParamPoint x0{rec.vertex.du + (*step)[0], rec.vertex.dv + (*step)[1]};
        auto sol = solve_vertex(spec, s, x0, Vec2{-cor[0], cor[1]});
        if (sol) pts.push_back(sol->vertex);
    }

    // anchor in the middle of the island, then outward bisection along the axes
    Vec2 mid{(1 - cp) / 2, cp / 2};
    auto step = solve2(D, mid);
    ParamPoint anchor = rec.vertex;
    if (step) {
        ParamPoint x0{rec.vertex.du + (*step)[0], rec.vertex.dv + (*step)[1]};
        auto sol = solve_vertex(spec, s, x0, Vec2{-mid[0], mid[1]});
        if (sol) anchor = sol->vertex;
    }
    if (renormalizable_at(spec, s, anchor)) {
        quad scale_u = num::abs(mid[0] / std::max(num::abs(D[0][0]), num::abs(D[1][0])));
        quad scale_v = num::abs(mid[1] / std::max(num::abs(D[0][1]), num::abs(D[1][1])));
        for (int axis = 0; axis < 2; ++axis)
            for (int dir = -1; dir <= 1; dir += 2) {
                quad h = (axis == 0 ? scale_u : scale_v) * quad(0.25);
                auto at = [&](quad t) {
                    ParamPoint y = anchor;
                    (axis == 0 ? y.du : y.dv) += dir * t;
                    return y;
                };
                quad good = 0, bad = h;
                int grow = 0;
                while (renormalizable_at(spec, s, at(bad)) && grow < 80) {
                    good = bad;
                    bad *= 2;
                    ++grow;
                }
                if (grow == 80) continue;
                for (int it = 0; it < 60 && bad - good > quad(1e-12) * bad; ++it) {
                    quad m = (good + bad) / 2;
                    if (renormalizable_at(spec, s, at(m))) good = m; else bad = m;
                }
                pts.push_back(at(good));
            }
    }
    ParamBox box{pts[0].du, pts[0].du, pts[0].dv, pts[0].dv};
    for (const auto& p : pts) {
        box.du_lo = std::min(box.du_lo, p.du);
        box.du_hi = std::max(box.du_hi, p.du);
        box.dv_lo = std::min(box.dv_lo, p.dv);
        box.dv_hi = std::max(box.dv_hi, p.dv);
    }
    return box;
}

IslandRecord with_box(const FamilySpec& spec, IslandRecord rec)
{
    rec.box = island_box(spec, rec);
    return rec;
}

GammaEstimate gamma_estimates(const StandardLorenzMap& full, int truncation)
{
    BasicMap<quad> f = full.cast<quad>();
    if (!(f.dleft(0) > 1) || !(f.dright(1) > 1)) throw DivergentProduct("fixed points are not expanding");
    GammaEstimate g;
    g.truncation = truncation;
    quad sm = 0, sp = 0, xm = f.c, xp = f.c, last = 0;
    auto term_m = [&](quad x) { return (f.alpha - 1) * num::log((f.c - x) / f.c); };
    auto term_p = [&](quad x) { return (f.alpha - 1) * num::log((x - f.c) / (1 - f.c)); };
    for (int k = 1; k <= truncation + 1; ++k) {
        xm = f.inv_left(xm);
        xp = f.inv_right(xp);
        quad tm = term_m(xm), tp = term_p(xp);
        if (k <= truncation) {
            sm += tm;
            sp += tp;
        } else {
            last = std::max(num::abs(tm), num::abs(tp));
        }
    }
    quad r = std::max(1 / f.dleft(0), 1 / f.dright(1));
    g.gamma_minus = double(num::exp(sm));
    g.gamma_plus = double(num::exp(sp));
    g.tail_bound = double(last / (1 - r));
    return g;
}

double theta(const StandardLorenzMap& full) { return std::log(full.dright(1.0)) / std::log(full.dleft(0.0)); }

double theta_alpha(double alpha) { return 1 + std::log(2.0) / std::log(3 * alpha); }

double g_alpha(double alpha) { return std::pow(1.5 * alpha, -2 / alpha) / 2; }

double predicted_log_odds(double chat, double alpha, double df0, double df1, double log_gamma, int a, int b)
{
    return std::log(chat / (1 - chat)) + (log_gamma + b * std::log(df0) - a * std::log(df1)) / alpha;
}

double predicted_crit(const FamilySpec& spec, int a, int b, int truncation)
{
    auto f = full_map(spec);
    auto g = gamma_estimates(f, truncation);
    double lo = predicted_log_odds(spec.c, spec.alpha, f.dleft(0), f.dright(1),
                                   std::log(g.gamma_minus / g.gamma_plus), a, b);
    return 1 / (1 + std::exp(-lo));
}

FlipOffsets flip_offsets(const FamilySpec& spec, const std::vector<int>& a_values)
{
    if (spec.c < 2.0 / 3) throw Infeasible("flip offsets need a full map with crit >= 2/3");
    if (a_values.empty()) throw Infeasible("no a values to test");
    auto f = full_map(spec);
    FlipOffsets out;
    out.theta = theta(f);
    out.tested_a = a_values;
    auto g = gamma_estimates(f, 60);
    double lg = std::log(g.gamma_minus / g.gamma_plus);
    auto b_of = [&](int a, int off) { return int(std::floor(out.theta * a)) - off; };
    auto pred = [&](int a, int off) {
        int b = b_of(a, off);
        if (b < 1) return std::numeric_limits<double>::quiet_NaN();
        return predicted_log_odds(spec.c, spec.alpha, f.dleft(0), f.dright(1), lg, a, b);
    };
    const double lo_band = std::log((1.0 / 8) / (7.0 / 8)), hi_band = std::log(0.5), raise = std::log(2.0);

    // rank offsets by their worst predicted margin over the tested a
    std::vector<std::pair<double, int>> lower_rank, raise_rank;
    for (int off = -40; off <= 60; ++off) {
        double ml = 1e9, mr = 1e9;
        for (int a : a_values) {
            double lo = pred(a, off);
            if (std::isnan(lo)) {
                ml = mr = -1e9;
                break;
            }
            ml = std::min({ml, lo - lo_band, hi_band - lo});
            mr = std::min(mr, lo - raise);
        }
        lower_rank.push_back({-ml, off});
        if (mr >= 0) raise_rank.push_back({mr, off});  // smallest sufficient margin first
    }
    std::sort(lower_rank.begin(), lower_rank.end());
    std::sort(raise_rank.begin(), raise_rank.end());
    std::ostringstream trace;

    auto measure = [&](int off, std::vector<double>& cps) {
        cps.clear();
        for (int a : a_values) {
            int b = b_of(a, off);
            if (b < 1) return false;
            try {
                cps.push_back(double(full_vertex(spec, a, b).c_prime));
            } catch (const Error&) {
                return false;
            }
        }
        return true;
    };

    bool found = false;
    for (std::size_t i = 0; i < lower_rank.size() && i < 6 && !found; ++i) {
        int off = lower_rank[i].second;
        if (!measure(off, out.measured_lower)) continue;
        bool ok = std::all_of(out.measured_lower.begin(), out.measured_lower.end(),
                              [](double c) { return c >= 1.0 / 8 && c <= 1.0 / 3; });
        trace << "n=" << off << (ok ? " ok" : " out-of-band") << ";";
        if (ok) {
            out.n = off;
            found = true;
        }
    }
    if (!found) throw NotFound("no offset n puts c' in [1/8,1/3]: " + trace.str());
    found = false;
    for (std::size_t i = 0; i < raise_rank.size() && i < 6 && !found; ++i) {
        int off = raise_rank[i].second;
        if (!measure(off, out.measured_raise)) continue;
        bool ok = std::all_of(out.measured_raise.begin(), out.measured_raise.end(),
                              [](double c) { return c >= 2.0 / 3; });
        trace << "m=" << off << (ok ? " ok" : " out-of-band") << ";";
        if (ok) {
            out.m = off;
            found = true;
        }
    }
    if (!found) throw NotFound("no offset m puts c' above 2/3: " + trace.str());
    out.trace = trace.str();
    return out;
}

} // namespace lorenz
