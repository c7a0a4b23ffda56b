#include "lorenz/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "lorenz/family_search.hpp"
#include "lorenz/measures.hpp"

namespace lorenz {

GoldenSetup::GoldenSetup()
{
    scheduler.k_mode = KMode::fixed;
    scheduler.fixed_K = {4};
    scheduler.first = Flip::plus;
}

GoldenRun golden_construction(const GoldenSetup& g)
{
    GoldenRun run;
    run.schedule = schedule_combinatorics(g.spec, g.depth, {0.1}, g.scheduler);
    run.state = build_example(g.spec, run.schedule);
    return run;
}

void golden_birkhoff(GoldenRun& run, std::uint64_t seed, int samples, int workers)
{
    run.plan = phase_plan(run.state, seed);
    BirkhoffOptions bo;
    bo.samples = samples;
    bo.workers = workers;
    bo.checkpoints = run.plan.checkpoints();
    auto f = run.state.final_map().cast<long double>();
    run.stats = birkhoff_stats(f, seed, bo);
    run.osc = oscillation(run.stats, run.plan.plus_checkpoint, run.plan.minus_checkpoint);
}

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double x, int prec = 4)
{
    std::ostringstream o;
    o << std::setprecision(prec) << x;
    return o.str();
}

CriterionResult cocycle_counts()
{
    CriterionResult r{1, "winding cocycle vs orbit counting", false, "", 0, 10};
    FamilySpec spec{0.5, 2};
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> entry(1, 6), depth(1, 3);
    int ok = 0, total = 20;
    std::string bad;
    for (int i = 0; i < total; ++i) {
        Schedule s;
        int d = depth(rng);
        for (int k = 0; k < d; ++k) {
            int a = entry(rng);
            s.push_back({a, entry(rng)});
        }
        try {
            auto chain = vertex_chain(spec, s);
            auto cyc = cycles(spec.at(chain.back().vertex.du, chain.back().vertex.dv), s, d);
            auto T = return_times(s);
            bool eq = true;
            for (int n = 0; n <= d; ++n)
                eq = eq && T[n].minus == cyc[n].minus_intervals.size() && T[n].plus == cyc[n].plus_intervals.size();
            if (eq) ++ok; else bad += " " + format_schedule(s) + "(mismatch)";
        } catch (const Error& e) {
            bad += " " + format_schedule(s) + "(" + e.what() + ")";
        }
    }
    r.pass = ok == total;
    r.detail = std::to_string(ok) + "/" + std::to_string(total) + " schedules match" + bad;
    return r;
}

CriterionResult symmetry_golden()
{
    CriterionResult r{2, "symmetric full vertices", true, "", 0, 10};
    FamilySpec spec{0.5, 2};
    std::ostringstream d;
    for (int k : {1, 2, 3, 5}) {
        auto rec = full_vertex(spec, k, k);
        double du = double(num::abs(rec.vertex.du - rec.vertex.dv));
        double cp = double(rec.c_prime);
        bool ok = du <= 1e-8 && std::fabs(cp - 0.5) <= 1e-6;
        r.pass = r.pass && ok;
        d << "k=" << k << " |u-v|=" << fmt(du, 2) << " c'=" << fmt(cp, 12) << "; ";
    }
    r.detail = d.str();
    return r;
}

CriterionResult newc_convergence()
{
    CriterionResult r{3, "renormalized critical point prediction", false, "", 0, 120};
    FamilySpec spec{0.5, 2};
    std::vector<double> err;
    for (int k = 5; k <= 20; ++k) {
        double cp = double(full_vertex(spec, k, k).c_prime);
        double pc = predicted_crit(spec, k, k);
        double meas = cp / (1 - cp), pred = pc / (1 - pc);
        err.push_back(std::fabs(meas / pred - 1));
    }
    // relative errors at the level of the vertex solve are indistinguishable
    const double floor = 1e-9;
    bool mono = true;
    for (std::size_t i = err.size() - 5; i < err.size(); ++i)
        if (err[i] > std::max(err[i - 1], floor)) mono = false;
    r.pass = err.back() <= 0.1 && mono;
    std::ostringstream d;
    d << "rel err k=16..20:";
    for (std::size_t i = err.size() - 5; i < err.size(); ++i) d << " " << fmt(err[i], 3);
    r.detail = d.str();
    return r;
}

CriterionResult flip_bands()
{
    CriterionResult r{4, "flip bands at c=0.7", false, "", 0, 300};
    FamilySpec spec{0.7, 2};
    int N = 0;
    FlipOffsets fo;
    for (int a0 = 2; a0 <= 20 && !N; ++a0) {
        try {
            fo = flip_offsets(spec, {a0, a0 + 1, a0 + 2, a0 + 3, a0 + 4, a0 + 5});
            N = a0;
        } catch (const NotFound&) {
        }
    }
    if (!N) {
        r.detail = "no calibrated N up to 20";
        return r;
    }
    // verify on a wider range than the calibration used
    int ok = 0, tested = 0;
    double lower_min = 1, lower_max = 0, raise_min = 1;
    for (int a = N; a < N + 10; ++a) {
        int b_lo = int(std::floor(fo.theta * a)) - fo.n, b_hi = int(std::floor(fo.theta * a)) - fo.m;
        ++tested;
        try {
            double cl = double(full_vertex(spec, a, b_lo).c_prime);
            double ch = double(full_vertex(spec, a, b_hi).c_prime);
            lower_min = std::min(lower_min, cl);
            lower_max = std::max(lower_max, cl);
            raise_min = std::min(raise_min, ch);
            if (cl >= 1.0 / 8 && cl <= 1.0 / 3 && ch >= 2.0 / 3) ++ok;
        } catch (const Error&) {
        }
    }
    r.pass = ok == tested && tested >= 3;
    r.detail = "N=" + std::to_string(N) + " n=" + std::to_string(fo.n) + " m=" + std::to_string(fo.m) + " a in [" +
               std::to_string(N) + "," + std::to_string(N + 9) + "]: " + std::to_string(ok) + "/" +
               std::to_string(tested) +  " in band; lowered c' in [" + fmt(lower_min) + "," +
               fmt(lower_max) + "], raised c' >= " + fmt(raise_min);
    return r;
}

CriterionResult constants()
{
    CriterionResult r{5, "theta_alpha and g(alpha)", true, "", 0, 1};
    const double lower = std::exp(-3 / std::exp(1.0));
    for (int i = 1; i <= 100; ++i) {
        double a = 1 + 49.0 * i / 100;
        double two_g = 2 * g_alpha(a);
        if (!(theta_alpha(a) > 1) || !(two_g >= lower - 1e-15) || !(two_g < 1)) r.pass = false;
    }
    double gmin = 1;
    for (int i = 1; i <= 100000; ++i) gmin = std::min(gmin, g_alpha(1 + 49.0 * i / 100000));
    bool spot = std::fabs(lower / 2 - 0.165) <= 0.001 && std::fabs(gmin - lower / 2) <= 1e-6;
    r.pass = r.pass && spot;
    r.detail = "e^{-3/e}/2=" + fmt(lower / 2, 6) + " min g on grid=" + fmt(gmin, 6);
    return r;
}

CriterionResult gaps()
{
    CriterionResult r{6, "gap ratios along a=b=k", false, "", 0, 60};
    FamilySpec spec{0.5, 2};
    std::vector<double> left, right, worst;
    for (int k = 1; k <= 14; ++k) {
        auto rec = full_vertex(spec, k, k);
        auto g = gap_ratios(spec.at(rec.vertex.du, rec.vertex.dv), Schedule{{k, k}}, 1);
        left.push_back(g.at(0).left);
        right.push_back(g.at(0).right);
        worst.push_back(std::max(g.at(0).left, g.at(0).right));
    }
    bool dec = true;
    for (std::size_t i = 1; i < worst.size(); ++i) dec = dec && left[i] < left[i - 1] && right[i] < right[i - 1];
    int N = 0;
    for (int k = int(worst.size()); k >= 1 && worst[k - 1] <= 0.1; --k) N = k;
    r.pass = dec && N >= 1 && N <= 12;
    r.detail = "decreasing=" + std::string(dec ? "yes" : "no") + " N=" + std::to_string(N) +
               " ratio(k=1)=" + fmt(worst.front()) + " ratio(N)=" + (N ? fmt(worst[N - 1]) : "-");
    return r;
}

CriterionResult parity()
{
    CriterionResult r{7, "parity of basis measures", false, "", 0, 60};
    const double eps = 0.1;
    auto cal = calibrate_K(2, 0.5, {eps}, 3);
    Schedule s;
    for (int k : cal.K) s.push_back({k, k});
    bool ok = parity_holds(s, {eps});
    std::ostringstream d;
    d << "K=" << format_schedule(s) << ";";
    for (int n = 1; n <= 3; ++n) {
        double own_m = n % 2 == 0 ? word_half_weights(s, n, Side::L).left_d() : word_half_weights(s, n, Side::L).right_d();
        double own_p = n % 2 == 0 ? word_half_weights(s, n, Side::R).right_d() : word_half_weights(s, n, Side::R).left_d();
        d << " n=" << n << ":" << fmt(own_m) << "," << fmt(own_p);
    }
    // geometric count on the first level agrees with the word count
    FamilySpec spec{0.5, 2};
    auto rec = full_vertex(spec, s[0].a, s[0].b);
    auto f = spec.at(rec.vertex.du, rec.vertex.dv);
    Schedule s1{s[0]};
    bool geo = half_weights(f, s1, 1, Side::L).left == word_half_weights(s1, 1, Side::L).left &&
               half_weights(f, s1, 1, Side::R).left == word_half_weights(s1, 1, Side::R).left;
    d << " geometric level-1 check " << (geo ? "agrees" : "DISAGREES");
    r.pass = ok && geo;
    r.detail = d.str();
    return r;
}

CriterionResult acim(std::uint64_t seed, int workers)
{
    CriterionResult r{8, "acim half-weights", false, "", 0, 60};
    AcimOptions ao;
    ao.workers = workers;
    auto sym = acim_half_weights(StandardLorenzMap(0.5, 2, 1, 1), seed, ao);
    auto asym = acim_half_weights(StandardLorenzMap(0.6, 2, 1, 1), seed, ao);
    r.pass = std::fabs(sym.left - 0.5) <= 0.02 && std::fabs(sym.right - 0.5) <= 0.02 && asym.left >= 0.05 &&
             asym.right >= 0.05 && sym.half_width <= 0.02 && asym.half_width <= 0.02;
    r.detail = "c=0.5: (" + fmt(sym.left) + "," + fmt(sym.right) + ") hw " + fmt(sym.half_width, 2) + "; c=0.6: (" +
               fmt(asym.left) + "," + fmt(asym.right) + ") hw " + fmt(asym.half_width, 2);
    return r;
}

CriterionResult oscillation_check(const GoldenRun& run)
{
    CriterionResult r{9, "birkhoff oscillation on the golden map", false, "", 0, 600};
    const auto& o = run.osc;
    r.pass = o.fraction >= 0.5 && o.median_plus - o.median_minus >= 0.4;
    r.detail = "schedule " + format_schedule(run.state.schedule) + " t+=" + std::to_string(o.t_plus) +
               " t-=" + std::to_string(o.t_minus) + " fraction=" + fmt(o.fraction, 3) + " median+=" +
               fmt(o.median_plus, 3) + " median-=" + fmt(o.median_minus, 3);
    return r;
}

CriterionResult attractor_check(const GoldenRun& run)
{
    CriterionResult r{10, "attractor shrinking on the golden map", false, "", 0, 600};
    const auto& a = run.state.attractor;
    bool ok = a.size() >= 2;
    std::ostringstream d;
    d << "lengths";
    for (std::size_t i = 0; i < a.size(); ++i) {
        d << " " << fmt(a[i], 3);
        if (i > 0 && !(a[i] < a[i - 1] && a[i] <= 0.5 * a[i - 1])) ok = false;
    }
    r.pass = ok;
    r.detail = d.str();
    return r;
}

template <class F> CriterionResult timed(int id, const std::string& name, double limit, F&& f)
{
    auto t0 = Clock::now();
    CriterionResult r;
    try {
        r = f();
    } catch (const std::exception& e) {
        r.id = id;
        r.name = name;
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.id = id;
    r.limit_seconds = limit;
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (r.seconds > limit) {
        r.pass = false;
        r.detail += " (over the " + fmt(limit) + " s budget)";
    }
    return r;
}

} // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result)
{
    auto wanted = [&](int id) { return opt.only.empty() || std::count(opt.only.begin(), opt.only.end(), id); };
    std::vector<CriterionResult> out;
    auto emit = [&](CriterionResult r) {
        if (on_result) on_result(r);
        out.push_back(std::move(r));
    };
    if (wanted(1)) emit(timed(1, "winding cocycle vs orbit counting", 10, cocycle_counts));
    if (wanted(2)) emit(timed(2, "symmetric full vertices", 10, symmetry_golden));
    if (wanted(3)) emit(timed(3, "renormalized critical point prediction", 120, newc_convergence));
    if (wanted(4)) emit(timed(4, "flip bands at c=0.7", 300, flip_bands));
    if (wanted(5)) emit(timed(5, "theta_alpha and g(alpha)", 1, constants));
    if (wanted(6)) emit(timed(6, "gap ratios along a=b=k", 60, gaps));
    if (wanted(7)) emit(timed(7, "parity of basis measures", 60, parity));
    if (wanted(8)) emit(timed(8, "acim half-weights", 60, [&] { return acim(opt.seed, opt.workers); }));
    if (wanted(9) || wanted(10)) {
        GoldenRun run;
        auto t0 = Clock::now();
        std::string err;
        try {
            run = golden_construction(GoldenSetup{});
            if (!run.state.complete) err = "golden construction incomplete: " + run.state.error;
            else if (wanted(9)) golden_birkhoff(run, opt.seed, opt.samples, opt.workers);
        } catch (const std::exception& e) {
            err = e.what();
        }
        double shared = std::chrono::duration<double>(Clock::now() - t0).count();
        auto finish = [&](int id, const std::string& name, auto&& f) {
            CriterionResult r = err.empty() ? timed(id, name, 600, f) : CriterionResult{id, name, false, err, 0, 600};
            r.seconds += shared;
            if (r.seconds > r.limit_seconds) r.pass = false;
            emit(r);
        };
        if (wanted(9)) finish(9, "birkhoff oscillation on the golden map", [&] { return oscillation_check(run); });
        if (wanted(10)) finish(10, "attractor shrinking on the golden map", [&] { return attractor_check(run); });
    }
    return out;
}

std::string format_result(const CriterionResult& r)
{
    std::ostringstream o;
    o << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.name << ") [" << std::fixed
      << std::setprecision(2) << r.seconds << " s] " << r.detail;
    return o.str();
}

} // namespace lorenz
