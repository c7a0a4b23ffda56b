#include "lorenz/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lorenz/sampling.hpp"

namespace lorenz {

const char* flip_name(Flip f) { return f == Flip::plus ? "plus" : "minus"; }

Flip parse_flip(const std::string& s)
{
    if (s == "plus" || s == "+") return Flip::plus;
    if (s == "minus" || s == "-") return Flip::minus;
    throw Infeasible("flip direction must be plus or minus, got '" + s + "'");
}

Band flip_band(Flip f) { return f == Flip::plus ? Band{2.0 / 3, 7.0 / 8} : Band{1.0 / 8, 1.0 / 3}; }

Schedule CombinatoricsSchedule::types() const
{
    Schedule s;
    for (const auto& l : levels) s.push_back(l.type);
    return s;
}

namespace {

double logit(double x) { return std::log(x / (1 - x)); }

double level_length(const FamilySpec& spec, const IslandRecord& rec)
{
    auto g = Tower<quad>(spec.at(rec.vertex.du, rec.vertex.dv), rec.schedule).geometry(rec.depth(), false);
    if (int(g.levels.size()) < rec.depth()) throw InvariantViolation("vertex geometry lost");
    return double(g.levels.back().length());
}

struct Candidate {
    TypePair t;
    double cost, margin, predicted;
};

} // namespace

CombinatoricsSchedule schedule_combinatorics(const FamilySpec& spec, int depth, const std::vector<double>& eps,
                                             const SchedulerOptions& opt)
{
    if (depth < 0) throw Infeasible("negative depth");
    if (depth > opt.max_depth) throw Infeasible("depth " + std::to_string(depth) + " exceeds the configured maximum");
    CombinatoricsSchedule out;
    out.eps = eps;
    if (depth == 0) return out;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0)) throw Infeasible("eps must be positive");
        if (i && eps[i] > eps[i - 1]) throw Infeasible("eps sequence must be non-increasing");
    }
    CalibrateOptions copt;
    copt.return_time_cap = opt.return_time_cap;
    if (opt.k_mode == KMode::calibrated) {
        out.K = calibrate_K(spec.alpha, spec.c, eps, depth, copt).K;
    } else if (opt.k_mode == KMode::fixed) {
        if (opt.fixed_K.empty()) throw Infeasible("fixed K list is empty");
        for (int n = 0; n < depth; ++n)
            out.K.push_back(std::max(1, opt.fixed_K[std::min<std::size_t>(n, opt.fixed_K.size() - 1)]));
    } else {
        out.K.assign(depth, 1);
    }

    double chat = spec.c;
    Flip flip = opt.first;
    std::optional<IslandRecord> prev;
    Schedule types;
    for (int n = 1; n <= depth; ++n) {
        const int K = out.K[n - 1];
        StandardLorenzMap fh(chat, spec.alpha, 1, 1);
        double d0 = fh.dleft(0), d1 = fh.dright(1);
        auto gam = gamma_estimates(fh, 60);
        double lg = std::log(gam.gamma_minus / gam.gamma_plus);
        double th = theta(fh);
        Band band = flip_band(flip);
        double llo = logit(band.lo), lhi = logit(band.hi), mid = (llo + lhi) / 2;

        std::vector<Candidate> cand;
        for (int a = K; a <= opt.max_entry; ++a)
            for (int b = K; b <= opt.max_entry; ++b) {
                double lo = predicted_log_odds(chat, spec.alpha, d0, d1, lg, a, b);
                if (lo < llo || lo > lhi) continue;
                Schedule s = types;
                s.push_back({a, b});
                if (opt.k_mode == KMode::parity && !parity_holds(s, eps)) continue;
                auto T = return_times(s).back();
                if (std::max(T.minus, T.plus) > opt.return_time_cap) continue;
                // a right-branch returns near 1 and b left-branch returns near 0
                double cost = std::max(a * std::log(d1), b * std::log(d0));
                cand.push_back({{a, b}, cost, -std::abs(lo - mid), 1 / (1 + std::exp(-lo))});
            }
        std::sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
            if (x.cost != y.cost) return x.cost < y.cost;
            return x.margin > y.margin;
        });

        bool accepted = false;
        int tried = 0;
        for (const auto& c : cand) {
            if (tried++ >= opt.max_candidates) break;
            std::ostringstream tr;
            tr << "level " << n << " " << flip_name(flip) << " (" << c.t.a << "," << c.t.b << ") pred "
               << c.predicted << ": ";
            try {
                IslandRecord rec = prev ? nested_vertex(spec, *prev, c.t) : full_vertex(spec, c.t.a, c.t.b);
                double cp = double(rec.c_prime);
                double len = level_length(spec, rec);
                tr << "c'=" << cp << " |C|=" << len;
                if (!band.contains(cp)) {
                    tr << " out of band";
                } else if (len < opt.min_interval) {
                    tr << " below resolution";
                } else {
                    ScheduleLevel lv;
                    lv.type = c.t;
                    lv.flip = flip;
                    lv.K = K;
                    lv.theta = th;
                    lv.offset = int(std::floor(th * c.t.a)) - c.t.b;
                    lv.predicted_c = c.predicted;
                    lv.measured_c = cp;
                    lv.interval_length = len;
                    out.levels.push_back(lv);
                    types.push_back(c.t);
                    prev = rec;
                    chat = cp;
                    accepted = true;
                    tr << " accepted";
                }
            } catch (const Error& e) {
                if (!e.infeasible()) throw;
                tr << e.what();
            }
            out.trace.push_back(tr.str());
            if (accepted) break;
        }
        if (!accepted) {
            std::string why = cand.empty() ? "no (a,b) >= K under the caps lands in the predicted band"
                                           : "no tested candidate verified (see trace)";
            std::string all;
            for (const auto& t : out.trace) all += "\n  " + t;
            throw Infeasible("level " + std::to_string(n) + ": " + why + all);
        }
        flip = flip == Flip::plus ? Flip::minus : Flip::plus;
    }
    return out;
}

ConstructionState build_example(const FamilySpec& spec, const CombinatoricsSchedule& schedule)
{
    std::vector<Flip> flips;
    for (const auto& l : schedule.levels) flips.push_back(l.flip);
    return build_example(spec, schedule.types(), flips);
}

ConstructionState build_example(const FamilySpec& spec, const Schedule& types, const std::vector<Flip>& flips)
{
    ConstructionState st;
    st.spec = spec;
    st.schedule = types;
    st.flips = flips;
    st.times = return_times(types);
    st.c_chain = {spec.c};
    try {
        for (std::size_t k = 0; k < types.size(); ++k) {
            IslandRecord rec = k == 0 ? full_vertex(spec, types[0].a, types[0].b)
                                      : nested_vertex(spec, st.islands.back(), types[k]);
            rec = with_box(spec, rec);
            st.islands.push_back(rec);
            st.c_chain.push_back(double(rec.c_prime));
        }
        st.boxes_nested = true;
        for (std::size_t k = 1; k < st.islands.size(); ++k) {
            const auto& outer = *st.islands[k - 1].box;
            const auto& inner = *st.islands[k].box;
            if (!inner.strictly_inside(outer) || !outer.contains(st.islands[k].vertex)) st.boxes_nested = false;
        }
        if (st.islands.empty()) {
            st.final_point = {0, 0};
        } else {
            st.final_point = st.islands.back().vertex;
        }
        int depth = int(types.size());
        BasicMap<quad> f = st.final_map();
        st.verified = depth == 0 || renormalizable_at(spec, types, st.final_point);
        auto g = Tower<quad>(f, types).geometry(depth, true);
        st.interval_lengths = {1.0};
        for (const auto& lv : g.levels) st.interval_lengths.push_back(double(lv.length()));
        auto cyc = cycles(f, types, depth);
        check_cycles(cyc);
        st.gaps = gap_ratios(cyc);
        for (const auto& cl : cyc) st.attractor.push_back(cl.total_length);
        for (const auto& t : st.times)
            st.kappa.push_back(t.plus.convert_to<double>() / t.minus.convert_to<double>());
        st.complete = st.verified;
        if (!st.verified) st.error = "deepest vertex fails the renormalization check";
    } catch (const Error& e) {
        st.error = e.what();
    }
    return st;
}

std::vector<bool> ratio_growth(const ReturnTimes& t, double alpha)
{
    double th2 = theta_alpha(alpha) * theta_alpha(alpha);
    std::vector<bool> out;
    for (std::size_t n = 0; n + 2 < t.size(); n += 2) {
        Rational r0(t[n].plus, t[n].minus), r2(t[n + 2].plus, t[n + 2].minus);
        out.push_back(r2.convert_to<double>() >= th2 * r0.convert_to<double>());
    }
    return out;
}

std::vector<double> attractor_length(const BasicMap<quad>& f, const Schedule& s, int depth)
{
    std::vector<double> out;
    for (const auto& cl : cycles(f, s, depth)) out.push_back(cl.total_length);
    return out;
}

OrbitStats orbit_stats(const BasicMap<long double>& f, long double x0, const std::vector<std::uint64_t>& checkpoints,
                       double crit_tol)
{
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) throw Infeasible("checkpoints must be increasing");
    OrbitStats st;
    st.x0 = double(x0);
    st.t = checkpoints;
    st.right_frequency.reserve(checkpoints.size());
    long double x = x0;
    const long double c = f.c, tol = crit_tol;
    std::uint64_t right = 0, i = 0;
    for (std::uint64_t t : checkpoints) {
        if (t == 0) throw Infeasible("checkpoints must be positive");
        for (; i < t; ++i) {
            if (x < c) {
                if (c - x < tol) throw CriticalPointHit("orbit reached c");
                x = f.left(x);
            } else {
                if (x - c < tol) throw CriticalPointHit("orbit reached c");
                ++right;
                x = f.right(x);
            }
        }
        st.right_frequency.push_back(double(right) / double(t));
    }
    return st;
}

std::vector<OrbitStats> birkhoff_stats(const BasicMap<long double>& f, std::uint64_t seed, const BirkhoffOptions& opt)
{
    if (opt.samples < 1) throw Infeasible("need at least one sample");
    if (opt.checkpoints.empty()) throw Infeasible("no checkpoints");
    std::vector<OrbitStats> out(opt.samples);
    const long double n = opt.samples;
    parallel_for(opt.samples, resolve_workers(opt.workers), [&](int i) {
        auto rng = sample_rng(seed, std::uint64_t(i));
        std::uniform_real_distribution<long double> U(0.0L, 1.0L);
        for (int attempt = 0;; ++attempt) {
            long double x0 = (i + U(rng)) / n;
            try {
                out[i] = orbit_stats(f, x0, opt.checkpoints, opt.crit_tol);
                out[i].resamples = attempt;
                break;
            } catch (const CriticalPointHit&) {
                if (attempt >= 100) throw NonConvergence("sample keeps hitting the critical point");
            }
        }
        out[i].sample_id = i;
    });
    return out;
}

std::vector<std::uint64_t> PhasePlan::checkpoints() const
{
    std::vector<std::uint64_t> t;
    for (const auto& p : phases) t.push_back(p.checkpoint);
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    return t;
}

PhasePlan phase_plan(const ConstructionState& st, std::uint64_t seed, std::uint64_t max_t)
{
    if (!st.complete) throw Infeasible("construction incomplete: " + st.error);
    int depth = st.depth();
    PhasePlan plan;
    AcimOptions ao;
    ao.samples = 32;
    ao.iterations = 100000;
    ao.max_half_width = 1;
    ao.workers = 1;
    double begin = 0;
    for (int k = 0; k <= depth; ++k) {
        Phase ph;
        ph.level = k;
        ph.begin = begin;
        double tm = st.times[k].minus.convert_to<double>(), tp = st.times[k].plus.convert_to<double>();
        double hm = word_half_weights(st.schedule, k, Side::L).right_d();
        double hp = word_half_weights(st.schedule, k, Side::R).right_d();
        // the level-k return map is close to the full standard map with the same critical point
        StandardLorenzMap proxy(st.c_chain[k], st.spec.alpha, 1, 1);
        ph.left_visits = acim_half_weights(proxy, sample_seed(seed, std::uint64_t(k)), ao).left;
        double w = ph.left_visits;
        ph.mean_return = w * tm + (1 - w) * tp;
        ph.predicted_right = (w * tm * hm + (1 - w) * tp * hp) / ph.mean_return;
        if (k < depth) {
            ph.end = begin + ph.mean_return * st.interval_lengths[k] / st.interval_lengths[k + 1];
            ph.checkpoint = std::uint64_t(std::max(1.0, std::min(double(max_t), ph.end / 2)));
        } else {
            ph.end = std::numeric_limits<double>::infinity();
            ph.checkpoint = std::uint64_t(std::max(1.0, std::min(double(max_t), 20 * begin)));
        }
        begin = ph.end;
        plan.phases.push_back(ph);
    }
    for (int k = 0; k <= depth; ++k) {
        if (plan.phases[k].predicted_right > plan.phases[plan.plus_phase].predicted_right) plan.plus_phase = k;
        if (plan.phases[k].predicted_right < plan.phases[plan.minus_phase].predicted_right) plan.minus_phase = k;
    }
    plan.plus_checkpoint = plan.phases[plan.plus_phase].checkpoint;
    plan.minus_checkpoint = plan.phases[plan.minus_phase].checkpoint;
    return plan;
}

Oscillation oscillation(const std::vector<OrbitStats>& stats, std::uint64_t t_plus, std::uint64_t t_minus, double hi,
                        double lo)
{
    Oscillation o;
    o.t_plus = t_plus;
    o.t_minus = t_minus;
    o.samples = int(stats.size());
    if (stats.empty()) return o;
    std::vector<double> rp, rm;
    int both = 0;
    for (const auto& s : stats) {
        auto ip = std::find(s.t.begin(), s.t.end(), t_plus);
        auto im = std::find(s.t.begin(), s.t.end(), t_minus);
        if (ip == s.t.end() || im == s.t.end()) throw Infeasible("checkpoint missing from orbit statistics");
        double a = s.right_frequency[ip - s.t.begin()], b = s.right_frequency[im - s.t.begin()];
        rp.push_back(a);
        rm.push_back(b);
        if (a >= hi && b <= lo) ++both;
    }
    auto median = [](std::vector<double> v) {
        std::size_t m = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + m, v.end());
        double x = v[m];
        if (v.size() % 2 == 0) x = (x + *std::max_element(v.begin(), v.begin() + m)) / 2;
        return x;
    };
    o.median_plus = median(rp);
    o.median_minus = median(rm);
    o.fraction = double(both) / double(stats.size());
    return o;
}

} // namespace lorenz
