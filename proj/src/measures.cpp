#include "lorenz/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lorenz/sampling.hpp"

namespace lorenz {

WindingMatrix winding(int a, int b)
{
    if (a < 1 || b < 1) throw Infeasible("winding matrix needs a, b >= 1");
    WindingMatrix w;
    w.m = {{{1, b}, {a, 1}}};
    return w;
}

TimePair apply_transpose(const WindingMatrix& w, const TimePair& t)
{
    // W^t = ((1, a), (b, 1))
    return {w.m[0][0] * t.minus + w.m[1][0] * t.plus, w.m[0][1] * t.minus + w.m[1][1] * t.plus};
}

ReturnTimes return_times(const Schedule& s)
{
    ReturnTimes out{TimePair{}};
    for (const auto& t : s) out.push_back(apply_transpose(winding(t.a, t.b), out.back()));
    return out;
}

MeasureVector basis(const Schedule& s, int level, Side side)
{
    if (level < 0 || level > int(s.size())) throw Infeasible("level outside schedule");
    MeasureVector mv;
    mv.level = level;
    mv.minus = side == Side::L ? 1 : 0;
    mv.plus = side == Side::L ? 0 : 1;
    Schedule pre(s.begin(), s.begin() + level);
    mv.times = return_times(pre);
    return mv;
}

MeasureVector pushforward(const MeasureVector& mv, int a, int b)
{
    if (mv.level < 1) throw Infeasible("cannot push forward below level 0");
    if (int(mv.times.size()) != mv.level + 1) throw Infeasible("measure vector carries wrong number of return times");
    const TimePair& T = mv.times[mv.level - 1];
    if (apply_transpose(winding(a, b), T) != mv.times[mv.level])
        throw Infeasible("(a,b) does not match the return times of the measure vector");
    Rational tm(T.minus), tp(T.plus);
    Rational dm = a * tp + tm, dp = tp + b * tm;
    MeasureVector out;
    out.level = mv.level - 1;
    out.times.assign(mv.times.begin(), mv.times.end() - 1);
    out.plus = mv.minus * (a * tp / dm) + mv.plus * (tp / dp);
    out.minus = mv.minus * (tm / dm) + mv.plus * (b * tm / dp);
    return out;
}

MeasureVector project_to_base(const MeasureVector& mv, const Schedule& s)
{
    MeasureVector cur = mv;
    while (cur.level > 0) {
        const auto& t = s.at(cur.level - 1);
        cur = pushforward(cur, t.a, t.b);
    }
    return cur;
}

HalfWeights half_weights(const std::vector<CycleLevel>& cyc, double c, int level, Side side)
{
    if (level < 0 || level >= int(cyc.size())) throw Infeasible("level not computed");
    const auto& v = side == Side::L ? cyc[level].minus_intervals : cyc[level].plus_intervals;
    std::size_t left = 0;
    for (const auto& I : v)
        if ((I.lo + I.hi) / 2 < c) ++left;
    HalfWeights h;
    h.left = Rational(BigInt(left), BigInt(v.size()));
    h.right = 1 - h.left;
    return h;
}

HalfWeights half_weights(const BasicMap<quad>& f, const Schedule& s, int level, Side side)
{
    auto cyc = cycles(f, s, level);
    return half_weights(cyc, double(f.c), level, side);
}

HalfWeights half_weights(const StandardLorenzMap& f, const Schedule& s, int level, Side side)
{
    return half_weights(f.cast<quad>(), s, level, side);
}

HalfWeights word_half_weights(const Schedule& s, int level, Side side)
{
    if (level < 0 || level > int(s.size())) throw Infeasible("level outside schedule");
    BigInt lm = 1, lp = 0, tm = 1, tp = 1;
    for (int k = 0; k < level; ++k) {
        BigInt a = s[k].a, b = s[k].b;
        BigInt nlm = lm + a * lp, nlp = lp + b * lm;
        BigInt ntm = tm + a * tp, ntp = tp + b * tm;
        lm = nlm;
        lp = nlp;
        tm = ntm;
        tp = ntp;
    }
    HalfWeights h;
    h.left = side == Side::L ? Rational(lm, tm) : Rational(lp, tp);
    h.right = 1 - h.left;
    return h;
}

namespace {

double eps_at(const std::vector<double>& eps, int level)
{
    if (eps.empty()) throw Infeasible("empty eps sequence");
    return eps[std::min<std::size_t>(level - 1, eps.size() - 1)];
}

bool level_parity(const Schedule& s, int n, double eps)
{
    auto hm = word_half_weights(s, n, Side::L);
    auto hp = word_half_weights(s, n, Side::R);
    Rational bar = Rational(1) - Rational(eps);
    if (n % 2 == 0) return hm.left >= bar && hp.right >= bar;
    return hm.right >= bar && hp.left >= bar;
}

// every corner of prod_n [K_n, R K_n]^2
template <class F> bool all_corners(const std::vector<int>& K, double ratio, F&& check)
{
    std::size_t n = K.size();
    Schedule s(n);
    std::uint64_t total = std::uint64_t(1) << (2 * n);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        for (std::size_t k = 0; k < n; ++k) {
            int hi = int(std::ceil(ratio * K[k]));
            s[k].a = (mask >> (2 * k)) & 1 ? hi : K[k];
            s[k].b = (mask >> (2 * k + 1)) & 1 ? hi : K[k];
        }
        if (!check(s)) return false;
    }
    return true;
}

} // namespace

bool parity_holds(const Schedule& s, const std::vector<double>& eps)
{
    for (int n = 1; n <= int(s.size()); ++n)
        if (!level_parity(s, n, eps_at(eps, n))) return false;
    return true;
}

KCalibration calibrate_K(double alpha, double c, const std::vector<double>& eps, int depth,
                         const CalibrateOptions& opt)
{
    StandardLorenzMap(c, alpha, 1, 1);  // validates the family
    for (double e : eps)
        if (!(e > 0 && e < 0.5)) throw Infeasible("eps must lie in (0, 1/2)");
    if (depth < 0) throw Infeasible("negative depth");
    if (!(opt.box_ratio >= 1)) throw Infeasible("box ratio must be >= 1");

    KCalibration out;
    out.box_ratio = opt.box_ratio;
    std::vector<int>& K = out.K;

    auto level_ok = [&](const std::vector<int>& ks) {
        int n = int(ks.size());
        return all_corners(ks, opt.box_ratio, [&](const Schedule& s) {
            for (int m = 1; m <= n; ++m)
                if (!level_parity(s, m, eps_at(eps, m))) return false;
            return true;
        });
    };
    auto cap_ok = [&](const std::vector<int>& ks) {
        Schedule s;
        for (int k : ks) {
            int hi = int(std::ceil(opt.box_ratio * k));
            s.push_back({hi, hi});
        }
        auto T = return_times(s).back();
        out.max_return_time = std::max(T.minus, T.plus);
        return out.max_return_time <= opt.return_time_cap;
    };

    while (int(K.size()) < depth) {
        std::vector<int> trial = K;
        trial.push_back(1);
        int k = 1;
        bool found = false;
        while (k <= opt.max_K) {
            trial.back() = k;
            if (!cap_ok(trial)) throw Infeasible("return-time cap exceeded at level " + std::to_string(trial.size()));
            if (level_ok(trial)) {
                found = true;
                break;
            }
            k *= 2;
        }
        if (found) {
            int lo = k / 2;  // fails (or is 0)
            while (lo + 1 < k) {
                int mid = (lo + k) / 2;
                trial.back() = mid;
                if (level_ok(trial)) k = mid; else lo = mid;
            }
            trial.back() = k;
            K = trial;
            std::ostringstream tr;
            tr << "level " << K.size() << ": K=" << k;
            out.trace.push_back(tr.str());
            continue;
        }
        // the limit of the level fraction is set by earlier entries; enlarge them
        if (K.empty()) throw Infeasible("no K satisfies level 1");
        K.back() *= 2;
        out.trace.push_back("level " + std::to_string(K.size() + 1) + " unreachable, K_" +
                            std::to_string(K.size()) + " -> " + std::to_string(K.back()));
        if (K.back() > opt.max_K) throw Infeasible("K exceeds the search limit");
        while (!level_ok(K)) {
            K.back() *= 2;
            if (K.back() > opt.max_K) throw Infeasible("K exceeds the search limit");
        }
    }
    if (!K.empty() && !cap_ok(K)) throw Infeasible("return-time cap exceeded");
    return out;
}

AcimEstimate acim_half_weights(const StandardLorenzMap& f, std::uint64_t seed, const AcimOptions& opt)
{
    if (!(f.u == 1 && f.v == 1)) throw Infeasible("acim half-weights need a full map (u = v = 1)");
    if (opt.samples < 2) throw Infeasible("need at least two samples");
    std::vector<double> frac(opt.samples);
    std::vector<int> restarts(opt.samples);
    parallel_for(opt.samples, resolve_workers(opt.workers), [&](int i) {
        auto rng = sample_rng(seed, std::uint64_t(i));
        std::uniform_real_distribution<double> U(0.0, 1.0);
        auto fresh = [&] {
            double x;
            do x = U(rng);
            while (x == 0 || std::fabs(x - f.c) < kCritTol);
            return x;
        };
        double x = fresh();
        std::uint64_t left = 0;
        for (std::uint64_t k = 0; k < opt.burn_in + opt.iterations; ++k) {
            // a floating-point orbit can land on a fixed point or on c; start over
            if (x <= 0 || x >= 1 || std::fabs(x - f.c) < kCritTol) {
                x = fresh();
                ++restarts[i];
            }
            if (k >= opt.burn_in && x < f.c) ++left;
            x = x < f.c ? f.left(x) : f.right(x);
        }
        frac[i] = double(left) / double(opt.iterations);
    });

    AcimEstimate est;
    est.samples = opt.samples;
    est.iterations = opt.iterations;
    est.restarts = std::accumulate(restarts.begin(), restarts.end(), 0);
    est.left = std::accumulate(frac.begin(), frac.end(), 0.0) / opt.samples;
    est.right = 1 - est.left;

    auto rng = sample_rng(seed, 0xb00757a9ULL);
    std::uniform_int_distribution<int> pick(0, opt.samples - 1);
    std::vector<double> means(opt.bootstrap);
    for (auto& m : means) {
        double s = 0;
        for (int j = 0; j < opt.samples; ++j) s += frac[pick(rng)];
        m = s / opt.samples;
    }
    double mu = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
    double var = 0;
    for (double m : means) var += (m - mu) * (m - mu);
    var /= std::max<std::size_t>(1, means.size() - 1);
    est.half_width = 1.96 * std::sqrt(var);
    if (est.half_width > opt.max_half_width)
        throw NonConvergence("bootstrap half-width " + std::to_string(est.half_width) + " exceeds " +
                             std::to_string(opt.max_half_width));
    return est;
}

std::string to_string(const BigInt& x) { return x.str(); }

std::string to_string(const Rational& x)
{
    return boost::multiprecision::numerator(x).str() + "/" + boost::multiprecision::denominator(x).str();
}

} // namespace lorenz
