#include "lorenz/renorm.hpp"

#include <algorithm>
#include <sstream>

namespace lorenz {

Schedule parse_schedule(const std::string& text)
{
    Schedule s;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        auto comma = item.find(',');
        if (comma == std::string::npos) throw Infeasible("schedule entry '" + item + "' is not a,b");
        TypePair t;
        try {
            t.a = std::stoi(item.substr(0, comma));
            t.b = std::stoi(item.substr(comma + 1));
        } catch (const std::exception&) {
            throw Infeasible("schedule entry '" + item + "' is not a,b");
        }
        if (t.a < 1 || t.b < 1) throw Infeasible("schedule entries must be >= 1");
        s.push_back(t);
    }
    return s;
}

std::string format_schedule(const Schedule& s)
{
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(s[i].a) + "," + std::to_string(s[i].b);
    }
    return out;
}

const char* reason_name(RenormReason r)
{
    switch (r) {
    case RenormReason::ok: return "ok";
    case RenormReason::no_interval: return "no-interval";
    case RenormReason::wrong_itinerary: return "wrong-itinerary";
    case RenormReason::not_contained: return "not-contained";
    case RenormReason::trivial: return "trivial";
    }
    return "?";
}

std::uint64_t word_length(const Schedule& s, int level, Side side)
{
    std::uint64_t tm = 1, tp = 1;
    for (int k = 0; k < level; ++k) {
        std::uint64_t nm = tm + std::uint64_t(s[k].a) * tp;
        std::uint64_t np = tp + std::uint64_t(s[k].b) * tm;
        tm = nm;
        tp = np;
    }
    return side == Side::L ? tm : tp;
}

ItineraryWord cycle_word(const Schedule& s, int level, Side side)
{
    ItineraryWord w;
    w.reserve(word_length(s, level, side));
    for_each_symbol(s, level, side, false, [&](Side x) { w.push_back(symbol(x)); });
    return w;
}

ReturnInterval find_return_interval(const StandardLorenzMap& f, int a, int b)
{
    if (a < 1 || b < 1) throw Infeasible("a and b must be >= 1");
    Tower<double> t(f, Schedule{{a, b}});
    auto p = t.fixed_point(1, Side::L, 0.0, f.c);
    if (!p) throw NoPeriodicPoint("no fixed point of f_+^a o f_- in [0,c]");
    auto q = t.fixed_point(1, Side::R, f.c, 1.0);
    if (!q) throw NoPeriodicPoint("no fixed point of f_-^b o f_+ in [c,1]");
    return ReturnInterval{*p, *q, a, b};
}

RenormCheck is_renormalizable(const StandardLorenzMap& f, int a, int b)
{
    RenormCheck r;
    if (!f.nontrivial()) {
        r.reason = RenormReason::no_interval;
        return r;
    }
    Schedule s{{a, b}};
    auto g = Tower<double>(f, s).geometry(1, true);
    r.reason = g.reason;
    r.ok = g.ok();
    if (r.ok) {
        r.witness = "L";
        double x = f.u;
        for_each_symbol(s, 1, Side::L, true, [&](Side side) {
            r.witness.push_back(x < f.c ? 'L' : 'R');
            x = f.branch(side, x);
        });
    }
    return r;
}

Renormalized renormalize(const StandardLorenzMap& f, int a, int b)
{
    Schedule s{{a, b}};
    if (!f.nontrivial()) throw NotRenormalizable("trivial map");
    auto g = Tower<double>(f, s).geometry(1, true);
    if (!g.ok()) throw NotRenormalizable(std::string("reason ") + reason_name(g.reason));
    const auto& lv = g.levels[0];
    RenormRecord rec;
    rec.interval = {lv.p, lv.q, a, b};
    rec.c_prime = lv.cprime(f.c);
    rec.t_minus = std::uint64_t(a) + 1;
    rec.t_plus = std::uint64_t(b) + 1;
    rec.crit_left = lv.uprime();
    rec.crit_right = lv.lowprime();
    return Renormalized{rec, ReturnMap<double>(f, s, 1, lv)};
}

namespace {

template <class T>
std::vector<Interval> orbit_intervals(const BasicMap<T>& f, const Schedule& s, int level, Side side,
                                      T lo, T hi)
{
    std::vector<Interval> out;
    out.reserve(word_length(s, level, side));
    for_each_symbol(s, level, side, false, [&](Side sym) {
        out.push_back({double(std::min(lo, hi)), double(std::max(lo, hi))});
        lo = f.branch(sym, lo);
        hi = f.branch(sym, hi);
    });
    return out;
}

} // namespace

template <class T>
std::vector<CycleLevel> cycles(const BasicMap<T>& f, const Schedule& s, int depth)
{
    if (depth < 0 || depth > int(s.size())) throw Infeasible("depth exceeds schedule length");
    auto g = Tower<T>(f, s).geometry(depth, true);
    if (!g.ok())
        throw DepthInfeasible("level " + std::to_string(g.failed_level) + " " + reason_name(g.reason));
    std::vector<CycleLevel> out;
    CycleLevel l0;
    l0.minus_intervals = {{0.0, double(f.c)}};
    l0.plus_intervals = {{double(f.c), 1.0}};
    l0.total_length = 1.0;
    out.push_back(l0);
    double plo = 0, qhi = 1;
    for (int k = 1; k <= depth; ++k) {
        const auto& lv = g.levels[k - 1];
        CycleLevel cl;
        cl.level = k;
        cl.minus_intervals = orbit_intervals(f, s, k, Side::L, lv.p, f.c);
        cl.plus_intervals = orbit_intervals(f, s, k, Side::R, f.c, lv.q);
        double p = double(lv.p), q = double(lv.q);
        // gaps: components of C_{k-1} minus Lambda_k adjacent to C_k
        double left = plo, right = qhi;
        auto scan = [&](const std::vector<Interval>& v) {
            for (const auto& I : v) {
                if (I.hi <= p && I.hi > left && I.lo >= plo) left = I.hi;
                if (I.lo >= q && I.lo < right && I.hi <= qhi) right = I.lo;
            }
        };
        scan(cl.minus_intervals);
        scan(cl.plus_intervals);
        cl.gap_left = {left, p};
        cl.gap_right = {q, right};
        double tot = 0;
        for (const auto& I : cl.minus_intervals) tot += I.length();
        for (const auto& I : cl.plus_intervals) tot += I.length();
        cl.total_length = tot;
        out.push_back(std::move(cl));
        plo = p;
        qhi = q;
    }
    return out;
}

template std::vector<CycleLevel> cycles<double>(const BasicMap<double>&, const Schedule&, int);
template std::vector<CycleLevel> cycles<quad>(const BasicMap<quad>&, const Schedule&, int);

std::vector<GapRatio> gap_ratios(const std::vector<CycleLevel>& cyc)
{
    std::vector<GapRatio> out;
    for (std::size_t k = 1; k < cyc.size(); ++k) {
        const auto& cl = cyc[k];
        double C = cl.plus_intervals.front().hi - cl.minus_intervals.front().lo;
        out.push_back({int(k), C / cl.gap_left.length(), C / cl.gap_right.length()});
    }
    return out;
}

void check_cycles(const std::vector<CycleLevel>& cyc, double slack)
{
    for (std::size_t k = 0; k < cyc.size(); ++k) {
        std::vector<Interval> all = cyc[k].minus_intervals;
        all.insert(all.end(), cyc[k].plus_intervals.begin(), cyc[k].plus_intervals.end());
        std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
        for (std::size_t i = 1; i < all.size(); ++i)
            if (all[i].lo < all[i - 1].hi - slack)
                throw InvariantViolation("cycle intervals overlap at level " + std::to_string(k));
        if (k == 0) continue;
        std::vector<Interval> up = cyc[k - 1].minus_intervals;
        up.insert(up.end(), cyc[k - 1].plus_intervals.begin(), cyc[k - 1].plus_intervals.end());
        std::sort(up.begin(), up.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
        for (const auto& I : all) {
            auto it = std::upper_bound(up.begin(), up.end(), I.lo + slack,
                                       [](double x, const Interval& J) { return x < J.lo; });
            bool inside = it != up.begin() && I.hi <= std::prev(it)->hi + slack;
            if (!inside)
                throw InvariantViolation("level " + std::to_string(k) + " interval not nested in level " +
                                         std::to_string(k - 1));
        }
    }
}

} // namespace lorenz
