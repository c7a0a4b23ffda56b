// lorenz: command-line front end for the toolkit.
#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lorenz/acceptance.hpp"
#include "lorenz/construction.hpp"
#include "lorenz/family_search.hpp"
#include "lorenz/measures.hpp"
#include "lorenz/sampling.hpp"
#include "lorenz/version.hpp"

using json = nlohmann::ordered_json;
using namespace lorenz;

namespace {

// exit status for `verify` when a criterion fails
constexpr int kCriteriaFailed = 3;

std::string qs(quad x) { return num::to_string(x, 36); }

json times_json(const ReturnTimes& t)
{
    json a = json::array();
    for (const auto& p : t) a.push_back({{"minus", to_string(p.minus)}, {"plus", to_string(p.plus)}});
    return a;
}

json box_json(const ParamBox& b)
{
    return {{"du_lo", qs(b.du_lo)}, {"du_hi", qs(b.du_hi)}, {"dv_lo", qs(b.dv_lo)}, {"dv_hi", qs(b.dv_hi)}};
}

json island_json(const IslandRecord& r)
{
    json j{{"a", r.type().a},
           {"b", r.type().b},
           {"depth", r.depth()},
           {"du", qs(r.vertex.du)},
           {"dv", qs(r.vertex.dv)},
           {"u", qs(1 - r.vertex.du)},
           {"v", qs(1 - r.vertex.dv)},
           {"c_prime", double(r.c_prime)},
           {"r1", double(r.r1)},
           {"r2", double(r.r2)},
           {"newton_iterations", r.newton_iterations}};
    if (r.box) j["box"] = box_json(*r.box);
    return j;
}

json half_json(const HalfWeights& h)
{
    return {{"left", to_string(h.left)}, {"right", to_string(h.right)}, {"left_value", h.left_d()},
            {"right_value", h.right_d()}};
}

json gaps_json(const std::vector<GapRatio>& g)
{
    json a = json::array();
    for (const auto& x : g) a.push_back({{"level", x.level}, {"left", x.left}, {"right", x.right}});
    return a;
}

// RFC 4180 output; every field written here is numeric or a bare word
class Csv {
public:
    explicit Csv(const std::string& path) : out_(path)
    {
        if (!out_) throw Infeasible("cannot open " + path + " for writing");
    }
    template <class... F> void row(const F&... f)
    {
        std::string sep;
        ((out_ << sep << field(f), sep = ","), ...);
        out_ << "\r\n";
    }

private:
    static std::string field(double x) { return num::to_string(x); }
    static std::string field(const std::string& s) { return s; }
    static std::string field(const char* s) { return s; }
    template <class I, class = std::enable_if_t<std::is_integral_v<I>>> static std::string field(I x)
    {
        return std::to_string(x);
    }
    std::ofstream out_;
};

struct Command {
    CLI::App* app = nullptr;
    std::string config, out;
    std::function<json()> run;
    std::vector<std::string> written;  // data files beside the JSON record
};

json resolved_config(const CLI::App* app)
{
    json cfg = json::object();
    for (const CLI::Option* o : app->get_options()) {
        std::string name = o->get_lnames().empty() ? o->get_name() : o->get_lnames().front();
        if (name == "help" || name == "config" || name == "out") continue;
        if (o->get_expected_min() == 0) {
            cfg[name] = o->count() > 0;
        } else if (o->count() == 0) {
            std::string d = o->get_default_str();
            cfg[name] = d == "{}" ? json::array() : json(d);
        } else if (o->results().size() == 1 && o->get_expected_max() <= 1) {
            cfg[name] = o->results().front();
        } else {
            cfg[name] = o->results();
        }
    }
    return cfg;
}

// Flat key=value config: keys not given on the command line are inserted
// as flags right after the subcommand, so command-line values win.
std::vector<std::string> merge_config(const std::vector<std::string>& args, CLI::App& app)
{
    auto sub_it = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
    if (sub_it == args.end()) return args;
    CLI::App* sub = app.get_subcommand_no_throw(*sub_it);
    if (!sub) return args;
    std::string path;
    std::vector<std::string> given;
    for (auto it = sub_it + 1; it != args.end(); ++it) {
        if (it->rfind("--", 0) != 0) continue;
        std::string name = it->substr(2);
        auto eq = name.find('=');
        if (eq != std::string::npos) {
            if (name.substr(0, eq) == "config") path = name.substr(eq + 1);
            name = name.substr(0, eq);
        } else if (name == "config" && it + 1 != args.end()) {
            path = *(it + 1);
        }
        given.push_back(name);
    }
    if (path.empty()) return args;
    std::ifstream probe(path);
    if (!probe) throw Infeasible("cannot read config file " + path);
    std::vector<CLI::ConfigItem> items = CLI::ConfigINI().from_file(path);
    std::vector<std::string> extra;
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        if (!item.parents.empty()) throw Infeasible("config file must be flat key=value (found section in " + path + ")");
        const CLI::Option* o = sub->get_option_no_throw("--" + item.name);
        if (!o || item.name == "config") throw Infeasible("unknown config key '" + item.name + "' for " + *sub_it);
        if (std::count(given.begin(), given.end(), item.name)) continue;
        if (o->get_expected_min() == 0) {
            if (item.inputs.size() == 1 && (item.inputs[0] == "true" || item.inputs[0] == "1")) extra.push_back("--" + item.name);
            continue;
        }
        extra.push_back("--" + item.name);
        for (const auto& v : item.inputs) extra.push_back(v);
    }
    std::vector<std::string> merged(args.begin(), sub_it + 1);
    merged.insert(merged.end(), extra.begin(), extra.end());
    merged.insert(merged.end(), sub_it + 1, args.end());
    return merged;
}

void emit(const Command& cmd, json result, double seconds)
{
    json rec{{"tool", kToolName}, {"version", kVersion}, {"command", cmd.app->get_name()},
             {"config", resolved_config(cmd.app)}, {"result", std::move(result)}};
    if (!cmd.written.empty()) rec["files"] = cmd.written;
    if (cmd.out.empty()) {
        std::cout << rec.dump(cmd.app->get_name() == "full-vertex" ? -1 : 2) << "\n";
        return;
    }
    std::ofstream f(cmd.out);
    if (!f) throw Infeasible("cannot open " + cmd.out + " for writing");
    f << rec.dump(2) << "\n";
    // timestamps stay out of the record so reruns are byte-identical
    std::ofstream log(cmd.out + ".log");
    std::time_t now = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    log << stamp << " " << cmd.app->get_name() << " wrote " << cmd.out << " in " << seconds << " s\n";
}

struct MapArgs {
    double c = 0.5, alpha = 2, u = 1, v = 1;
    std::string du, dv;

    void add(CLI::App* app, bool with_uv = true)
    {
        app->add_option("--c", c, "critical point in (0,1)");
        app->add_option("--alpha", alpha, "critical exponent in (1,100]");
        if (!with_uv) return;
        app->add_option("--u", u, "left critical value");
        app->add_option("--v", v, "right-branch parameter (right critical value 1-v)");
        app->add_option("--du", du, "1-u as a decimal string (overrides --u, full quad precision)");
        app->add_option("--dv", dv, "1-v as a decimal string (overrides --v)");
    }
    FamilySpec spec() const
    {
        StandardLorenzMap(c, alpha, 1, 1);  // validates c and alpha
        return {c, alpha};
    }
    BasicMap<quad> quad_map() const
    {
        quad qu = du.empty() ? quad(u) : 1 - num::parse_quad(du);
        quad qv = dv.empty() ? quad(v) : 1 - num::parse_quad(dv);
        return BasicMap<quad>(quad(c), quad(alpha), qu, qv);
    }
    StandardLorenzMap double_map() const
    {
        auto q = quad_map();
        return StandardLorenzMap(c, alpha, double(q.u), double(q.v));
    }
};

json geometry_json(const Geometry<quad>& g, double c)
{
    json levels = json::array();
    for (std::size_t k = 0; k < g.levels.size(); ++k) {
        const auto& lv = g.levels[k];
        levels.push_back({{"level", int(k) + 1},
                          {"p", qs(lv.p)},
                          {"q", qs(lv.q)},
                          {"length", double(lv.length())},
                          {"c_prime", double(lv.cprime(quad(c)))},
                          {"u_prime", double(lv.uprime())},
                          {"low_prime", double(lv.lowprime())},
                          {"r1", double(lv.r1())},
                          {"r2", double(lv.r2())},
                          {"periodic_residual_p", double(lv.res_p)},
                          {"periodic_residual_q", double(lv.res_q)}});
    }
    return levels;
}

Schedule schedule_arg(const std::string& text, int a, int b)
{
    if (!text.empty()) return parse_schedule(text);
    if (a < 1 || b < 1) throw Infeasible("give --schedule or --a/--b >= 1");
    return {{a, b}};
}

std::vector<Flip> flips_arg(const std::vector<std::string>& names, std::size_t depth, Flip first)
{
    std::vector<Flip> f;
    for (const auto& n : names) f.push_back(parse_flip(n));
    if (f.empty())
        for (std::size_t k = 0; k < depth; ++k) f.push_back(k % 2 == 0 ? first : (first == Flip::plus ? Flip::minus : Flip::plus));
    if (f.size() != depth) throw Infeasible("need one flip per schedule level");
    return f;
}

json state_json(const ConstructionState& st)
{
    json islands = json::array();
    for (const auto& r : st.islands) islands.push_back(island_json(r));
    json flips = json::array();
    for (Flip f : st.flips) flips.push_back(flip_name(f));
    json growth = json::array();
    for (bool g : ratio_growth(st.times, st.spec.alpha)) growth.push_back(g);
    return {{"schedule", format_schedule(st.schedule)},
            {"flips", flips},
            {"islands", islands},
            {"c_chain", st.c_chain},
            {"return_times", times_json(st.times)},
            {"interval_lengths", st.interval_lengths},
            {"gaps", gaps_json(st.gaps)},
            {"attractor", st.attractor},
            {"kappa", st.kappa},
            {"ratio_growth", growth},
            {"final_point", {{"du", qs(st.final_point.du)}, {"dv", qs(st.final_point.dv)}}},
            {"boxes_nested", st.boxes_nested},
            {"verified", st.verified},
            {"complete", st.complete},
            {"error", st.error}};
}

json plan_json(const PhasePlan& plan)
{
    json phases = json::array();
    for (const auto& p : plan.phases)
        phases.push_back({{"level", p.level},
                          {"begin", p.begin},
                          {"end", std::isfinite(p.end) ? json(p.end) : json(nullptr)},
                          {"mean_return", p.mean_return},
                          {"left_visits", p.left_visits},
                          {"predicted_right", p.predicted_right},
                          {"checkpoint", p.checkpoint}});
    return {{"phases", phases},
            {"plus_phase", plan.plus_phase},
            {"minus_phase", plan.minus_phase},
            {"plus_checkpoint", plan.plus_checkpoint},
            {"minus_checkpoint", plan.minus_checkpoint}};
}

void write_chain_csv(const std::string& path, const ConstructionState& st)
{
    Csv csv(path);
    csv.row("level", "c_prime", "interval_length", "attractor_length", "kappa");
    for (std::size_t k = 0; k < st.c_chain.size(); ++k)
        csv.row(k, st.c_chain[k], k < st.interval_lengths.size() ? st.interval_lengths[k] : 0.0,
                k < st.attractor.size() ? st.attractor[k] : 0.0, k < st.kappa.size() ? st.kappa[k] : 0.0);
}

void write_gaps_csv(const std::string& path, const std::vector<GapRatio>& g)
{
    Csv csv(path);
    csv.row("level", "left", "right");
    for (const auto& x : g) csv.row(x.level, x.left, x.right);
}

void require_seed(const CLI::App* app)
{
    if (app->get_option("--seed")->count() == 0) throw Infeasible("--seed is required for " + app->get_name());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lorenz-map renormalization toolkit"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
    app.require_subcommand(1);
    std::map<std::string, Command> cmds;

    auto add = [&](const std::string& name, const std::string& help) -> Command& {
        Command& c = cmds[name];
        c.app = app.add_subcommand(name, help);
        c.app->add_option("--config", c.config, "flat key=value file; command-line flags win");
        c.app->add_option("--out", c.out, "write the JSON record here (default stdout)");
        c.app->option_defaults()->always_capture_default();
        return c;
    };

    // eval -------------------------------------------------------------------
    MapArgs eval_map;
    double eval_x = 0, crit_tol = kCritTol;
    std::size_t eval_steps = 0;
    {
        Command& c = add("eval", "evaluate the map (and optionally iterate)");
        eval_map.add(c.app);
        c.app->add_option("--x", eval_x, "point in [0,1]")->required()->check(CLI::Range(0.0, 1.0));
        c.app->add_option("--steps", eval_steps, "also return this many iterates and the itinerary");
        c.app->add_option("--crit-tol", crit_tol, "critical-point exclusion tolerance")->check(CLI::PositiveNumber);
        c.run = [&] {
            auto f = eval_map.double_map();
            json r{{"x", eval_x}, {"y", eval(f, eval_x, crit_tol)}, {"deriv", deriv(f, eval_x, crit_tol)},
                   {"nontrivial", f.nontrivial()}};
            if (eval_steps > 0) {
                auto o = iterate(f, eval_x, eval_steps, crit_tol);
                r["orbit"] = o.points;
                r["itinerary"] = itinerary(f, eval_x, eval_steps, crit_tol);
                r["hit_critical"] = o.hit_critical ? json(*o.hit_critical) : json(nullptr);
            }
            return r;
        };
    }

    // renorm -----------------------------------------------------------------
    MapArgs ren_map;
    std::string ren_schedule, ren_csv;
    int ren_a = 0, ren_b = 0;
    {
        Command& c = add("renorm", "return intervals, renormalized map data and cycles");
        ren_map.add(c.app);
        c.app->add_option("--a", ren_a, "left return exponent (single level)");
        c.app->add_option("--b", ren_b, "right return exponent (single level)");
        c.app->add_option("--schedule", ren_schedule, "types of successive levels, e.g. 2,3;4,5");
        c.app->add_option("--csv", ren_csv, "gap ratios per level as CSV");
        c.run = [&, &cmd = c] {
            Schedule s = schedule_arg(ren_schedule, ren_a, ren_b);
            auto f = ren_map.quad_map();
            int depth = int(s.size());
            json r{{"schedule", format_schedule(s)}, {"nontrivial", f.nontrivial()}};
            if (depth == 1) {
                auto chk = is_renormalizable(ren_map.double_map(), s[0].a, s[0].b);
                r["double_check"] = {{"renormalizable", chk.ok}, {"reason", reason_name(chk.reason)},
                                     {"witness", chk.witness}};
                if (chk.ok) {
                    auto rr = renormalize(ren_map.double_map(), s[0].a, s[0].b).record;
                    r["record"] = {{"p", rr.interval.p},          {"q", rr.interval.q},
                                   {"c_prime", rr.c_prime},       {"t_minus", rr.t_minus},
                                   {"t_plus", rr.t_plus},         {"crit_left", rr.crit_left},
                                   {"crit_right", rr.crit_right}};
                }
            }
            auto g = Tower<quad>(f, s).geometry(depth, true);
            r["renormalizable"] = g.ok();
            r["reason"] = reason_name(g.reason);
            r["failed_level"] = g.failed_level;
            r["levels"] = geometry_json(g, ren_map.c);
            if (g.ok()) {
                auto cyc = cycles(f, s, depth);
                check_cycles(cyc);
                json counts = json::array(), lengths = json::array();
                for (const auto& cl : cyc) {
                    counts.push_back({{"minus", cl.minus_intervals.size()}, {"plus", cl.plus_intervals.size()}});
                    lengths.push_back(cl.total_length);
                }
                r["return_times"] = times_json(return_times(s));
                r["interval_counts"] = counts;
                r["attractor"] = lengths;
                auto gaps = gap_ratios(cyc);
                r["gaps"] = gaps_json(gaps);
                if (!ren_csv.empty()) {
                    write_gaps_csv(ren_csv, gaps);
                    cmd.written.push_back(ren_csv);
                }
            }
            return r;
        };
    }

    // island -----------------------------------------------------------------
    MapArgs isl_map;
    std::string isl_schedule;
    bool isl_boxes = false;
    {
        Command& c = add("island", "full vertices (and boxes) of nested islands along a schedule");
        isl_map.add(c.app, false);
        c.app->add_option("--schedule", isl_schedule, "types of successive levels")->required();
        c.app->add_flag("--boxes", isl_boxes, "also compute island boxes");
        c.run = [&] {
            auto spec = isl_map.spec();
            Schedule s = parse_schedule(isl_schedule);
            if (s.empty()) throw Infeasible("empty schedule");
            json chain = json::array();
            for (auto rec : vertex_chain(spec, s)) chain.push_back(island_json(isl_boxes ? with_box(spec, rec) : rec));
            return json{{"schedule", format_schedule(s)}, {"islands", chain}};
        };
    }

    // full-vertex ------------------------------------------------------------
    MapArgs fv_map;
    int fv_a = 1, fv_b = 1;
    bool fv_box = false;
    {
        Command& c = add("full-vertex", "full vertex of D_{a,b}: one-line record");
        fv_map.add(c.app, false);
        c.app->add_option("--a", fv_a, "left return exponent")->required();
        c.app->add_option("--b", fv_b, "right return exponent")->required();
        c.app->add_flag("--box", fv_box, "also compute the island box");
        c.run = [&] {
            auto spec = fv_map.spec();
            auto rec = full_vertex(spec, fv_a, fv_b);
            if (fv_box) rec = with_box(spec, rec);
            return island_json(rec);
        };
    }

    // measures ---------------------------------------------------------------
    MapArgs ms_map;
    std::string ms_schedule;
    int ms_level = -1, ms_workers = 0;
    std::vector<double> ms_eps;
    bool ms_geometric = false, ms_acim = false;
    std::uint64_t ms_seed = 0;
    {
        Command& c = add("measures", "return times, basis measures and half-weights");
        ms_map.add(c.app, false);
        c.app->add_option("--schedule", ms_schedule, "types of successive levels");
        c.app->add_option("--level", ms_level, "level n (default: schedule depth)");
        c.app->add_option("--eps", ms_eps, "parity tolerance per level");
        c.app->add_flag("--geometric", ms_geometric, "also count cycle intervals at the solved vertex");
        c.app->add_flag("--acim", ms_acim, "half-weights of the full map's acim (needs --seed)");
        c.app->add_option("--seed", ms_seed, "RNG seed");
        c.app->add_option("--workers", ms_workers, "worker threads (0: LORENZ_WORKERS or hardware)");
        c.run = [&, &cmd = c] {
            Schedule s = parse_schedule(ms_schedule);
            int n = ms_level < 0 ? int(s.size()) : ms_level;
            if (n > int(s.size())) throw Infeasible("level exceeds schedule depth");
            auto T = return_times(s);
            json wind = json::array();
            for (const auto& t : s) {
                auto w = winding(t.a, t.b);
                wind.push_back({{w.m[0][0], w.m[0][1]}, {w.m[1][0], w.m[1][1]}});
            }
            json r{{"schedule", format_schedule(s)}, {"level", n}, {"winding", wind}, {"return_times", times_json(T)},
                   {"T_level", {{"minus", to_string(T[n].minus)}, {"plus", to_string(T[n].plus)}}}};
            json hw;
            for (Side side : {Side::L, Side::R}) {
                std::string key = side == Side::L ? "minus" : "plus";
                hw[key] = half_json(word_half_weights(s, n, side));
                auto base = project_to_base(basis(s, n, side), s);
                hw[key]["projection"] = {{"minus", to_string(base.minus)}, {"plus", to_string(base.plus)}};
            }
            r["half_weights"] = hw;
            if (!ms_eps.empty()) r["parity"] = parity_holds(Schedule(s.begin(), s.begin() + n), ms_eps);
            if (ms_geometric && n > 0) {
                auto spec = ms_map.spec();
                Schedule pre(s.begin(), s.begin() + n);
                auto chain = vertex_chain(spec, pre);
                auto f = spec.at(chain.back().vertex.du, chain.back().vertex.dv);
                auto cyc = cycles(f, pre, n);
                r["geometric"] = {{"minus", half_json(half_weights(cyc, ms_map.c, n, Side::L))},
                                  {"plus", half_json(half_weights(cyc, ms_map.c, n, Side::R))}};
            }
            if (ms_acim) {
                require_seed(cmd.app);
                AcimOptions ao;
                ao.workers = ms_workers;
                auto e = acim_half_weights(full_map(ms_map.spec()), ms_seed, ao);
                r["acim"] = {{"left", e.left},           {"right", e.right},
                             {"half_width", e.half_width}, {"samples", e.samples},
                             {"iterations", e.iterations}, {"restarts", e.restarts}};
            }
            return r;
        };
    }

    // calibrate --------------------------------------------------------------
    double cal_alpha = 2, cal_c = 0.5;
    std::vector<double> cal_eps{0.1};
    int cal_depth = 3;
    CalibrateOptions cal_opt;
    {
        Command& c = add("calibrate", "smallest K_n meeting the parity estimates on a box of schedules");
        c.app->add_option("--alpha", cal_alpha, "critical exponent");
        c.app->add_option("--c", cal_c, "critical point");
        c.app->add_option("--eps", cal_eps, "parity tolerance per level (last repeats)");
        c.app->add_option("--depth", cal_depth, "number of levels");
        c.app->add_option("--box-ratio", cal_opt.box_ratio, "a_n, b_n range over [K_n, ratio K_n]");
        c.app->add_option("--max-K", cal_opt.max_K, "search limit");
        c.run = [&] {
            auto k = calibrate_K(cal_alpha, cal_c, cal_eps, cal_depth, cal_opt);
            return json{{"K", k.K}, {"box_ratio", k.box_ratio}, {"max_return_time", to_string(k.max_return_time)},
                        {"trace", k.trace}};
        };
    }

    // construct --------------------------------------------------------------
    MapArgs con_map;
    int con_depth = 3;
    std::vector<double> con_eps{0.1};
    std::string con_kmode = "calibrated", con_first = "plus", con_schedule, con_csv;
    std::vector<std::string> con_flips;
    SchedulerOptions con_opt;
    std::uint64_t con_seed = 0;
    {
        Command& c = add("construct", "schedule the combinatorics and build the nested islands");
        con_map.add(c.app, false);
        c.app->add_option("--depth", con_depth, "levels")->check(CLI::Range(0, 8));
        c.app->add_option("--eps", con_eps, "parity tolerance per level");
        c.app->add_option("--k-mode", con_kmode, "calibrated | parity | fixed")
            ->check(CLI::IsMember({"calibrated", "parity", "fixed"}));
        c.app->add_option("--fixed-K", con_opt.fixed_K, "lower bounds for k-mode fixed (last repeats)");
        c.app->add_option("--first", con_first, "first flip: plus | minus")->check(CLI::IsMember({"plus", "minus"}));
        c.app->add_option("--max-depth", con_opt.max_depth, "depth cap");
        c.app->add_option("--max-entry", con_opt.max_entry, "largest a_n, b_n tried");
        c.app->add_option("--min-interval", con_opt.min_interval, "smallest |C_n| accepted");
        c.app->add_option("--max-candidates", con_opt.max_candidates, "vertex solves per level");
        c.app->add_option("--schedule", con_schedule, "skip the scheduler and use these types");
        c.app->add_option("--flips", con_flips, "flip per level with --schedule");
        c.app->add_option("--csv", con_csv, "prefix for <prefix>_chain.csv and <prefix>_gaps.csv");
        c.app->add_option("--seed", con_seed, "with a seed the phase plan is included");
        c.run = [&, &cmd = c] {
            auto spec = con_map.spec();
            con_opt.first = parse_flip(con_first);
            con_opt.k_mode = con_kmode == "fixed" ? KMode::fixed : con_kmode == "parity" ? KMode::parity : KMode::calibrated;
            json r;
            ConstructionState st;
            if (!con_schedule.empty()) {
                Schedule s = parse_schedule(con_schedule);
                st = build_example(spec, s, flips_arg(con_flips, s.size(), con_opt.first));
            } else {
                auto cs = schedule_combinatorics(spec, con_depth, con_eps, con_opt);
                json levels = json::array();
                for (const auto& l : cs.levels)
                    levels.push_back({{"a", l.type.a},
                                      {"b", l.type.b},
                                      {"flip", flip_name(l.flip)},
                                      {"K", l.K},
                                      {"theta", l.theta},
                                      {"offset", l.offset},
                                      {"predicted_c", l.predicted_c},
                                      {"measured_c", l.measured_c},
                                      {"interval_length", l.interval_length}});
                r["scheduler"] = {{"levels", levels}, {"eps", cs.eps}, {"K", cs.K}, {"trace", cs.trace}};
                st = build_example(spec, cs);
            }
            r["state"] = state_json(st);
            if (!st.complete) throw NotFound("construction incomplete: " + st.error);
            if (cmd.app->get_option("--seed")->count()) r["phase_plan"] = plan_json(phase_plan(st, con_seed));
            if (!con_csv.empty()) {
                write_chain_csv(con_csv + "_chain.csv", st);
                write_gaps_csv(con_csv + "_gaps.csv", st.gaps);
                cmd.written.push_back(con_csv + "_chain.csv");
                cmd.written.push_back(con_csv + "_gaps.csv");
            }
            return r;
        };
    }

    // birkhoff ---------------------------------------------------------------
    MapArgs bk_map;
    std::string bk_schedule, bk_csv, bk_first = "plus";
    std::vector<std::string> bk_flips;
    std::vector<std::uint64_t> bk_checkpoints;
    BirkhoffOptions bk_opt;
    std::uint64_t bk_seed = 0;
    double bk_hi = 0.7, bk_lo = 0.3;
    {
        Command& c = add("birkhoff", "right-side frequencies of sampled orbits");
        bk_map.add(c.app);
        c.app->add_option("--schedule", bk_schedule, "use the deepest full vertex of this schedule");
        c.app->add_option("--flips", bk_flips, "flip per level (for the phase plan)");
        c.app->add_option("--first", bk_first, "first flip when --flips is absent")
            ->check(CLI::IsMember({"plus", "minus"}));
        c.app->add_option("--checkpoints", bk_checkpoints, "times t_j (default: phase plan of the schedule)");
        c.app->add_option("--samples", bk_opt.samples, "number of sampled points")->check(CLI::PositiveNumber);
        c.app->add_option("--workers", bk_opt.workers, "worker threads (0: LORENZ_WORKERS or hardware)");
        c.app->add_option("--crit-tol", bk_opt.crit_tol, "critical-point exclusion tolerance")->check(CLI::PositiveNumber);
        c.app->add_option("--hi", bk_hi, "plus threshold");
        c.app->add_option("--lo", bk_lo, "minus threshold");
        c.app->add_option("--seed", bk_seed, "RNG seed (required)");
        c.app->add_option("--csv", bk_csv, "sample_id,t,right_frequency rows");
        c.run = [&, &cmd = c] {
            require_seed(cmd.app);
            json r;
            BasicMap<long double> f;
            std::optional<PhasePlan> plan;
            if (!bk_schedule.empty()) {
                auto spec = bk_map.spec();
                Schedule s = parse_schedule(bk_schedule);
                auto st = build_example(spec, s, flips_arg(bk_flips, s.size(), parse_flip(bk_first)));
                if (!st.complete) throw NotFound("construction incomplete: " + st.error);
                f = st.final_map().cast<long double>();
                r["final_point"] = {{"du", qs(st.final_point.du)}, {"dv", qs(st.final_point.dv)}};
                if (bk_checkpoints.empty()) {
                    plan = phase_plan(st, bk_seed);
                    r["phase_plan"] = plan_json(*plan);
                }
            } else {
                f = bk_map.quad_map().cast<long double>();
            }
            bk_opt.checkpoints = plan ? plan->checkpoints() : bk_checkpoints;
            std::sort(bk_opt.checkpoints.begin(), bk_opt.checkpoints.end());
            if (bk_opt.checkpoints.empty()) throw Infeasible("give --checkpoints or --schedule");
            auto stats = birkhoff_stats(f, bk_seed, bk_opt);
            json per = json::array();
            int resamples = 0;
            for (const auto& s : stats) resamples += s.resamples;
            for (std::size_t j = 0; j < bk_opt.checkpoints.size(); ++j) {
                std::vector<double> v;
                for (const auto& s : stats) v.push_back(s.right_frequency[j]);
                std::sort(v.begin(), v.end());
                auto q = [&](double p) { return v[std::size_t(p * (v.size() - 1))]; };
                per.push_back({{"t", bk_opt.checkpoints[j]}, {"q25", q(0.25)}, {"median", q(0.5)}, {"q75", q(0.75)}});
            }
            r["samples"] = bk_opt.samples;
            r["checkpoints"] = per;
            r["resamples"] = resamples;
            if (plan) {
                auto o = oscillation(stats, plan->plus_checkpoint, plan->minus_checkpoint, bk_hi, bk_lo);
                r["oscillation"] = {{"t_plus", o.t_plus},           {"t_minus", o.t_minus},
                                    {"median_plus", o.median_plus}, {"median_minus", o.median_minus},
                                    {"fraction", o.fraction},       {"samples", o.samples}};
            }
            if (!bk_csv.empty()) {
                Csv csv(bk_csv);
                csv.row("sample_id", "t", "right_frequency");
                for (const auto& s : stats)
                    for (std::size_t j = 0; j < s.t.size(); ++j) csv.row(s.sample_id, s.t[j], s.right_frequency[j]);
                cmd.written.push_back(bk_csv);
            }
            return r;
        };
    }

    // verify -----------------------------------------------------------------
    AcceptanceOptions ver_opt;
    bool ver_failed = false;
    {
        Command& c = add("verify", "run the acceptance suite; one PASS/FAIL line per criterion");
        c.app->add_option("--seed", ver_opt.seed, "RNG seed (required)");
        c.app->add_option("--samples", ver_opt.samples, "birkhoff samples on the golden map");
        c.app->add_option("--workers", ver_opt.workers, "worker threads (0: LORENZ_WORKERS or hardware)");
        c.app->add_option("--only", ver_opt.only, "criteria to run");
        c.run = [&, &cmd = c] {
            require_seed(cmd.app);
            json list = json::array();
            run_acceptance(ver_opt, [&](const CriterionResult& res) {
                std::cerr << format_result(res) << std::endl;
                ver_failed = ver_failed || !res.pass;
                list.push_back({{"id", res.id}, {"name", res.name}, {"pass", res.pass}, {"detail", res.detail}});
            });
            return json{{"criteria", list}};
        };
    }

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = merge_config(args, app);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.infeasible() ? 1 : 2;
    }

    for (auto& [name, cmd] : cmds) {
        if (!cmd.app->parsed()) continue;
        try {
            auto t0 = std::chrono::steady_clock::now();
            json result = cmd.run();
            emit(cmd, std::move(result), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        } catch (const Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return e.infeasible() ? 1 : 2;
        } catch (const std::exception& e) {
            std::cerr << "internal error: " << e.what() << "\n";
            return 2;
        }
        if (ver_failed) return kCriteriaFailed;
    }
    return 0;
}
