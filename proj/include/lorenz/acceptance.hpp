#pragma once
// The ten acceptance checks, shared by the acceptance test binary and
// `lorenz verify`.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lorenz/construction.hpp"

namespace lorenz {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
    double limit_seconds = 0;
};

struct AcceptanceOptions {
    std::uint64_t seed = 1;
    int workers = 0;
    int samples = 1000;      // birkhoff samples for the golden run
    std::vector<int> only;   // empty: all ten
};

// Golden construction: c = 0.5, alpha = 2, depth 3, a_n, b_n >= 4, first
// flip plus. See README for how it was chosen.
struct GoldenSetup {
    FamilySpec spec{0.5, 2.0};
    int depth = 3;
    SchedulerOptions scheduler;
    GoldenSetup();
};

struct GoldenRun {
    CombinatoricsSchedule schedule;
    ConstructionState state;
    PhasePlan plan;
    std::vector<OrbitStats> stats;
    Oscillation osc;
};

GoldenRun golden_construction(const GoldenSetup& g);
void golden_birkhoff(GoldenRun& run, std::uint64_t seed, int samples, int workers);

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

std::string format_result(const CriterionResult& r);

} // namespace lorenz
