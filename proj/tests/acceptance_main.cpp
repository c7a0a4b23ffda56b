// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <iostream>

#include <CLI11.hpp>

#include "lorenz/acceptance.hpp"

int main(int argc, char** argv)
{
    lorenz::AcceptanceOptions opt;
    CLI::App app{"acceptance criteria"};
    app.add_option("--seed", opt.seed, "seed for the sampled criteria")->capture_default_str();
    app.add_option("--samples", opt.samples, "birkhoff samples on the golden map")->capture_default_str();
    app.add_option("--workers", opt.workers, "worker threads (0: LORENZ_WORKERS or hardware)");
    app.add_option("--only", opt.only, "run only these criteria");
    CLI11_PARSE(app, argc, argv);

    bool all = true;
    lorenz::run_acceptance(opt, [&](const lorenz::CriterionResult& r) {
        std::cout << lorenz::format_result(r) << std::endl;
        all = all && r.pass;
    });
    return all ? 0 : 1;
}
