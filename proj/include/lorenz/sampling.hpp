#pragma once
// Per-sample seeding and a plain worker pool for Monte-Carlo loops.
// Each sample owns its generator, so results do not depend on the
// number of workers.

#include <cstdint>
#include <functional>
#include <random>

namespace lorenz {

// splitmix64 finalizer over (seed, stream)
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t stream);

inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t stream)
{
    return std::mt19937_64(sample_seed(seed, stream));
}

// Worker count: explicit value if > 0, else LORENZ_WORKERS, else hardware.
int resolve_workers(int requested);

// Runs body(i) for i in [0,n) on `workers` threads (static striping).
void parallel_for(int n, int workers, const std::function<void(int)>& body);

} // namespace lorenz
