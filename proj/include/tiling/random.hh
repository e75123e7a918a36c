#ifndef TILING_RANDOM_HH
#define TILING_RANDOM_HH

#include <cstdint>
#include <random>

namespace tiling {

using Rng = std::mt19937_64;

// splitmix64 step, used to derive independent sub-seeds from (seed, counter).
inline auto derive_seed(std::uint64_t seed, std::uint64_t counter) -> std::uint64_t
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline auto bernoulli(Rng & rng, double p) -> bool
{
    if (p <= 0.0)
        return false;
    if (p >= 1.0)
        return true;
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

}

#endif
