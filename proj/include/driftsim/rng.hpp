#ifndef DRIFTSIM_RNG_HPP
#define DRIFTSIM_RNG_HPP

#include <cstdint>
#include <random>

namespace driftsim {

using Rng = std::mt19937_64;
using Seed = std::uint64_t;

/// splitmix64 finalizer. Child seeds are `split_seed(parent, stream)` so that
/// every trial, side and role gets an independent, reproducible stream.
constexpr Seed split_seed(Seed parent, std::uint64_t stream) noexcept {
    std::uint64_t z = parent + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline Rng make_rng(Seed seed) { return Rng(seed); }

/// Named streams used when splitting a trial seed.
namespace stream {
inline constexpr std::uint64_t env_positive = 1;
inline constexpr std::uint64_t env_negative = 2;
inline constexpr std::uint64_t trial_env = 3;
inline constexpr std::uint64_t trial_noise = 4;
}  // namespace stream

/// Seeds of trial `index` under a root seed: (env_seed, noise_seed).
struct TrialSeeds {
    Seed env;
    Seed noise;
};

constexpr TrialSeeds trial_seeds(Seed root, std::uint64_t index) noexcept {
    const Seed t = split_seed(root, index);
    return {split_seed(t, stream::trial_env), split_seed(t, stream::trial_noise)};
}

}  // namespace driftsim

#endif  // DRIFTSIM_RNG_HPP
