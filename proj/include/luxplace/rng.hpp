#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace luxplace {

// Deterministic seed mixing for deriving independent substreams
// (per-step noise, per-plan rollouts, per-trial scenarios).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// The standard <random> distributions are implementation-defined; these
// helpers keep scenario generation byte-identical across toolchains.
inline double uniform_double(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    // rejection sampling; unbiased for any n >= 1
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

inline double gaussian(std::mt19937_64& rng, double mean = 0.0, double stddev = 1.0) {
    // Box-Muller; draws two uniforms per value for stream determinism
    double u1 = uniform_double(rng, 0.0, 1.0);
    const double u2 = uniform_double(rng, 0.0, 1.0);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * M_PI * u2);
}

}  // namespace luxplace
