#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <numbers>

namespace advmri {

// Self-contained splitmix64 generator. The standard <random> distributions are
// not pinned by the C++ standard, so all sampling below is hand-rolled to keep
// seeded outputs bit-identical across compilers and standard libraries.
struct SplitMix64 {
    std::uint64_t state = 0;

    constexpr explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    constexpr std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

/// Mixes a stream id into a base seed (per-trial / per-center substreams).
constexpr std::uint64_t seed_mix(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0x9e3779b97f4a7c15ull + stream * 0xbf58476d1ce4e5b9ull));
    g.next();
    return g.next();
}

inline std::uint64_t seed_mix(std::uint64_t seed, double a, double b) {
    std::uint64_t ua = 0, ub = 0;
    std::memcpy(&ua, &a, sizeof a);
    std::memcpy(&ub, &b, sizeof b);
    return seed_mix(seed_mix(seed, ua), ub);
}

/// Uniform double in [0, 1).
inline double uniform01(SplitMix64& g) {
    return static_cast<double>(g.next() >> 11) * 0x1.0p-53;
}

inline double uniform_in(SplitMix64& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

/// Uniform integer in [0, count). Modulo bias is < 2^-53 for our ranges.
inline std::uint64_t uniform_index(SplitMix64& g, std::uint64_t count) {
    return g.next() % count;
}

/// Standard normal via Box-Muller.
inline double normal(SplitMix64& g) {
    const double u1 = 1.0 - uniform01(g);  // (0, 1]
    const double u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

/// Complex sample with independent N(0,1) real and imaginary parts.
inline std::complex<double> complex_normal(SplitMix64& g) {
    const double re = normal(g);
    const double im = normal(g);
    return {re, im};
}

}  // namespace advmri
