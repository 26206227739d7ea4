#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace compfdp {

/// Engine used everywhere a seeded random source is required.
using Rng = std::mt19937_64;

constexpr std::uint64_t kDefaultSeed = 12345;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for stream `index` under `master`; independent of how streams are
/// scheduled across threads.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t index) {
    return Rng(derive_seed(master, index));
}

/// Uniform on the open interval (0, 1) with 53 bits of resolution.
inline double uniform01(Rng& rng) {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline bool fair_coin(Rng& rng) { return (rng() >> 63) != 0; }

/// True with probability p (p outside [0,1] is clamped).
inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Uniform integer in [0, n) by rejection; n > 0.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
    std::uint64_t x = rng();
    while (x > limit) x = rng();
    return x % n;
}

/// Number of successes before the first failure in fair Bernoulli trials,
/// read off as the run of trailing one-bits of 64-bit draws.
inline std::uint64_t geometric_half(Rng& rng) {
    std::uint64_t total = 0;
    for (;;) {
        const std::uint64_t bits = rng();
        const int ones = std::countr_one(bits);
        total += static_cast<std::uint64_t>(ones);
        if (ones < 64) return total;
    }
}

}  // namespace compfdp
