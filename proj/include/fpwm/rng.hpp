#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fpwm {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for an independent stream identified by (master, indices...).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> indices) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t i : indices) h = splitmix64(h ^ splitmix64(i + 0x632be59bd9b4e019ULL));
    return h;
}

inline Rng make_rng(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Rng(seq);
}

} // namespace fpwm
