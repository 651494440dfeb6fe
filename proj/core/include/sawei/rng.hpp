#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sawei {

using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent streams from a run seed.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = 0x5a5a5a5a5a5a5a5aULL;
    for (auto p : parts) {
        h = mix64(h ^ mix64(p));
    }
    return h;
}

// Uniform double in [0, 1) from the top 53 bits; identical across standard libraries.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace sawei
