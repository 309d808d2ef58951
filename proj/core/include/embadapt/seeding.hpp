#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace embadapt {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a path of tags.
/// Every random stream in the library is obtained this way from the one
/// user-facing seed, so results never depend on scheduling or wall time.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t h = splitmix64(base);
    for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
    return h;
}

/// Stream tags. Values are part of the reproducibility contract; never renumber.
namespace seed_tag {
inline constexpr std::uint64_t head_init = 1;
inline constexpr std::uint64_t epoch_shuffle = 2;
inline constexpr std::uint64_t folds = 3;
inline constexpr std::uint64_t projection = 4;
inline constexpr std::uint64_t classifier = 5;
inline constexpr std::uint64_t tree = 6;
}  // namespace seed_tag

}  // namespace embadapt
