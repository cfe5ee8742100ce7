#ifndef DIVEST_RNG_HPP
#define DIVEST_RNG_HPP

#include <cstdint>
#include <random>

namespace divest {

/// Engine used for every random stream. The output sequence of
/// std::mt19937_64 is fixed by the standard, and all distributions come from
/// Boost.Random, so results do not depend on the standard library vendor.
using Engine = std::mt19937_64;

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Child seed for stream `id` under `parent`. Streams form a tree, so any
/// node can be regenerated without touching its siblings.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t id) noexcept {
    return mix64(mix64(parent) ^ mix64(id + 0x632be59bd9b4e019ULL));
}

template <class... Ids>
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t id, Ids... rest) noexcept {
    return derive_seed(derive_seed(parent, id), static_cast<std::uint64_t>(rest)...);
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

}  // namespace divest

#endif  // DIVEST_RNG_HPP
