#ifndef WKCC_RANDOM_HPP
#define WKCC_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace wkcc {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Hashes a tuple of stream coordinates (seed, replication, item, ...) into
/// a single 64-bit seed, so every stream can be regenerated independently.
inline std::uint64_t stream_seed(std::initializer_list<std::uint64_t> parts)
{
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (std::uint64_t p : parts)
        h = mix64(h ^ mix64(p));
    return h;
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::initializer_list<std::uint64_t> parts)
{
    return Rng(stream_seed(parts));
}

}  // namespace wkcc

#endif  // WKCC_RANDOM_HPP
