#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace robreg {

using Engine = std::mt19937_64;

// Finalizer from SplitMix64; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Fold a sequence of words into one seed. Order matters.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = 0x243f6a8885a308d3ULL;
    for (std::uint64_t p : parts) {
        h = splitmix64(h ^ splitmix64(p));
    }
    return h;
}

// Tags for the independent sub-streams of one sample stream.
enum class StreamRole : std::uint64_t {
    features = 0x66656174,
    noise = 0x6e6f6973,
    corruption = 0x636f7272,
};

inline Engine make_engine(std::uint64_t seed, StreamRole role) {
    return Engine(derive_seed({seed, static_cast<std::uint64_t>(role)}));
}

} // namespace robreg
