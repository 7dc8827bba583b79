#pragma once

#include <cstdint>
#include <string_view>

namespace depthcharge {

// 64-bit finalizer with full avalanche (splitmix64 / murmur3-style).
constexpr uint64_t mix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr uint64_t fnv1a64(std::string_view bytes, uint64_t basis = 0xcbf29ce484222325ull) {
    uint64_t h = basis;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Keyed byte-string hash; deterministic for a fixed seed.
constexpr uint64_t keyed_hash(std::string_view bytes, uint64_t seed) {
    return mix64(fnv1a64(bytes, 0xcbf29ce484222325ull ^ mix64(seed)));
}

// Maps a hash value to [0, n) without modulo bias worth caring about.
constexpr uint32_t bounded(uint64_t h, uint32_t n) {
    return static_cast<uint32_t>((static_cast<unsigned __int128>(h) * n) >> 64);
}

}  // namespace depthcharge
