#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <random>
#include <string>
#include <string_view>

namespace depthcharge {

// Keys are opaque byte strings. Attack workloads need keys that land on a
// chosen index regardless of the table's hash seed, so a reserved 16-byte
// "directed" encoding carries the index inline: an 8-byte magic prefix, the
// target index (big-endian u32), and a counter to keep keys distinct.
inline constexpr std::array<unsigned char, 8> kDirectedMagic = {
    0x00, 'D', 'C', 'I', 'D', 'X', 0xa5, 0x5a};

inline constexpr std::size_t kDirectedKeySize = 16;

inline std::string directed_key(uint32_t index, uint32_t counter) {
    std::string k(kDirectedKeySize, '\0');
    std::memcpy(k.data(), kDirectedMagic.data(), kDirectedMagic.size());
    unsigned char* p = reinterpret_cast<unsigned char*>(k.data()) + 8;
    p[0] = static_cast<unsigned char>(index >> 24);
    p[1] = static_cast<unsigned char>(index >> 16);
    p[2] = static_cast<unsigned char>(index >> 8);
    p[3] = static_cast<unsigned char>(index);
    p[4] = static_cast<unsigned char>(counter >> 24);
    p[5] = static_cast<unsigned char>(counter >> 16);
    p[6] = static_cast<unsigned char>(counter >> 8);
    p[7] = static_cast<unsigned char>(counter);
    return k;
}

inline bool is_directed_key(std::string_view key) {
    return key.size() == kDirectedKeySize &&
           std::memcmp(key.data(), kDirectedMagic.data(), kDirectedMagic.size()) == 0;
}

// Preconditions: is_directed_key(key).
inline uint32_t directed_index(std::string_view key) {
    const auto* p = reinterpret_cast<const unsigned char*>(key.data()) + 8;
    return (uint32_t{p[0]} << 24) | (uint32_t{p[1]} << 16) | (uint32_t{p[2]} << 8) | uint32_t{p[3]};
}

// 16 random bytes; avoids the directed prefix so generated keys always take
// the normal hash path.
inline std::string random_key(std::mt19937_64& rng) {
    std::string k(kDirectedKeySize, '\0');
    for (;;) {
        for (std::size_t i = 0; i < k.size(); i += 8) {
            uint64_t w = rng();
            std::memcpy(k.data() + i, &w, 8);
        }
        if (!is_directed_key(k)) return k;
    }
}

}  // namespace depthcharge
