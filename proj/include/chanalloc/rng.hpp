#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace chanalloc {

// Counter-based deterministic randomness. Every draw is a pure function of the
// mixed key, so results do not depend on evaluation order and are reproducible
// across platforms and thread schedules.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

constexpr std::uint64_t fnv1a(const char* data, std::size_t len) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t hash_str(std::string_view s) { return fnv1a(s.data(), s.size()); }

/// Uniform double in [0, 1) from a mixed key.
inline double uniform01(std::uint64_t key) {
    return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) from a mixed key.
inline std::uint32_t uniform_below(std::uint64_t key, std::uint32_t n) {
    return static_cast<std::uint32_t>((splitmix64(key) >> 16) % n);
}

/// Standard normal draw (Box-Muller) from a mixed key.
inline double normal01(std::uint64_t key) {
    double u1 = uniform01(mix(key, 0x6a09e667f3bcc909ULL));
    double u2 = uniform01(mix(key, 0xbb67ae8584caa73bULL));
    if (u1 <= 0.0) {
        u1 = 0x1.0p-53;
    }
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

}  // namespace chanalloc
