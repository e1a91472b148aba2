#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace conglab {

// FNV-1a, used for config fingerprints and seed derivation.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// splitmix64: tiny, seedable, stable across platforms.
struct Rng {
    std::uint64_t state = 0;
    double spare = 0.0;
    bool has_spare = false;

    explicit Rng(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double next_unit() { return double(next_u64() >> 11) * 0x1p-53; }

    // Box-Muller; draws two uniforms and banks the sine leg for the next call.
    double next_gauss() {
        if (has_spare) {
            has_spare = false;
            return spare;
        }
        const double u1 = 1.0 - next_unit(); // (0, 1], keeps the log finite
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare = r * std::sin(a);
        has_spare = true;
        return r * std::cos(a);
    }
};

} // namespace conglab
