#pragma once

#include <cstdint>
#include <string>

namespace conglab {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Packs to a single comparable key, useful for hash maps over mask colors.
inline std::uint32_t rgb_key(const Rgb& c) {
    return (std::uint32_t(c.r) << 16) | (std::uint32_t(c.g) << 8) | std::uint32_t(c.b);
}

double rgb_distance(const Rgb& a, const Rgb& b);

// "#RRGGBB" (case-insensitive hex). Throws SchemaError on malformed input.
Rgb parse_hex_color(const std::string& text);
std::string to_hex_color(const Rgb& c);

} // namespace conglab
