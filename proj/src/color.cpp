#include "conglab/color.hpp"

#include "conglab/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace conglab {

double rgb_distance(const Rgb& a, const Rgb& b) {
    const double dr = double(a.r) - double(b.r);
    const double dg = double(a.g) - double(b.g);
    const double db = double(a.b) - double(b.b);
    return std::sqrt(dr * dr + dg * dg + db * db);
}

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

Rgb parse_hex_color(const std::string& text) {
    if (text.size() != 7 || text[0] != '#') {
        throw SchemaError("malformed color '" + text + "': expected #RRGGBB");
    }
    std::uint8_t bytes[3];
    for (int i = 0; i < 3; ++i) {
        const int hi = hex_nibble(text[1 + 2 * i]);
        const int lo = hex_nibble(text[2 + 2 * i]);
        if (hi < 0 || lo < 0) {
            throw SchemaError("malformed color '" + text + "': expected #RRGGBB");
        }
        bytes[i] = std::uint8_t(hi * 16 + lo);
    }
    return Rgb{bytes[0], bytes[1], bytes[2]};
}

std::string to_hex_color(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02X%02X%02X", c.r, c.g, c.b);
    return buf;
}

} // namespace conglab
