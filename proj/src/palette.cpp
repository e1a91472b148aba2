#include "conglab/palette.hpp"

#include "conglab/config.hpp"
#include "conglab/csv.hpp"
#include "conglab/errors.hpp"

#include <limits>
#include <string>

namespace conglab {

TrafficPalette default_palette() {
    TrafficPalette p;
    p.level_colors = {Rgb{46, 204, 113},   // free flow
                      Rgb{243, 156, 18},   // moderate
                      Rgb{231, 76, 60},    // heavy
                      Rgb{120, 40, 31}};   // jam
    p.tolerance = 30.0;
    return p;
}

void check_palette(const TrafficPalette& palette) {
    double min_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            double d = rgb_distance(palette.level_colors[i], palette.level_colors[j]);
            if (d == 0.0)
                throw SchemaError("palette levels " + std::to_string(i + 1) + " and " +
                                  std::to_string(j + 1) + " share color " +
                                  to_hex_color(palette.level_colors[i]));
            min_dist = std::min(min_dist, d);
        }
    if (!(palette.tolerance > 0.0))
        throw SchemaError("palette tolerance must be positive");
    if (palette.tolerance >= min_dist / 2.0)
        throw SchemaError("palette tolerance " + fmt_double(palette.tolerance) +
                          " is not below half the minimum pairwise color distance " +
                          fmt_double(min_dist));
}

int classify_pixel(const Rgb& pixel, const TrafficPalette& palette) {
    int best_level = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        double d = rgb_distance(pixel, palette.level_colors[i]);
        if (d < best) {
            best = d;
            best_level = i + 1;
        }
    }
    return best <= palette.tolerance ? best_level : 0;
}

TrafficPalette load_palette(const std::string& path) {
    ConfigFile cfg = load_config(path);
    TrafficPalette p;
    for (int i = 0; i < 4; ++i) {
        std::string key = "level" + std::to_string(i + 1);
        auto value = cfg.get(key);
        if (!value) value = cfg.get("palette." + key);
        if (!value) throw SchemaError("palette file '" + path + "': missing " + key);
        p.level_colors[i] = parse_hex_color(*value);
    }
    auto tol = cfg.get("tolerance");
    if (!tol) tol = cfg.get("palette.tolerance");
    if (tol) p.tolerance = parse_double(*tol);
    check_palette(p);
    return p;
}

void save_palette(const TrafficPalette& palette, const std::string& path) {
    std::string text;
    for (int i = 0; i < 4; ++i)
        text += "level" + std::to_string(i + 1) + " = \"" +
                to_hex_color(palette.level_colors[i]) + "\"\n"; // quoted: '#' starts a comment
    text += "tolerance = " + fmt_double(palette.tolerance) + "\n";
    write_text_atomic(path, text);
}

} // namespace conglab
