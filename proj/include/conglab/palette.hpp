#pragma once

#include "conglab/color.hpp"

#include <array>
#include <string>

namespace conglab {

// Colors for congestion levels 1..4 (level 0 means "not on a road" and has
// no color of its own). Classification tolerance must stay below half the
// minimum pairwise distance between level colors so no pixel is within
// tolerance of two levels at once.
struct TrafficPalette {
    std::array<Rgb, 4> level_colors;
    double tolerance = 30.0;
};

// Defaults match the usual traffic tiles: green, orange, red, dark red.
TrafficPalette default_palette();

// Throws SchemaError when level colors repeat or the tolerance is not in
// (0, min_pairwise_distance / 2).
void check_palette(const TrafficPalette& palette);

// Nearest level color by Euclidean RGB distance; 0 when nothing is within
// tolerance.
int classify_pixel(const Rgb& pixel, const TrafficPalette& palette);

// Key-value palette file: level1..level4 hex colors plus tolerance.
TrafficPalette load_palette(const std::string& path);
void save_palette(const TrafficPalette& palette, const std::string& path);

} // namespace conglab
