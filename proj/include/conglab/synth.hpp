#pragma once

#include "conglab/hash.hpp"
#include "conglab/image.hpp"
#include "conglab/palette.hpp"
#include "conglab/road_network.hpp"
#include "conglab/series.hpp"
#include "conglab/timeutil.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace conglab {

enum class ProfileShape { Flat, Sin, Piecewise };

// Deterministic diurnal base curve over the capture window, in latent units.
struct DiurnalProfile {
    ProfileShape shape = ProfileShape::Sin;
    double low = 1.0;
    double high = 3.5;
    std::vector<std::pair<int, double>> knots; // Piecewise: (seconds of day, value)

    double value_at(int seconds_of_day) const;
};

// Latent value = day-regime amplitude * profile + AR(1) noise; the level is
// the latent value cut at the three thresholds, so levels stay in 1..4 by
// construction. noise is the innovation standard deviation; the AR chain
// starts at its stationary spread and runs continuously per segment.
struct ProcessParams {
    DiurnalProfile profile;
    double weekday_amp = 1.0;
    double weekend_amp = 1.0;
    double phi = 0.6;
    double noise = 0.5;
    double weekday_noise_scale = 1.0;
    double weekend_noise_scale = 1.0;
    std::array<double, 3> thresholds = {1.5, 2.5, 3.5};
};

struct SegmentGeometry {
    RoadSegment segment; // pixel_count = w * h
    int x = 0, y = 0, w = 0, h = 0;
};

struct SyntheticScene {
    int width = 0;
    int height = 0;
    std::vector<SegmentGeometry> segments;
    TrafficPalette palette;
    ProcessParams process;
    std::uint64_t seed = 0;
};

// Ring road over `intersections` nodes with both directions of every edge
// annotated, sized so every segment rectangle is disjoint.
SyntheticScene make_demo_scene(int intersections = 5, std::uint64_t seed = 1);

// Scene description file (sections: scene, palette, process, one [segment]
// per segment). Rectangles must be disjoint and inside the canvas.
SyntheticScene load_scene(const std::string& path);
void save_scene(const SyntheticScene& scene, const std::string& path);

RoadNetwork scene_network(const SyntheticScene& scene);
Image scene_mask(const SyntheticScene& scene);

struct SimulatedDays {
    std::vector<Timestamp> instants;
    std::vector<std::vector<int>> levels; // instants x segments, network order
    IntensityMatrix truth;                // count-of-{3,4} intensities
};

// base_interval must divide the 18 h window. Deterministic under seed.
SimulatedDays simulate_process(const SyntheticScene& scene, Date start, int days,
                               Seconds base_interval, std::uint64_t seed);

// One PNG per instant under out_dir, named <YYYYMMDD_HHMMSS>.png: white
// background, each segment painted its level's palette color.
void render_frames(const SyntheticScene& scene, const SimulatedDays& sim,
                   const std::string& out_dir, int workers = 1);

// Raw numeric fixture: profile plus AR(1) noise at `interval` cadence across
// `days` windows, one continuous chain. variance = 0 reproduces the profile.
std::vector<double> simulate_series(const DiurnalProfile& profile, Seconds interval, double phi,
                                    double variance, int days, std::uint64_t seed);

// Per-node integer matrix with weekday/weekend amplitude and noise regimes,
// for calendar-split experiments on controlled data.
struct RegimeMatrixSpec {
    std::vector<IntersectionId> nodes;
    Date start{};
    int days = 30;
    Seconds interval = kBaseCadence;
    DiurnalProfile profile; // in intensity units
    double weekday_amp = 1.0;
    double weekend_amp = 1.0;
    double phi = 0.6;
    double weekday_noise = 1.0; // innovation standard deviation
    double weekend_noise = 1.0;
    std::uint64_t seed = 0;
};

IntensityMatrix simulate_regime_matrix(const RegimeMatrixSpec& spec);

} // namespace conglab
