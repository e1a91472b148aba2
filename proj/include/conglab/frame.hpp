#pragma once

#include "conglab/image.hpp"
#include "conglab/palette.hpp"
#include "conglab/road_network.hpp"
#include "conglab/timeutil.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace conglab {

// Pixel counts per congestion level 0..4 for one segment in one frame.
struct LevelHistogram {
    std::array<std::int64_t, 5> counts{};

    std::int64_t total() const {
        std::int64_t t = 0;
        for (std::int64_t c : counts) t += c;
        return t;
    }
    std::int64_t level(int i) const { return counts[static_cast<std::size_t>(i)]; }
};

// Histograms are aligned with net.segments() order. A segment with an
// all-zero histogram counts as missing from the frame (segments always have
// at least one mask pixel).
struct FrameObservation {
    Timestamp timestamp{};
    std::vector<LevelHistogram> by_segment;
};

enum class Aggregation { Count, ValueSum };

Aggregation parse_aggregation(const std::string& name);
std::string aggregation_name(Aggregation agg);

// Classifies every masked pixel of the frame. The frame must match the mask
// dimensions; per-segment totals always equal the segment pixel counts.
FrameObservation extract_frame(const Image& frame, const Image& mask, const RoadNetwork& net,
                               const TrafficPalette& palette, Timestamp timestamp);

// Sum over segments entering the node: Count adds the level 3 and 4 pixel
// counts; ValueSum weights them by level (3*c3 + 4*c4). A node with no
// incoming segments scores 0; a segment missing from the frame is an error.
std::int64_t intersection_intensity(const FrameObservation& frame, const RoadNetwork& net,
                                    const IntersectionId& node,
                                    Aggregation agg = Aggregation::Count);

// CSV with header timestamp,segment_id,c0,c1,c2,c3,c4; rows ordered by
// (timestamp, segment id); timestamps in frame-stem form YYYYMMDD_HHMMSS.
void write_extraction_csv(const std::vector<FrameObservation>& frames, const RoadNetwork& net,
                          const std::string& path);
std::vector<FrameObservation> read_extraction_csv(const std::string& path,
                                                  const RoadNetwork& net);

} // namespace conglab
