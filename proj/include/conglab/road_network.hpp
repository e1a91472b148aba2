#pragma once

#include "conglab/color.hpp"
#include "conglab/image.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace conglab {

using IntersectionId = std::string;

// Directed edge of the annotated road graph. Each segment is identified in
// the annotation mask by a unique RGB color.
struct RoadSegment {
    std::string id;
    Rgb annotation_color;
    IntersectionId from;
    IntersectionId to;
    std::int64_t pixel_count = 0;
};

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

// Immutable after construction; safe for concurrent reads.
class RoadNetwork {
public:
    RoadNetwork() = default;

    // Builds a network without enforcing invariants (validate() reports on
    // them instead). Intersections are the given set; segments are sorted
    // by id.
    static RoadNetwork from_parts(std::vector<RoadSegment> segments,
                                  std::vector<IntersectionId> intersections);

    const std::vector<RoadSegment>& segments() const { return segments_; }
    const std::vector<IntersectionId>& intersections() const { return intersections_; }

    bool has_intersection(const IntersectionId& node) const;
    const RoadSegment* segment_by_id(const std::string& id) const;
    const RoadSegment* segment_by_color(const Rgb& color) const;
    // Index into segments() for a mask color, -1 if the color is unassigned.
    int segment_index_by_color(const Rgb& color) const;
    int segment_index_by_id(const std::string& id) const;

    // Segments whose `to` endpoint is `node`, in id order. Unknown node
    // throws DataError.
    std::vector<const RoadSegment*> incoming_segments(const IntersectionId& node) const;
    std::vector<int> incoming_segment_indices(const IntersectionId& node) const;

    // Intersections sharing at least one segment with `node` in either
    // direction, deduplicated and sorted. Unknown node throws DataError.
    std::vector<IntersectionId> neighbors(const IntersectionId& node) const;

private:
    std::vector<RoadSegment> segments_;          // sorted by id
    std::vector<IntersectionId> intersections_;  // sorted, unique
    std::unordered_map<std::uint32_t, int> color_to_segment_;
    std::unordered_map<std::string, std::vector<int>> incoming_;
    std::unordered_map<std::string, std::vector<IntersectionId>> adjacency_;

    void check_node(const IntersectionId& node) const;
};

// Loads the segment registry CSV (header segment_id,color_hex,from_id,to_id)
// and binds pixel counts by exact color match against the annotation mask.
// Rejects duplicate ids/colors, malformed endpoints, and registry colors
// absent from the mask.
RoadNetwork load_network(const std::string& registry_path, const Image& mask);
RoadNetwork load_network_csv(const std::vector<std::vector<std::string>>& rows,
                             const std::vector<std::string>& header, const Image& mask);

// Writes the registry back out (sorted by segment id); load_network of the
// result is identity on ids, colors, and endpoints.
void save_registry(const RoadNetwork& net, const std::string& path);

// Reports dangling endpoints, color collisions, and zero-pixel segments.
// Never throws.
ValidationReport validate(const RoadNetwork& net);

} // namespace conglab
