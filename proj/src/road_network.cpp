#include "conglab/road_network.hpp"

#include "conglab/csv.hpp"
#include "conglab/errors.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace conglab {

namespace {

const std::vector<std::string> kRegistryHeader = {"segment_id", "color_hex", "from_id", "to_id"};

bool valid_endpoint_id(const std::string& id) {
    if (id.empty()) return false;
    for (char c : id) {
        if (c == ',' || c == '\n' || c == '\r') return false;
        if (static_cast<unsigned char>(c) < 0x20) return false;
    }
    return true;
}

} // namespace

RoadNetwork RoadNetwork::from_parts(std::vector<RoadSegment> segments,
                                    std::vector<IntersectionId> intersections) {
    RoadNetwork net;
    std::sort(segments.begin(), segments.end(),
              [](const RoadSegment& a, const RoadSegment& b) { return a.id < b.id; });
    std::sort(intersections.begin(), intersections.end());
    intersections.erase(std::unique(intersections.begin(), intersections.end()),
                        intersections.end());
    net.segments_ = std::move(segments);
    net.intersections_ = std::move(intersections);

    for (int i = 0; i < static_cast<int>(net.segments_.size()); ++i) {
        const RoadSegment& seg = net.segments_[i];
        net.color_to_segment_.emplace(rgb_key(seg.annotation_color), i);
        net.incoming_[seg.to].push_back(i);
        net.adjacency_[seg.from].push_back(seg.to);
        net.adjacency_[seg.to].push_back(seg.from);
    }
    for (auto& [node, ids] : net.adjacency_) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
    // incoming_ lists are already in id order: segments_ is sorted by id.
    return net;
}

bool RoadNetwork::has_intersection(const IntersectionId& node) const {
    return std::binary_search(intersections_.begin(), intersections_.end(), node);
}

const RoadSegment* RoadNetwork::segment_by_id(const std::string& id) const {
    int idx = segment_index_by_id(id);
    return idx < 0 ? nullptr : &segments_[idx];
}

int RoadNetwork::segment_index_by_id(const std::string& id) const {
    auto it = std::lower_bound(segments_.begin(), segments_.end(), id,
                               [](const RoadSegment& s, const std::string& key) { return s.id < key; });
    if (it == segments_.end() || it->id != id) return -1;
    return static_cast<int>(it - segments_.begin());
}

const RoadSegment* RoadNetwork::segment_by_color(const Rgb& color) const {
    int idx = segment_index_by_color(color);
    return idx < 0 ? nullptr : &segments_[idx];
}

int RoadNetwork::segment_index_by_color(const Rgb& color) const {
    auto it = color_to_segment_.find(rgb_key(color));
    return it == color_to_segment_.end() ? -1 : it->second;
}

void RoadNetwork::check_node(const IntersectionId& node) const {
    if (!has_intersection(node))
        throw DataError("unknown intersection '" + node + "'");
}

std::vector<int> RoadNetwork::incoming_segment_indices(const IntersectionId& node) const {
    check_node(node);
    auto it = incoming_.find(node);
    if (it == incoming_.end()) return {};
    return it->second;
}

std::vector<const RoadSegment*> RoadNetwork::incoming_segments(const IntersectionId& node) const {
    std::vector<const RoadSegment*> out;
    for (int idx : incoming_segment_indices(node)) out.push_back(&segments_[idx]);
    return out;
}

std::vector<IntersectionId> RoadNetwork::neighbors(const IntersectionId& node) const {
    check_node(node);
    auto it = adjacency_.find(node);
    if (it == adjacency_.end()) return {};
    return it->second;
}

RoadNetwork load_network_csv(const std::vector<std::vector<std::string>>& rows,
                             const std::vector<std::string>& header, const Image& mask) {
    if (header != kRegistryHeader)
        throw SchemaError("registry header must be segment_id,color_hex,from_id,to_id");

    std::unordered_map<std::uint32_t, std::int64_t> mask_counts;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            ++mask_counts[rgb_key(mask.at(x, y))];

    std::vector<RoadSegment> segments;
    std::unordered_set<std::string> seen_ids;
    std::unordered_map<std::uint32_t, std::string> seen_colors;
    std::set<IntersectionId> nodes;

    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& row = rows[r];
        std::string where = "registry row " + std::to_string(r + 2);
        RoadSegment seg;
        seg.id = row[0];
        if (!valid_endpoint_id(seg.id))
            throw DataError(where + ": malformed segment id '" + seg.id + "'");
        if (!seen_ids.insert(seg.id).second)
            throw DataError(where + ": duplicate segment id '" + seg.id + "'");
        seg.annotation_color = parse_hex_color(row[1]);
        auto [cit, fresh] = seen_colors.emplace(rgb_key(seg.annotation_color), seg.id);
        if (!fresh)
            throw DataError(where + ": color " + row[1] + " already used by segment '" +
                            cit->second + "'");
        seg.from = row[2];
        seg.to = row[3];
        if (!valid_endpoint_id(seg.from) || !valid_endpoint_id(seg.to))
            throw DataError(where + ": malformed endpoint id for segment '" + seg.id + "'");
        if (seg.from == seg.to)
            throw DataError(where + ": segment '" + seg.id + "' is a self-loop");
        auto mit = mask_counts.find(rgb_key(seg.annotation_color));
        if (mit == mask_counts.end() || mit->second == 0)
            throw DataError("segment '" + seg.id + "': color " + row[1] +
                            " does not appear in the mask");
        seg.pixel_count = mit->second;
        nodes.insert(seg.from);
        nodes.insert(seg.to);
        segments.push_back(std::move(seg));
    }

    return RoadNetwork::from_parts(std::move(segments),
                                   std::vector<IntersectionId>(nodes.begin(), nodes.end()));
}

RoadNetwork load_network(const std::string& registry_path, const Image& mask) {
    CsvTable table = read_csv(registry_path);
    return load_network_csv(table.rows, table.header, mask);
}

void save_registry(const RoadNetwork& net, const std::string& path) {
    CsvTable table;
    table.header = kRegistryHeader;
    for (const RoadSegment& seg : net.segments())
        table.rows.push_back({seg.id, to_hex_color(seg.annotation_color), seg.from, seg.to});
    write_csv(path, table);
}

ValidationReport validate(const RoadNetwork& net) {
    ValidationReport report;
    std::unordered_map<std::uint32_t, std::string> colors;
    for (const RoadSegment& seg : net.segments()) {
        auto [it, fresh] = colors.emplace(rgb_key(seg.annotation_color), seg.id);
        if (!fresh)
            report.issues.push_back("color collision: segments '" + it->second + "' and '" +
                                    seg.id + "' share " + to_hex_color(seg.annotation_color));
        if (seg.pixel_count <= 0)
            report.issues.push_back("zero-pixel segment: '" + seg.id + "'");
        for (const IntersectionId* end : {&seg.from, &seg.to}) {
            if (!net.has_intersection(*end))
                report.issues.push_back("dangling endpoint: segment '" + seg.id +
                                        "' references unknown intersection '" + *end + "'");
        }
        if (seg.from == seg.to)
            report.issues.push_back("self-loop: segment '" + seg.id + "'");
    }
    return report;
}

} // namespace conglab
