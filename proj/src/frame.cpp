#include "conglab/frame.hpp"

#include "conglab/csv.hpp"
#include "conglab/errors.hpp"

#include <algorithm>

namespace conglab {

Aggregation parse_aggregation(const std::string& name) {
    if (name == "count") return Aggregation::Count;
    if (name == "value-sum") return Aggregation::ValueSum;
    throw UsageError("unknown aggregation '" + name + "' (expected count or value-sum)");
}

std::string aggregation_name(Aggregation agg) {
    return agg == Aggregation::Count ? "count" : "value-sum";
}

FrameObservation extract_frame(const Image& frame, const Image& mask, const RoadNetwork& net,
                               const TrafficPalette& palette, Timestamp timestamp) {
    if (!frame.same_dimensions(mask))
        throw DataError("frame is " + std::to_string(frame.width()) + "x" +
                        std::to_string(frame.height()) + " but mask is " +
                        std::to_string(mask.width()) + "x" + std::to_string(mask.height()));

    FrameObservation obs;
    obs.timestamp = timestamp;
    obs.by_segment.resize(net.segments().size());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            int seg = net.segment_index_by_color(mask.at(x, y));
            if (seg < 0) continue;
            int level = classify_pixel(frame.at(x, y), palette);
            ++obs.by_segment[seg].counts[static_cast<std::size_t>(level)];
        }
    }
    return obs;
}

std::int64_t intersection_intensity(const FrameObservation& frame, const RoadNetwork& net,
                                    const IntersectionId& node, Aggregation agg) {
    if (frame.by_segment.size() != net.segments().size())
        throw DataError("frame has " + std::to_string(frame.by_segment.size()) +
                        " segment histograms, network has " +
                        std::to_string(net.segments().size()));
    std::int64_t sum = 0;
    for (int idx : net.incoming_segment_indices(node)) {
        const LevelHistogram& hist = frame.by_segment[idx];
        if (hist.total() == 0)
            throw DataError("segment '" + net.segments()[idx].id + "' missing from frame " +
                            to_frame_stem(frame.timestamp));
        if (agg == Aggregation::Count)
            sum += hist.level(3) + hist.level(4);
        else
            sum += 3 * hist.level(3) + 4 * hist.level(4);
    }
    return sum;
}

void write_extraction_csv(const std::vector<FrameObservation>& frames, const RoadNetwork& net,
                          const std::string& path) {
    std::vector<const FrameObservation*> ordered;
    for (const FrameObservation& f : frames) ordered.push_back(&f);
    std::sort(ordered.begin(), ordered.end(),
              [](const FrameObservation* a, const FrameObservation* b) {
                  return a->timestamp < b->timestamp;
              });

    CsvTable table;
    table.header = {"timestamp", "segment_id", "c0", "c1", "c2", "c3", "c4"};
    for (const FrameObservation* f : ordered) {
        if (f->by_segment.size() != net.segments().size())
            throw DataError("frame " + to_frame_stem(f->timestamp) +
                            " does not match the network segment count");
        for (std::size_t i = 0; i < f->by_segment.size(); ++i) {
            const LevelHistogram& h = f->by_segment[i];
            if (h.total() == 0) continue;
            table.rows.push_back({to_frame_stem(f->timestamp), net.segments()[i].id,
                                  std::to_string(h.level(0)), std::to_string(h.level(1)),
                                  std::to_string(h.level(2)), std::to_string(h.level(3)),
                                  std::to_string(h.level(4))});
        }
    }
    write_csv(path, table);
}

std::vector<FrameObservation> read_extraction_csv(const std::string& path,
                                                  const RoadNetwork& net) {
    CsvTable table = read_csv(path);
    const std::vector<std::string> expected = {"timestamp", "segment_id", "c0",
                                               "c1",        "c2",         "c3", "c4"};
    if (table.header != expected)
        throw SchemaError("extraction file '" + path + "' has an unexpected header");

    std::vector<FrameObservation> frames;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        Timestamp t = parse_frame_timestamp(row[0]);
        if (frames.empty() || frames.back().timestamp != t) {
            if (!frames.empty() && t < frames.back().timestamp)
                throw SchemaError("extraction file '" + path + "' row " + std::to_string(r + 2) +
                                  ": timestamps out of order");
            FrameObservation obs;
            obs.timestamp = t;
            obs.by_segment.resize(net.segments().size());
            frames.push_back(std::move(obs));
        }
        int seg = net.segment_index_by_id(row[1]);
        if (seg < 0)
            throw DataError("extraction file '" + path + "' row " + std::to_string(r + 2) +
                            ": unknown segment '" + row[1] + "'");
        LevelHistogram hist;
        for (int c = 0; c < 5; ++c) {
            long long v = parse_int(row[static_cast<std::size_t>(c) + 2]);
            if (v < 0)
                throw SchemaError("extraction file '" + path + "' row " + std::to_string(r + 2) +
                                  ": negative count");
            hist.counts[static_cast<std::size_t>(c)] = v;
        }
        if (hist.total() == 0)
            throw SchemaError("extraction file '" + path + "' row " + std::to_string(r + 2) +
                              ": empty histogram");
        LevelHistogram& slot = frames.back().by_segment[seg];
        if (slot.total() != 0)
            throw DataError("extraction file '" + path + "' row " + std::to_string(r + 2) +
                            ": duplicate segment '" + row[1] + "' in frame " + row[0]);
        slot = hist;
    }
    return frames;
}

} // namespace conglab
