#include <doctest.h>

#include "conglab/errors.hpp"
#include "conglab/frame.hpp"
#include "conglab/palette.hpp"
#include "conglab/road_network.hpp"
#include "support/tempdir.hpp"

#include <string>
#include <vector>

using namespace conglab;
using conglab::testing::TempDir;

namespace {

// Two segments into b, one out, with disjoint mask rectangles.
struct Fixture {
    RoadNetwork net;
    Image mask;

    Fixture() : mask(20, 10) {
        net = RoadNetwork::from_parts(
            {RoadSegment{"ab", Rgb{255, 0, 0}, "a", "b", 8},
             RoadSegment{"cb", Rgb{0, 0, 255}, "c", "b", 6},
             RoadSegment{"bc", Rgb{0, 255, 0}, "b", "c", 4}},
            {"a", "b", "c"});
        mask.fill_rect(0, 0, 8, 1, Rgb{255, 0, 0});
        mask.fill_rect(0, 2, 6, 1, Rgb{0, 0, 255});
        mask.fill_rect(0, 4, 4, 1, Rgb{0, 255, 0});
    }

    // Frame painting each whole segment one level color (0 = background).
    Image paint(int ab_level, int cb_level, int bc_level) const {
        const auto& pal = default_palette();
        Image frame(20, 10);
        auto color = [&](int level) { return pal.level_colors[std::size_t(level - 1)]; };
        if (ab_level > 0) frame.fill_rect(0, 0, 8, 1, color(ab_level));
        if (cb_level > 0) frame.fill_rect(0, 2, 6, 1, color(cb_level));
        if (bc_level > 0) frame.fill_rect(0, 4, 4, 1, color(bc_level));
        return frame;
    }
};

Timestamp ts(const std::string& stem) { return parse_frame_timestamp(stem); }

} // namespace

TEST_CASE("classify_pixel picks the nearest palette color within tolerance") {
    const auto pal = default_palette();
    check_palette(pal);
    for (int level = 1; level <= 4; ++level)
        CHECK(classify_pixel(pal.level_colors[std::size_t(level - 1)], pal) == level);
    CHECK(classify_pixel(Rgb{255, 255, 255}, pal) == 0);

    // Level-4 color nudged +5 per channel stays level 4 at tolerance 30.
    Rgb nudged = pal.level_colors[3];
    nudged.r = std::uint8_t(nudged.r + 5);
    nudged.g = std::uint8_t(nudged.g + 5);
    nudged.b = std::uint8_t(nudged.b + 5);
    CHECK(classify_pixel(nudged, pal) == 4);
}

TEST_CASE("palette invariants are enforced") {
    auto pal = default_palette();
    pal.level_colors[1] = pal.level_colors[0];
    CHECK_THROWS_AS(check_palette(pal), SchemaError);

    pal = default_palette();
    pal.tolerance = 1e6; // far above half the min pairwise distance
    CHECK_THROWS_AS(check_palette(pal), SchemaError);

    pal = default_palette();
    pal.tolerance = -1.0;
    CHECK_THROWS_AS(check_palette(pal), SchemaError);
}

TEST_CASE("extract_frame builds per-segment histograms over mask pixels") {
    Fixture fx;
    const auto pal = default_palette();

    auto obs = extract_frame(fx.paint(2, 2, 2), fx.mask, fx.net, pal, ts("20191101_060000"));
    REQUIRE(obs.by_segment.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& seg = fx.net.segments()[i];
        CHECK(obs.by_segment[i].level(2) == seg.pixel_count);
        CHECK(obs.by_segment[i].total() == seg.pixel_count);
    }

    // All-background frame lands every masked pixel at level 0.
    auto blank = extract_frame(Image(20, 10), fx.mask, fx.net, pal, ts("20191101_060030"));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(blank.by_segment[i].level(0) == fx.net.segments()[i].pixel_count);
    }

    CHECK_THROWS_AS(extract_frame(Image(8, 8), fx.mask, fx.net, pal, ts("20191101_060000")),
                    DataError);
}

TEST_CASE("extraction is deterministic") {
    Fixture fx;
    const auto pal = default_palette();
    auto a = extract_frame(fx.paint(1, 3, 4), fx.mask, fx.net, pal, ts("20191101_120000"));
    auto b = extract_frame(fx.paint(1, 3, 4), fx.mask, fx.net, pal, ts("20191101_120000"));
    REQUIRE(a.by_segment.size() == b.by_segment.size());
    for (std::size_t i = 0; i < a.by_segment.size(); ++i)
        CHECK(a.by_segment[i].counts == b.by_segment[i].counts);
}

TEST_CASE("intersection_intensity counts heavy pixels on incoming segments") {
    Fixture fx;
    const auto pal = default_palette();

    // ab at level 3 (8 px), cb at level 4 (6 px), bc at level 2: intensity of
    // b counts both incoming segments, bc points away.
    auto obs = extract_frame(fx.paint(3, 4, 2), fx.mask, fx.net, pal, ts("20191101_060000"));
    CHECK(intersection_intensity(obs, fx.net, "b") == 8 + 6);
    CHECK(intersection_intensity(obs, fx.net, "b", Aggregation::ValueSum) == 3 * 8 + 4 * 6);
    CHECK(intersection_intensity(obs, fx.net, "c") == 0);   // bc at level 2
    CHECK(intersection_intensity(obs, fx.net, "a") == 0);   // nothing incoming
    CHECK_THROWS_AS(intersection_intensity(obs, fx.net, "zz"), DataError);

    // Light traffic only: zero everywhere.
    auto light = extract_frame(fx.paint(1, 2, 1), fx.mask, fx.net, pal, ts("20191101_060030"));
    CHECK(intersection_intensity(light, fx.net, "b") == 0);

    // Intensity never exceeds the incoming pixel budget.
    auto heavy = extract_frame(fx.paint(4, 4, 4), fx.mask, fx.net, pal, ts("20191101_060100"));
    CHECK(intersection_intensity(heavy, fx.net, "b") == 14);
}

TEST_CASE("intersection_intensity rejects a frame missing a segment") {
    Fixture fx;
    FrameObservation obs;
    obs.timestamp = ts("20191101_060000");
    obs.by_segment.resize(3);
    obs.by_segment[1].counts = {0, 0, 0, 0, 0}; // "bc" absent (all-zero histogram)
    obs.by_segment[0].counts = {0, 0, 0, 8, 0};
    obs.by_segment[2].counts = {0, 0, 6, 0, 0};
    CHECK_THROWS_WITH_AS(intersection_intensity(obs, fx.net, "c"), doctest::Contains("bc"),
                         DataError);
}

TEST_CASE("aggregation names parse and print") {
    CHECK(parse_aggregation("count") == Aggregation::Count);
    CHECK(parse_aggregation("value-sum") == Aggregation::ValueSum);
    CHECK(aggregation_name(Aggregation::Count) == "count");
    CHECK(aggregation_name(Aggregation::ValueSum) == "value-sum");
    CHECK_THROWS_AS(parse_aggregation("median"), UsageError);
}

TEST_CASE("extraction CSV round trips frames in timestamp order") {
    Fixture fx;
    TempDir tmp;
    const auto pal = default_palette();
    std::vector<FrameObservation> frames{
        extract_frame(fx.paint(3, 1, 2), fx.mask, fx.net, pal, ts("20191101_060030")),
        extract_frame(fx.paint(4, 4, 1), fx.mask, fx.net, pal, ts("20191101_060000")),
    };
    const std::string path = tmp.file("extraction.csv");
    write_extraction_csv(frames, fx.net, path);
    auto loaded = read_extraction_csv(path, fx.net);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].timestamp == ts("20191101_060000")); // writer sorts
    CHECK(loaded[1].timestamp == ts("20191101_060030"));
    CHECK(loaded[0].by_segment[0].counts == frames[1].by_segment[0].counts);
    CHECK(loaded[1].by_segment[0].counts == frames[0].by_segment[0].counts);
}
