#include "conglab/synth.hpp"

#include "conglab/config.hpp"
#include "conglab/csv.hpp"
#include "conglab/errors.hpp"
#include "conglab/workers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

namespace conglab {

namespace {

constexpr int kWindowLen = kDayWindowEnd + 1 - kDayWindowStart; // 64800 s

int slots_per_day(Seconds interval) {
    const long long step = interval.count();
    if (step <= 0 || kWindowLen % step != 0)
        throw UsageError("interval of " + std::to_string(step) +
                         " s does not divide the 18 h capture window");
    return int(kWindowLen / step);
}

int level_of(double latent, const std::array<double, 3>& thresholds) {
    int level = 1;
    for (double t : thresholds)
        if (latent >= t) ++level;
    return level;
}

double noise_scale_for(Date day, const ProcessParams& p) {
    return p.noise * (is_weekend(day) ? p.weekend_noise_scale : p.weekday_noise_scale);
}

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
    std::istringstream in(text);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok));
    if (out.empty()) throw SchemaError("empty " + what);
    return out;
}

int parse_sod(const std::string& text) {
    if (text.size() != 8 || text[2] != ':' || text[5] != ':')
        throw SchemaError("expected HH:MM:SS, got '" + text + "'");
    int h = int(parse_int(text.substr(0, 2)));
    int m = int(parse_int(text.substr(3, 2)));
    int s = int(parse_int(text.substr(6, 2)));
    if (h > 23 || m > 59 || s > 59) throw SchemaError("bad time of day '" + text + "'");
    return h * 3600 + m * 60 + s;
}

std::string sod_string(int sod) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%02d:%02d:%02d", sod / 3600, (sod / 60) % 60, sod % 60);
    return buf;
}

void check_process(const ProcessParams& p) {
    if (!(std::abs(p.phi) < 1.0)) throw SchemaError("AR coefficient phi must satisfy |phi| < 1");
    if (p.noise < 0.0 || p.weekday_noise_scale < 0.0 || p.weekend_noise_scale < 0.0)
        throw SchemaError("noise levels must be non-negative");
    if (!(p.thresholds[0] < p.thresholds[1] && p.thresholds[1] < p.thresholds[2]))
        throw SchemaError("level thresholds must be strictly increasing");
    if (p.profile.shape == ProfileShape::Piecewise) {
        if (p.profile.knots.empty()) throw SchemaError("piecewise profile needs knots");
        for (std::size_t i = 1; i < p.profile.knots.size(); ++i)
            if (p.profile.knots[i - 1].first >= p.profile.knots[i].first)
                throw SchemaError("profile knots must be strictly increasing in time");
    }
}

} // namespace

double DiurnalProfile::value_at(int sod) const {
    switch (shape) {
    case ProfileShape::Flat:
        return low;
    case ProfileShape::Sin: {
        const double u = double(sod - kDayWindowStart) / double(kWindowLen);
        return low + (high - low) * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * u));
    }
    case ProfileShape::Piecewise: {
        if (knots.empty()) throw UsageError("piecewise profile has no knots");
        if (sod <= knots.front().first) return knots.front().second;
        if (sod >= knots.back().first) return knots.back().second;
        for (std::size_t i = 1; i < knots.size(); ++i) {
            if (sod <= knots[i].first) {
                const auto& [t0, v0] = knots[i - 1];
                const auto& [t1, v1] = knots[i];
                return v0 + (v1 - v0) * double(sod - t0) / double(t1 - t0);
            }
        }
        return knots.back().second;
    }
    }
    throw UsageError("bad profile shape");
}

SyntheticScene make_demo_scene(int intersections, std::uint64_t seed) {
    if (intersections < 3 || intersections > 60)
        throw UsageError("demo scene needs 3..60 intersections");
    SyntheticScene scene;
    scene.seed = seed;
    scene.palette = default_palette();

    const int n_segments = 2 * intersections; // both directions of the ring
    auto node_name = [](int k) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "n%02d", k);
        return std::string(buf);
    };
    for (int e = 0; e < intersections; ++e) {
        const std::string a = node_name(e);
        const std::string b = node_name((e + 1) % intersections);
        for (int dir = 0; dir < 2; ++dir) {
            const int i = 2 * e + dir;
            SegmentGeometry geo;
            char id[8];
            std::snprintf(id, sizeof(id), "s%03d", i);
            geo.segment.id = id;
            geo.segment.annotation_color =
                Rgb{std::uint8_t(i + 1), std::uint8_t(200 - (i * 3) % 180),
                    std::uint8_t(40 + (i * 11) % 200)};
            geo.segment.from = dir == 0 ? a : b;
            geo.segment.to = dir == 0 ? b : a;
            geo.x = 4 + (i % 2) * 150;
            geo.y = 4 + (i / 2) * 8;
            geo.w = 120;
            geo.h = 4;
            geo.segment.pixel_count = geo.w * geo.h;
            scene.segments.push_back(std::move(geo));
        }
    }
    scene.width = 300;
    scene.height = 8 + (n_segments / 2) * 8;
    return scene;
}

RoadNetwork scene_network(const SyntheticScene& scene) {
    std::vector<RoadSegment> segments;
    std::vector<IntersectionId> nodes;
    for (const SegmentGeometry& geo : scene.segments) {
        RoadSegment seg = geo.segment;
        seg.pixel_count = std::int64_t(geo.w) * geo.h;
        nodes.push_back(seg.from);
        nodes.push_back(seg.to);
        segments.push_back(std::move(seg));
    }
    return RoadNetwork::from_parts(std::move(segments), std::move(nodes));
}

Image scene_mask(const SyntheticScene& scene) {
    Image mask(scene.width, scene.height, Rgb{255, 255, 255});
    for (const SegmentGeometry& geo : scene.segments)
        mask.fill_rect(geo.x, geo.y, geo.w, geo.h, geo.segment.annotation_color);
    return mask;
}

SimulatedDays simulate_process(const SyntheticScene& scene, Date start, int days,
                               Seconds base_interval, std::uint64_t seed) {
    if (days < 1) throw UsageError("need at least one day to simulate");
    if (!start.ok()) throw UsageError("bad start date");
    check_process(scene.process);
    const int per_day = slots_per_day(base_interval);
    const RoadNetwork net = scene_network(scene);
    const ProcessParams& proc = scene.process;

    SimulatedDays sim;
    for (int d = 0; d < days; ++d) {
        const Date day{std::chrono::sys_days{start} + std::chrono::days{d}};
        for (int k = 0; k < per_day; ++k)
            sim.instants.push_back(
                at_time_of_day(day, kDayWindowStart + k * int(base_interval.count())));
    }
    const std::size_t n_inst = sim.instants.size();
    const std::size_t n_seg = net.segments().size();
    sim.levels.assign(n_inst, std::vector<int>(n_seg, 0));

    for (std::size_t s = 0; s < n_seg; ++s) {
        const RoadSegment& seg = net.segments()[s];
        Rng rng(fnv1a64(seg.id, seed));
        double e = 0.0;
        for (std::size_t t = 0; t < n_inst; ++t) {
            const Date day = date_of(sim.instants[t]);
            const double scale = noise_scale_for(day, proc);
            if (t == 0) {
                const double stat = scale / std::sqrt(1.0 - proc.phi * proc.phi);
                e = stat * rng.next_gauss();
            } else {
                e = proc.phi * e + scale * rng.next_gauss();
            }
            const double amp = is_weekend(day) ? proc.weekend_amp : proc.weekday_amp;
            const double latent =
                amp * proc.profile.value_at(seconds_of_day(sim.instants[t])) + e;
            sim.levels[t][s] = level_of(latent, proc.thresholds);
        }
    }

    const std::vector<IntersectionId>& columns = net.intersections();
    std::vector<std::vector<int>> incoming(columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c)
        incoming[c] = net.incoming_segment_indices(columns[c]);

    std::vector<std::int64_t> values;
    values.reserve(n_inst * columns.size());
    for (std::size_t t = 0; t < n_inst; ++t) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            std::int64_t sum = 0;
            for (int s : incoming[c])
                if (sim.levels[t][std::size_t(s)] >= 3)
                    sum += net.segments()[std::size_t(s)].pixel_count;
            values.push_back(sum);
        }
    }
    sim.truth = IntensityMatrix(sim.instants, columns, std::move(values));
    return sim;
}

void render_frames(const SyntheticScene& scene, const SimulatedDays& sim,
                   const std::string& out_dir, int workers) {
    check_palette(scene.palette);
    std::filesystem::create_directories(out_dir);
    const RoadNetwork net = scene_network(scene);

    std::vector<const SegmentGeometry*> geo_by_index(net.segments().size());
    for (const SegmentGeometry& geo : scene.segments) {
        int idx = net.segment_index_by_id(geo.segment.id);
        geo_by_index[std::size_t(idx)] = &geo;
    }

    parallel_for(sim.instants.size(), workers, [&](std::size_t t) {
        Image frame(scene.width, scene.height, Rgb{255, 255, 255});
        for (std::size_t s = 0; s < geo_by_index.size(); ++s) {
            const SegmentGeometry& geo = *geo_by_index[s];
            const int level = sim.levels[t][s];
            frame.fill_rect(geo.x, geo.y, geo.w, geo.h,
                            scene.palette.level_colors[std::size_t(level - 1)]);
        }
        const std::string path = out_dir + "/" + to_frame_stem(sim.instants[t]) + ".png";
        save_png(path, frame);
    });
}

std::vector<double> simulate_series(const DiurnalProfile& profile, Seconds interval, double phi,
                                    double variance, int days, std::uint64_t seed) {
    if (days < 1) throw UsageError("need at least one day of data");
    if (!(std::abs(phi) < 1.0)) throw UsageError("AR coefficient phi must satisfy |phi| < 1");
    if (variance < 0.0) throw UsageError("variance must be non-negative");
    const int per_day = slots_per_day(interval);
    const double sd = std::sqrt(variance);

    Rng rng(seed);
    std::vector<double> out;
    out.reserve(std::size_t(per_day) * std::size_t(days));
    double e = sd == 0.0 ? 0.0 : sd / std::sqrt(1.0 - phi * phi) * rng.next_gauss();
    for (int d = 0; d < days; ++d) {
        for (int k = 0; k < per_day; ++k) {
            if (!(d == 0 && k == 0)) e = phi * e + sd * rng.next_gauss();
            out.push_back(profile.value_at(kDayWindowStart + k * int(interval.count())) + e);
        }
    }
    return out;
}

IntensityMatrix simulate_regime_matrix(const RegimeMatrixSpec& spec) {
    if (spec.nodes.empty()) throw UsageError("regime matrix needs at least one node");
    if (spec.days < 1) throw UsageError("regime matrix needs at least one day");
    if (!(std::abs(spec.phi) < 1.0)) throw UsageError("AR coefficient phi must satisfy |phi| < 1");
    if (!spec.start.ok()) throw UsageError("bad start date");
    const int per_day = slots_per_day(spec.interval);

    std::vector<IntersectionId> columns = spec.nodes;
    std::sort(columns.begin(), columns.end());
    columns.erase(std::unique(columns.begin(), columns.end()), columns.end());

    std::vector<Timestamp> times;
    for (int d = 0; d < spec.days; ++d) {
        const Date day{std::chrono::sys_days{spec.start} + std::chrono::days{d}};
        for (int k = 0; k < per_day; ++k)
            times.push_back(at_time_of_day(day, kDayWindowStart + k * int(spec.interval.count())));
    }

    const std::size_t n_rows = times.size();
    std::vector<std::int64_t> values(n_rows * columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        Rng rng(fnv1a64(columns[c], spec.seed));
        double e = 0.0;
        for (std::size_t t = 0; t < n_rows; ++t) {
            const Date day = date_of(times[t]);
            const bool weekend = is_weekend(day);
            const double sd = weekend ? spec.weekend_noise : spec.weekday_noise;
            if (t == 0)
                e = (std::abs(spec.phi) < 1.0 ? sd / std::sqrt(1.0 - spec.phi * spec.phi) : sd) *
                    rng.next_gauss();
            else
                e = spec.phi * e + sd * rng.next_gauss();
            const double amp = weekend ? spec.weekend_amp : spec.weekday_amp;
            const double v = amp * spec.profile.value_at(seconds_of_day(times[t])) + e;
            values[t * columns.size() + c] = std::llround(std::max(0.0, v));
        }
    }
    return IntensityMatrix(std::move(times), std::move(columns), std::move(values));
}

SyntheticScene load_scene(const std::string& path) {
    ConfigFile cfg = load_config(path);
    SyntheticScene scene;

    auto scene_secs = cfg.sections_named("scene");
    if (scene_secs.empty()) throw SchemaError("scene file '" + path + "' lacks a [scene] section");
    const ConfigSection& sc = *scene_secs.back();
    scene.width = int(parse_int(sc.require("width")));
    scene.height = int(parse_int(sc.require("height")));
    if (scene.width < 1 || scene.height < 1)
        throw SchemaError("scene dimensions must be positive");
    if (auto seed = sc.get("seed")) {
        long long v = parse_int(*seed);
        if (v < 0) throw SchemaError("seed must be non-negative");
        scene.seed = std::uint64_t(v);
    }

    scene.palette = default_palette();
    if (!cfg.sections_named("palette").empty()) {
        const ConfigSection& pal = *cfg.sections_named("palette").back();
        for (int i = 0; i < 4; ++i)
            scene.palette.level_colors[std::size_t(i)] =
                parse_hex_color(pal.require("level" + std::to_string(i + 1)));
        if (auto tol = pal.get("tolerance")) scene.palette.tolerance = parse_double(*tol);
    }
    check_palette(scene.palette);

    if (!cfg.sections_named("process").empty()) {
        const ConfigSection& pr = *cfg.sections_named("process").back();
        ProcessParams& p = scene.process;
        if (auto shape = pr.get("profile")) {
            if (*shape == "flat")
                p.profile.shape = ProfileShape::Flat;
            else if (*shape == "sin")
                p.profile.shape = ProfileShape::Sin;
            else if (*shape == "piecewise")
                p.profile.shape = ProfileShape::Piecewise;
            else
                throw SchemaError("unknown profile shape '" + *shape + "'");
        }
        if (auto v = pr.get("profile_low")) p.profile.low = parse_double(*v);
        if (auto v = pr.get("profile_high")) p.profile.high = parse_double(*v);
        if (auto v = pr.get("knots")) {
            std::istringstream in(*v);
            std::string tok;
            while (in >> tok) {
                std::size_t eq = tok.find('=');
                if (eq == std::string::npos)
                    throw SchemaError("knot '" + tok + "' must be HH:MM:SS=value");
                p.profile.knots.emplace_back(parse_sod(tok.substr(0, eq)),
                                             parse_double(tok.substr(eq + 1)));
            }
        }
        if (auto v = pr.get("weekday_amp")) p.weekday_amp = parse_double(*v);
        if (auto v = pr.get("weekend_amp")) p.weekend_amp = parse_double(*v);
        if (auto v = pr.get("phi")) p.phi = parse_double(*v);
        if (auto v = pr.get("noise")) p.noise = parse_double(*v);
        if (auto v = pr.get("weekday_noise_scale")) p.weekday_noise_scale = parse_double(*v);
        if (auto v = pr.get("weekend_noise_scale")) p.weekend_noise_scale = parse_double(*v);
        if (auto v = pr.get("thresholds")) {
            auto t = parse_doubles(*v, "thresholds");
            if (t.size() != 3) throw SchemaError("thresholds must list exactly 3 values");
            p.thresholds = {t[0], t[1], t[2]};
        }
    }
    check_process(scene.process);

    for (const ConfigSection* seg_sec : cfg.sections_named("segment")) {
        SegmentGeometry geo;
        geo.segment.id = seg_sec->require("id");
        geo.segment.annotation_color = parse_hex_color(seg_sec->require("color"));
        geo.segment.from = seg_sec->require("from");
        geo.segment.to = seg_sec->require("to");
        auto rect = parse_doubles(seg_sec->require("rect"), "rect");
        if (rect.size() != 4) throw SchemaError("segment '" + geo.segment.id +
                                                "': rect must be x y w h");
        geo.x = int(rect[0]);
        geo.y = int(rect[1]);
        geo.w = int(rect[2]);
        geo.h = int(rect[3]);
        if (geo.w < 1 || geo.h < 1 || geo.x < 0 || geo.y < 0 ||
            geo.x + geo.w > scene.width || geo.y + geo.h > scene.height)
            throw SchemaError("segment '" + geo.segment.id +
                              "' rectangle leaves the canvas or is empty");
        geo.segment.pixel_count = std::int64_t(geo.w) * geo.h;
        scene.segments.push_back(std::move(geo));
    }
    if (scene.segments.empty())
        throw SchemaError("scene file '" + path + "' declares no segments");

    for (std::size_t i = 0; i < scene.segments.size(); ++i) {
        const SegmentGeometry& a = scene.segments[i];
        if (a.segment.from.empty() || a.segment.to.empty() || a.segment.from == a.segment.to)
            throw SchemaError("segment '" + a.segment.id + "' has bad endpoints");
        for (std::size_t j = i + 1; j < scene.segments.size(); ++j) {
            const SegmentGeometry& b = scene.segments[j];
            if (a.segment.id == b.segment.id)
                throw SchemaError("duplicate segment id '" + a.segment.id + "'");
            if (a.segment.annotation_color == b.segment.annotation_color)
                throw SchemaError("segments '" + a.segment.id + "' and '" + b.segment.id +
                                  "' share a color");
            const bool overlap = a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h &&
                                 b.y < a.y + a.h;
            if (overlap)
                throw SchemaError("segments '" + a.segment.id + "' and '" + b.segment.id +
                                  "' overlap in the mask");
        }
    }
    return scene;
}

void save_scene(const SyntheticScene& scene, const std::string& path) {
    std::string out;
    out += "[scene]\n";
    out += "width = " + std::to_string(scene.width) + "\n";
    out += "height = " + std::to_string(scene.height) + "\n";
    out += "seed = " + std::to_string(scene.seed) + "\n";
    out += "\n[palette]\n";
    for (int i = 0; i < 4; ++i)
        out += "level" + std::to_string(i + 1) + " = \"" +
               to_hex_color(scene.palette.level_colors[std::size_t(i)]) +
               "\"\n"; // quoted: '#' starts a comment
    out += "tolerance = " + fmt_double(scene.palette.tolerance) + "\n";

    const ProcessParams& p = scene.process;
    out += "\n[process]\n";
    switch (p.profile.shape) {
    case ProfileShape::Flat: out += "profile = flat\n"; break;
    case ProfileShape::Sin: out += "profile = sin\n"; break;
    case ProfileShape::Piecewise: out += "profile = piecewise\n"; break;
    }
    out += "profile_low = " + fmt_double(p.profile.low) + "\n";
    out += "profile_high = " + fmt_double(p.profile.high) + "\n";
    if (!p.profile.knots.empty()) {
        out += "knots =";
        for (const auto& [sod, v] : p.profile.knots)
            out += " " + sod_string(sod) + "=" + fmt_double(v);
        out += "\n";
    }
    out += "weekday_amp = " + fmt_double(p.weekday_amp) + "\n";
    out += "weekend_amp = " + fmt_double(p.weekend_amp) + "\n";
    out += "phi = " + fmt_double(p.phi) + "\n";
    out += "noise = " + fmt_double(p.noise) + "\n";
    out += "weekday_noise_scale = " + fmt_double(p.weekday_noise_scale) + "\n";
    out += "weekend_noise_scale = " + fmt_double(p.weekend_noise_scale) + "\n";
    out += "thresholds = " + fmt_double(p.thresholds[0]) + " " + fmt_double(p.thresholds[1]) +
           " " + fmt_double(p.thresholds[2]) + "\n";

    for (const SegmentGeometry& geo : scene.segments) {
        out += "\n[segment]\n";
        out += "id = " + geo.segment.id + "\n";
        out += "color = \"" + to_hex_color(geo.segment.annotation_color) + "\"\n";
        out += "from = " + geo.segment.from + "\n";
        out += "to = " + geo.segment.to + "\n";
        out += "rect = " + std::to_string(geo.x) + " " + std::to_string(geo.y) + " " +
               std::to_string(geo.w) + " " + std::to_string(geo.h) + "\n";
    }
    write_text_atomic(path, out);
}

} // namespace conglab
