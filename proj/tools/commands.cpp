#include "commands.hpp"

#include "conglab/arima.hpp"
#include "conglab/csv.hpp"
#include "conglab/errors.hpp"
#include "conglab/evaluation.hpp"
#include "conglab/experiment.hpp"
#include "conglab/frame.hpp"
#include "conglab/ha.hpp"
#include "conglab/hash.hpp"
#include "conglab/image.hpp"
#include "conglab/model_io.hpp"
#include "conglab/palette.hpp"
#include "conglab/report.hpp"
#include "conglab/road_network.hpp"
#include "conglab/series.hpp"
#include "conglab/svr.hpp"
#include "conglab/synth.hpp"
#include "conglab/timeutil.hpp"
#include "conglab/workers.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <thread>

namespace fs = std::filesystem;

namespace conglab::tools {

namespace {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        h = fnv1a64(std::string_view(buf, std::size_t(in.gcount())), h);
    return h;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

Seconds minutes_flag(const std::string& text, const char* flag) {
    try {
        return parse_minutes(text);
    } catch (const SchemaError& e) {
        throw UsageError(std::string(flag) + ": " + e.what());
    }
}

std::vector<Seconds> minutes_list_flag(const std::string& text, const char* flag) {
    std::vector<Seconds> out;
    for (const std::string& item : split_list(text)) out.push_back(minutes_flag(item, flag));
    if (out.empty()) throw UsageError(std::string(flag) + ": empty list");
    return out;
}

std::vector<ModelKind> model_list_flag(const std::string& text) {
    std::vector<ModelKind> out;
    for (const std::string& item : split_list(text)) out.push_back(parse_model_kind(item));
    if (out.empty()) throw UsageError("--models: empty list");
    return out;
}

RoadNetwork load_net(const std::string& registry, const std::string& mask_path,
                     Image* mask_out = nullptr) {
    Image mask = load_png(mask_path);
    RoadNetwork net = load_network(registry, mask);
    if (mask_out) *mask_out = std::move(mask);
    return net;
}

// Shared model hyperparameter flags (train and grid).
struct ModelFlags {
    double svr_c = 1.0;
    double svr_epsilon = 0.1;
    double svr_sigma = 0.0;
    double svr_kkt_tol = 1e-3;
    long svr_max_iter = 1000000;
    std::size_t svr_row_cap = 5000;
    std::string arima_order = "1,0,0";
    long fit_timeout_s = 600;

    SvrParams svr_params() const {
        SvrParams p;
        p.c = svr_c;
        p.epsilon = svr_epsilon;
        p.sigma = svr_sigma;
        p.kkt_tol = svr_kkt_tol;
        p.max_iter = svr_max_iter;
        p.row_cap = svr_row_cap;
        p.fit_timeout = std::chrono::milliseconds(fit_timeout_s * 1000);
        return p;
    }
};

void add_model_flags(CLI::App* sub, const std::shared_ptr<ModelFlags>& flags) {
    sub->add_option("--svr-c", flags->svr_c, "SVR regularization constant");
    sub->add_option("--svr-epsilon", flags->svr_epsilon,
                    "SVR tube half-width on standardized targets");
    sub->add_option("--svr-sigma", flags->svr_sigma,
                    "RBF bandwidth; 0 = median pairwise distance");
    sub->add_option("--svr-kkt-tol", flags->svr_kkt_tol, "SVR dual optimality tolerance");
    sub->add_option("--svr-max-iter", flags->svr_max_iter, "SVR iteration cap");
    sub->add_option("--svr-row-cap", flags->svr_row_cap,
                    "training rows kept for SVR (uniform thinning above)");
    sub->add_option("--arima-order", flags->arima_order, "ARIMA order as p,d,q");
    sub->add_option("--fit-timeout", flags->fit_timeout_s,
                    "per-fit wall clock budget in seconds (0 = none)");
}

std::vector<fs::path> png_files(const std::string& dir) {
    if (!fs::is_directory(dir)) throw UsageError("'" + dir + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() == ".png") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

// ------------------------------------------------------------------- extract

struct ExtractOpts {
    std::string frames, mask, registry, out, palette;
    bool skip_bad = false;
    int workers = 0;
};

void run_extract(const ExtractOpts& o) {
    Image mask;
    const RoadNetwork net = load_net(o.registry, o.mask, &mask);
    const TrafficPalette palette = o.palette.empty() ? default_palette() : load_palette(o.palette);
    check_palette(palette);

    const std::vector<fs::path> files = png_files(o.frames);
    if (files.empty()) throw DataError("no .png frames under '" + o.frames + "'");

    struct Slot {
        FrameObservation obs;
        bool ok = false;
        std::exception_ptr error;
    };
    std::vector<Slot> slots(files.size());
    parallel_for(files.size(), resolve_workers(o.workers), [&](std::size_t i) {
        try {
            const Timestamp t = parse_frame_timestamp(files[i].stem().string());
            const Image frame = load_png(files[i].string());
            slots[i].obs = extract_frame(frame, mask, net, palette, t);
            slots[i].ok = true;
        } catch (...) {
            slots[i].error = std::current_exception();
        }
    });

    std::vector<FrameObservation> kept;
    kept.reserve(files.size());
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (slots[i].ok) {
            kept.push_back(std::move(slots[i].obs));
            continue;
        }
        if (!o.skip_bad) std::rethrow_exception(slots[i].error);
        ++skipped;
        try {
            std::rethrow_exception(slots[i].error);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "conglab: skipping %s: %s\n", files[i].filename().c_str(),
                         e.what());
        }
    }
    if (kept.empty()) throw DataError("every frame was rejected");

    write_extraction_csv(kept, net, o.out);
    std::printf("extracted %zu frames (%zu skipped) -> %s\n", kept.size(), skipped,
                o.out.c_str());
}

// ------------------------------------------------------------------ assemble

struct AssembleOpts {
    std::string extraction, registry, mask, out;
    std::string aggregation = "count";
    long fill_interval_s = 30;
    bool no_fill = false;
};

void run_assemble(const AssembleOpts& o) {
    const RoadNetwork net = load_net(o.registry, o.mask);
    const std::vector<FrameObservation> frames = read_extraction_csv(o.extraction, net);
    std::optional<Seconds> fill;
    if (!o.no_fill) {
        if (o.fill_interval_s <= 0) throw UsageError("--fill-interval must be positive");
        fill = Seconds{o.fill_interval_s};
    }
    const IntensityMatrix m =
        assemble_matrix(frames, net, parse_aggregation(o.aggregation), fill);
    write_matrix_csv(m, o.out);
    std::printf("assembled %zu instants x %zu intersections -> %s\n", m.rows(), m.cols(),
                o.out.c_str());
}

// ------------------------------------------------------------------ resample

struct ResampleOpts {
    std::string matrix, out;
    std::string interval;
    std::string agg = "decimate";
};

void run_resample(const ResampleOpts& o) {
    const IntensityMatrix m = read_matrix_csv(o.matrix);
    ResampleAgg agg;
    if (o.agg == "decimate")
        agg = ResampleAgg::Decimate;
    else if (o.agg == "mean")
        agg = ResampleAgg::Mean;
    else
        throw UsageError("--agg must be decimate or mean");
    const IntensityMatrix out = resample(m, minutes_flag(o.interval, "--interval"), agg);
    write_matrix_csv(out, o.out);
    std::printf("resampled to %zu instants -> %s\n", out.rows(), o.out.c_str());
}

// --------------------------------------------------------------------- train

struct TrainOpts {
    std::string matrix, registry, mask, out, node, model;
    std::string interval = "0.5", seq = "45", pred = "5";
    std::string split;
    std::string aggregation = "count";
    std::shared_ptr<ModelFlags> flags = std::make_shared<ModelFlags>();
};

void run_train(const TrainOpts& o) {
    const RoadNetwork net = load_net(o.registry, o.mask);
    IntensityMatrix m = read_matrix_csv(o.matrix);

    SavedModel saved;
    saved.kind = parse_model_kind(o.model);
    saved.node = o.node;
    saved.grid.interval = minutes_flag(o.interval, "--interval");
    saved.grid.sequence_length = minutes_flag(o.seq, "--seq");
    saved.grid.prediction_length = minutes_flag(o.pred, "--pred");
    saved.aggregation = parse_aggregation(o.aggregation);

    if (!o.split.empty()) {
        const CalendarSplit split = split_days(m, parse_split_policy(o.split));
        m = filter_days(m, split.train_days);
    }
    const IntensityMatrix train = resample(m, saved.grid.interval, ResampleAgg::Decimate);
    if (!train.rows()) throw DataError("training matrix is empty");

    switch (saved.kind) {
    case ModelKind::Ha:
        saved.ha = ha_fit(node_observations(train, saved.node));
        break;
    case ModelKind::Svr:
    case ModelKind::SvrGraph: {
        const WindowedDataset windows =
            window(train, saved.node, saved.grid, saved.kind == ModelKind::SvrGraph, net);
        saved.svr = svr_fit(saved.kind == ModelKind::SvrGraph ? graph_features(windows) : windows,
                            o.flags->svr_params());
        break;
    }
    case ModelKind::Arima:
        saved.arima = arima_fit(node_runs(train, saved.node),
                                parse_arima_order(o.flags->arima_order));
        break;
    }
    save_model(saved, o.out);
    std::printf("trained %s for node %s -> %s\n", model_kind_name(saved.kind).c_str(),
                saved.node.c_str(), o.out.c_str());
}

// ------------------------------------------------------------------- predict

struct PredictOpts {
    std::string model, matrix, registry, mask, out;
};

void run_predict(const PredictOpts& o) {
    const SavedModel saved = load_model(o.model);
    const RoadNetwork net = load_net(o.registry, o.mask);
    const IntensityMatrix m =
        resample(read_matrix_csv(o.matrix), saved.grid.interval, ResampleAgg::Decimate);

    const WindowedDataset windows =
        window(m, saved.node, saved.grid, saved.kind == ModelKind::SvrGraph, net);
    if (windows.rows() == 0) throw DataError("matrix yields no complete windows for this model");

    const int horizon =
        int(saved.grid.prediction_length.count() / saved.grid.interval.count());
    std::vector<PredictionRow> rows;
    rows.reserve(windows.rows());
    for (std::size_t i = 0; i < windows.rows(); ++i) {
        double pred = 0.0;
        switch (saved.kind) {
        case ModelKind::Ha:
            pred = ha_predict(saved.ha, windows.target_times[i]);
            break;
        case ModelKind::Svr:
        case ModelKind::SvrGraph:
            pred = svr_predict(saved.svr, windows.row(i));
            break;
        case ModelKind::Arima:
            pred = arima_forecast_from(saved.arima, windows.row(i).first(windows.lag_count),
                                       horizon)
                       .back();
            break;
        }
        rows.push_back({windows.target_times[i], saved.node, windows.targets[i], pred});
    }
    write_predictions_csv(rows, o.out);
    std::printf("%zu predictions -> %s\n", rows.size(), o.out.c_str());
}

// ------------------------------------------------------------------ evaluate

struct EvaluateOpts {
    std::string predictions, out;
};

void run_evaluate(const EvaluateOpts& o) {
    const std::vector<PredictionRow> rows = read_predictions_csv(o.predictions);
    if (rows.empty()) throw DataError("predictions file is empty");

    std::map<IntersectionId, std::pair<std::vector<double>, std::vector<double>>> by_node;
    for (const PredictionRow& row : rows) {
        by_node[row.node].first.push_back(row.truth);
        by_node[row.node].second.push_back(row.prediction);
    }
    std::vector<std::pair<IntersectionId, NodeMetrics>> per_node;
    for (const auto& [node, series] : by_node)
        per_node.emplace_back(node, compute_metrics(series.first, series.second));
    const EvaluationReport report = aggregate(std::move(per_node));
    write_report_csv(report, o.out);

    const NodeMetrics& a = report.aggregate;
    std::printf("aggregate rmse=%s mae=%s corr=%s n=%zu -> %s\n", fmt_double(a.rmse).c_str(),
                fmt_double(a.mae).c_str(), a.corr ? fmt_double(*a.corr).c_str() : "-", a.n,
                o.out.c_str());
}

// ---------------------------------------------------------------------- grid

struct GridCmdOpts {
    std::string matrix, registry, mask, out_dir;
    std::string split = "weekdays-only:14";
    std::string intervals = "0.5,1,5";
    std::string sequences = "15,30,45,60";
    std::string predictions = "5,15,30,45,60";
    std::string models = "ha,svr,svr_graph,arima";
    std::string aggregation = "count";
    std::string resample_agg = "decimate";
    bool suite = false;
    bool timings = false;
    int workers = 0;
    int top_k = 8;
    std::uint64_t seed = 0;
    std::shared_ptr<ModelFlags> flags = std::make_shared<ModelFlags>();
};

GridOptions grid_options(const GridCmdOpts& o) {
    GridOptions opts;
    opts.svr = o.flags->svr_params();
    opts.arima = parse_arima_order(o.flags->arima_order);
    opts.aggregation = parse_aggregation(o.aggregation);
    if (o.resample_agg == "decimate")
        opts.resample_agg = ResampleAgg::Decimate;
    else if (o.resample_agg == "mean")
        opts.resample_agg = ResampleAgg::Mean;
    else
        throw UsageError("--resample-agg must be decimate or mean");
    opts.workers = resolve_workers(o.workers);
    opts.fit_timeout = std::chrono::milliseconds(o.flags->fit_timeout_s * 1000);
    opts.top_k = o.top_k;
    opts.record_timings = o.timings;
    opts.seed = o.seed;
    return opts;
}

void run_grid_cmd(const GridCmdOpts& o) {
    const RoadNetwork net = load_net(o.registry, o.mask);
    const IntensityMatrix m = read_matrix_csv(o.matrix);

    GridSpec grid;
    grid.intervals = minutes_list_flag(o.intervals, "--intervals");
    grid.sequence_lengths = minutes_list_flag(o.sequences, "--sequences");
    grid.prediction_lengths = minutes_list_flag(o.predictions, "--predictions");
    grid.models = model_list_flag(o.models);

    GridOptions opts = grid_options(o);
    if (o.top_k < 1) throw UsageError("--top-k must be at least 1");

    std::vector<RunResult> results;
    CalendarSplit manifest_split;
    if (o.suite) {
        if (grid.intervals.size() != 1 || grid.sequence_lengths.size() != 1 ||
            grid.prediction_lengths.size() != 1)
            throw UsageError("--suite needs exactly one value per grid axis");
        const SampleGrid combo{grid.intervals[0], grid.sequence_lengths[0],
                               grid.prediction_lengths[0]};
        opts.split_label = "suite";
        results = weekday_weekend_suite(m, net, combo, grid.models, opts);
    } else {
        opts.split_label = o.split;
        manifest_split = split_days(m, parse_split_policy(o.split));
        results = run_grid(m, net, grid, manifest_split, opts);
    }

    std::size_t failed = 0;
    for (const RunResult& r : results) {
        if (r.error.empty()) continue;
        ++failed;
        std::fprintf(stderr, "conglab: cell %s %s [%s]: %s\n", r.combo_key().c_str(),
                     model_kind_name(r.model).c_str(), r.split_label.c_str(), r.error.c_str());
    }
    if (failed == results.size()) throw DataError("every grid cell failed: " + results[0].error);

    fs::create_directories(o.out_dir);
    const std::string results_path = (fs::path(o.out_dir) / "results.csv").string();
    const std::string topk_path = (fs::path(o.out_dir) / "topk.txt").string();
    const std::string manifest_path = (fs::path(o.out_dir) / "manifest.txt").string();

    write_results_csv(results, results_path, o.timings);
    write_text_atomic(topk_path, render_topk_table(rank_combinations(results), o.top_k));
    write_run_manifest(manifest_path, grid, opts, manifest_split,
                       {{"matrix", o.matrix, hash_file(o.matrix)},
                        {"registry", o.registry, hash_file(o.registry)},
                        {"mask", o.mask, hash_file(o.mask)}});

    std::printf("%zu cells (%zu failed) -> %s\n", results.size(), failed, results_path.c_str());
}

// --------------------------------------------------------------------- synth

struct SynthSceneOpts {
    std::string out, mask, registry;
    int intersections = 5;
    std::uint64_t seed = 1;
};

void run_synth_scene(const SynthSceneOpts& o) {
    const SyntheticScene scene = make_demo_scene(o.intersections, o.seed);
    save_scene(scene, o.out);
    if (!o.mask.empty()) save_png(o.mask, scene_mask(scene));
    if (!o.registry.empty()) save_registry(scene_network(scene), o.registry);
    std::printf("scene with %zu segments -> %s\n", scene.segments.size(), o.out.c_str());
}

struct SynthFramesOpts {
    std::string scene, start, out_dir, truth, mask, registry;
    int days = 1;
    long interval_s = 30;
    int workers = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void run_synth_frames(const SynthFramesOpts& o) {
    const SyntheticScene scene = load_scene(o.scene);
    if (o.interval_s <= 0) throw UsageError("--interval must be positive seconds");
    const std::uint64_t seed = o.seed_set ? o.seed : scene.seed;
    const SimulatedDays sim = simulate_process(scene, parse_iso_date(o.start), o.days,
                                               Seconds{o.interval_s}, seed);
    render_frames(scene, sim, o.out_dir, resolve_workers(o.workers));
    if (!o.truth.empty()) write_matrix_csv(sim.truth, o.truth);
    if (!o.mask.empty()) save_png(o.mask, scene_mask(scene));
    if (!o.registry.empty()) save_registry(scene_network(scene), o.registry);
    std::printf("%zu frames -> %s\n", sim.instants.size(), o.out_dir.c_str());
}

struct SynthSeriesOpts {
    std::string out, nodes, start;
    int days = 30;
    long interval_s = 30;
    std::string profile = "sin";
    double low = 50.0, high = 400.0;
    double weekday_amp = 1.0, weekend_amp = 1.0;
    double phi = 0.6;
    double weekday_noise = 30.0, weekend_noise = 30.0;
    std::uint64_t seed = 1;
};

void run_synth_series(const SynthSeriesOpts& o) {
    RegimeMatrixSpec spec;
    for (const std::string& node : split_list(o.nodes)) spec.nodes.push_back(node);
    if (spec.nodes.empty()) throw UsageError("--nodes: empty list");
    spec.start = parse_iso_date(o.start);
    spec.days = o.days;
    if (o.interval_s <= 0) throw UsageError("--interval must be positive seconds");
    spec.interval = Seconds{o.interval_s};
    if (o.profile == "flat")
        spec.profile.shape = ProfileShape::Flat;
    else if (o.profile == "sin")
        spec.profile.shape = ProfileShape::Sin;
    else
        throw UsageError("--profile must be flat or sin");
    spec.profile.low = o.low;
    spec.profile.high = o.high;
    spec.weekday_amp = o.weekday_amp;
    spec.weekend_amp = o.weekend_amp;
    spec.phi = o.phi;
    spec.weekday_noise = o.weekday_noise;
    spec.weekend_noise = o.weekend_noise;
    spec.seed = o.seed;

    const IntensityMatrix m = simulate_regime_matrix(spec);
    write_matrix_csv(m, o.out);
    std::printf("%zu instants x %zu nodes -> %s\n", m.rows(), m.cols(), o.out.c_str());
}

// -------------------------------------------------------------------- report

struct ReportOpts {
    std::string results, out_dir;
    std::string predictions, plot_dir;
    std::string exclude, model, combo, split;
    int top_k = 8;
};

void run_report(const ReportOpts& o) {
    const std::vector<RunResult> results = read_results_csv(o.results);
    if (results.empty()) {
        std::printf("no results\n");
        return;
    }
    if (!o.out_dir.empty()) fs::create_directories(o.out_dir);

    const std::string table = render_grid_table(results);
    std::fputs(table.c_str(), stdout);
    if (!o.out_dir.empty())
        write_text_atomic((fs::path(o.out_dir) / "tables.txt").string(), table);

    std::string topk;
    try {
        topk = render_topk_table(rank_combinations(results), o.top_k);
    } catch (const DataError&) {
        topk = "no results\n"; // every cell failed
    }
    std::fputs(topk.c_str(), stdout);
    if (!o.out_dir.empty()) write_text_atomic((fs::path(o.out_dir) / "topk.txt").string(), topk);

    if (!o.exclude.empty()) {
        if (o.model.empty() || o.combo.empty())
            throw UsageError("--exclude needs --model and --combo to pick the cell");
        const ModelKind kind = parse_model_kind(o.model);
        const RunResult* chosen = nullptr;
        for (const RunResult& r : results) {
            if (r.model != kind || r.combo_key() != o.combo) continue;
            if (!o.split.empty() && r.split_label != o.split) continue;
            if (chosen)
                throw UsageError("several cells match --model/--combo; add --split to pick one");
            chosen = &r;
        }
        if (!chosen) throw DataError("no cell matches --model/--combo/--split");
        std::vector<IntersectionId> exclude;
        for (const std::string& node : split_list(o.exclude)) exclude.push_back(node);
        const std::string table2 = render_outlier_table(outlier_report(*chosen, exclude));
        std::fputs(table2.c_str(), stdout);
        if (!o.out_dir.empty())
            write_text_atomic((fs::path(o.out_dir) / "outliers.txt").string(), table2);
    }

    if (!o.predictions.empty()) {
        const std::string plot_dir = o.plot_dir.empty() ? o.out_dir : o.plot_dir;
        if (plot_dir.empty()) throw UsageError("--predictions needs --plot-dir or --out-dir");
        fs::create_directories(plot_dir);
        std::map<IntersectionId, std::vector<PredictionRow>> by_node;
        for (PredictionRow& row : read_predictions_csv(o.predictions))
            by_node[row.node].push_back(std::move(row));
        for (auto& [node, rows] : by_node) {
            std::sort(rows.begin(), rows.end(),
                      [](const PredictionRow& a, const PredictionRow& b) {
                          return a.time < b.time;
                      });
            std::vector<Timestamp> times;
            std::vector<double> truth, pred;
            for (const PredictionRow& row : rows) {
                times.push_back(row.time);
                truth.push_back(row.truth);
                pred.push_back(row.prediction);
            }
            write_series_svg((fs::path(plot_dir) / (node + ".svg")).string(),
                             "truth vs prediction: " + node, times, truth, pred);
        }
        std::printf("%zu plots -> %s\n", by_node.size(), plot_dir.c_str());
    }
}

} // namespace

void register_commands(CLI::App& app) {
    // extract
    {
        auto o = std::make_shared<ExtractOpts>();
        CLI::App* sub =
            app.add_subcommand("extract", "classify frame pixels into per-segment level counts");
        sub->add_option("--frames", o->frames, "directory of YYYYMMDD_HHMMSS.png frames")
            ->required();
        sub->add_option("--mask", o->mask, "annotation mask PNG")->required();
        sub->add_option("--registry", o->registry, "segment registry CSV")->required();
        sub->add_option("--out", o->out, "extraction CSV to write")->required();
        sub->add_option("--palette", o->palette, "palette config (default: built-in colors)");
        sub->add_flag("--skip-bad", o->skip_bad, "log and skip rejected frames");
        sub->add_option("--workers", o->workers, "worker threads (default: logical CPUs)")
            ->envname("CONGESTION_LAB_WORKERS");
        sub->callback([o]() { run_extract(*o); });
    }
    // assemble
    {
        auto o = std::make_shared<AssembleOpts>();
        CLI::App* sub = app.add_subcommand(
            "assemble", "build the per-intersection intensity matrix from an extraction CSV");
        sub->add_option("--extraction", o->extraction, "extraction CSV")->required();
        sub->add_option("--registry", o->registry, "segment registry CSV")->required();
        sub->add_option("--mask", o->mask, "annotation mask PNG")->required();
        sub->add_option("--out", o->out, "matrix CSV to write")->required();
        sub->add_option("--aggregation", o->aggregation, "count or value_sum");
        sub->add_option("--fill-interval", o->fill_interval_s,
                        "grid cadence in seconds for gap marking (default 30)");
        sub->add_flag("--no-fill", o->no_fill, "keep only observed instants, no gap rows");
        sub->callback([o]() { run_assemble(*o); });
    }
    // resample
    {
        auto o = std::make_shared<ResampleOpts>();
        CLI::App* sub =
            app.add_subcommand("resample", "change the sampling interval of a matrix CSV");
        sub->add_option("--matrix", o->matrix, "matrix CSV")->required();
        sub->add_option("--out", o->out, "matrix CSV to write")->required();
        sub->add_option("--interval", o->interval, "target interval in minutes")->required();
        sub->add_option("--agg", o->agg, "decimate or mean");
        sub->callback([o]() { run_resample(*o); });
    }
    // train
    {
        auto o = std::make_shared<TrainOpts>();
        CLI::App* sub = app.add_subcommand("train", "fit one forecaster for one intersection");
        sub->add_option("--matrix", o->matrix, "matrix CSV")->required();
        sub->add_option("--registry", o->registry, "segment registry CSV")->required();
        sub->add_option("--mask", o->mask, "annotation mask PNG")->required();
        sub->add_option("--node", o->node, "intersection id")->required();
        sub->add_option("--model", o->model, "ha, svr, svr_graph, or arima")->required();
        sub->add_option("--out", o->out, "model file to write")->required();
        sub->add_option("--interval", o->interval, "sampling interval in minutes");
        sub->add_option("--seq", o->seq, "sequence length in minutes");
        sub->add_option("--pred", o->pred, "prediction length in minutes");
        sub->add_option("--split", o->split,
                        "optional split policy; training uses its train days only");
        sub->add_option("--aggregation", o->aggregation, "count or value_sum (recorded)");
        add_model_flags(sub, o->flags);
        sub->callback([o]() { run_train(*o); });
    }
    // predict
    {
        auto o = std::make_shared<PredictOpts>();
        CLI::App* sub =
            app.add_subcommand("predict", "run a saved model over a matrix and emit predictions");
        sub->add_option("--model", o->model, "model file from train")->required();
        sub->add_option("--matrix", o->matrix, "matrix CSV")->required();
        sub->add_option("--registry", o->registry, "segment registry CSV")->required();
        sub->add_option("--mask", o->mask, "annotation mask PNG")->required();
        sub->add_option("--out", o->out, "predictions CSV to write")->required();
        sub->callback([o]() { run_predict(*o); });
    }
    // evaluate
    {
        auto o = std::make_shared<EvaluateOpts>();
        CLI::App* sub =
            app.add_subcommand("evaluate", "score a predictions CSV into a per-node report");
        sub->add_option("--predictions", o->predictions, "predictions CSV")->required();
        sub->add_option("--out", o->out, "report CSV to write")->required();
        sub->callback([o]() { run_evaluate(*o); });
    }
    // grid
    {
        auto o = std::make_shared<GridCmdOpts>();
        CLI::App* sub = app.add_subcommand(
            "grid", "benchmark every interval x sequence x horizon x model combination");
        sub->add_option("--matrix", o->matrix, "matrix CSV")->required();
        sub->add_option("--registry", o->registry, "segment registry CSV")->required();
        sub->add_option("--mask", o->mask, "annotation mask PNG")->required();
        sub->add_option("--out-dir", o->out_dir, "directory for results.csv, topk.txt, manifest")
            ->required();
        sub->add_option("--split", o->split, "split policy (default weekdays-only:14)");
        sub->add_option("--intervals", o->intervals, "comma list of minutes");
        sub->add_option("--sequences", o->sequences, "comma list of minutes");
        sub->add_option("--predictions", o->predictions, "comma list of minutes");
        sub->add_option("--models", o->models, "comma list of ha,svr,svr_graph,arima");
        sub->add_option("--aggregation", o->aggregation, "count or value_sum");
        sub->add_option("--resample-agg", o->resample_agg, "decimate or mean");
        sub->add_flag("--suite", o->suite,
                      "run the four weekday/weekend splits at a single combination");
        sub->add_flag("--timings", o->timings,
                      "record wall-clock per cell (breaks byte-identical reruns)");
        sub->add_option("--workers", o->workers, "worker threads (default: logical CPUs)")
            ->envname("CONGESTION_LAB_WORKERS");
        sub->add_option("--top-k", o->top_k, "ranked combinations to keep");
        sub->add_option("--seed", o->seed, "seed recorded in fingerprints and manifest");
        add_model_flags(sub, o->flags);
        sub->callback([o]() { run_grid_cmd(*o); });
    }
    // synth
    {
        CLI::App* synth =
            app.add_subcommand("synth", "generate synthetic scenes, frames, and matrices");
        synth->require_subcommand(1);
        {
            auto o = std::make_shared<SynthSceneOpts>();
            CLI::App* sub = synth->add_subcommand("scene", "write a demo ring-road scene");
            sub->add_option("--out", o->out, "scene config to write")->required();
            sub->add_option("--intersections", o->intersections, "ring size (>= 3)");
            sub->add_option("--seed", o->seed, "process seed stored in the scene");
            sub->add_option("--mask", o->mask, "also write the annotation mask PNG");
            sub->add_option("--registry", o->registry, "also write the segment registry CSV");
            sub->callback([o]() { run_synth_scene(*o); });
        }
        {
            auto o = std::make_shared<SynthFramesOpts>();
            CLI::App* sub =
                synth->add_subcommand("frames", "simulate a scene and render PNG frames");
            sub->add_option("--scene", o->scene, "scene config")->required();
            sub->add_option("--start", o->start, "first day, YYYY-MM-DD")->required();
            sub->add_option("--out-dir", o->out_dir, "frame directory")->required();
            sub->add_option("--days", o->days, "days to simulate");
            sub->add_option("--interval", o->interval_s, "frame cadence in seconds");
            sub->add_option("--truth", o->truth, "also write the ground-truth matrix CSV");
            sub->add_option("--mask", o->mask, "also write the annotation mask PNG");
            sub->add_option("--registry", o->registry, "also write the segment registry CSV");
            CLI::Option* seed =
                sub->add_option("--seed", o->seed, "override the scene's stored seed");
            sub->add_option("--workers", o->workers, "worker threads (default: logical CPUs)")
                ->envname("CONGESTION_LAB_WORKERS");
            sub->callback([o, seed]() {
                o->seed_set = seed->count() > 0;
                run_synth_frames(*o);
            });
        }
        {
            auto o = std::make_shared<SynthSeriesOpts>();
            CLI::App* sub = synth->add_subcommand(
                "series", "write a regime-controlled synthetic matrix without rendering");
            sub->add_option("--out", o->out, "matrix CSV to write")->required();
            sub->add_option("--nodes", o->nodes, "comma list of intersection ids")->required();
            sub->add_option("--start", o->start, "first day, YYYY-MM-DD")->required();
            sub->add_option("--days", o->days, "days to simulate");
            sub->add_option("--interval", o->interval_s, "cadence in seconds");
            sub->add_option("--profile", o->profile, "flat or sin");
            sub->add_option("--low", o->low, "profile low value");
            sub->add_option("--high", o->high, "profile high value");
            sub->add_option("--weekday-amp", o->weekday_amp, "weekday amplitude factor");
            sub->add_option("--weekend-amp", o->weekend_amp, "weekend amplitude factor");
            sub->add_option("--phi", o->phi, "AR(1) coefficient, |phi| < 1");
            sub->add_option("--weekday-noise", o->weekday_noise, "weekday innovation sd");
            sub->add_option("--weekend-noise", o->weekend_noise, "weekend innovation sd");
            sub->add_option("--seed", o->seed, "realization seed");
            sub->callback([o]() { run_synth_series(*o); });
        }
    }
    // report
    {
        auto o = std::make_shared<ReportOpts>();
        CLI::App* sub =
            app.add_subcommand("report", "render tables and plots from a results CSV");
        sub->add_option("--results", o->results, "results CSV from grid")->required();
        sub->add_option("--out-dir", o->out_dir, "directory for tables.txt and topk.txt");
        sub->add_option("--top-k", o->top_k, "ranked combinations to show");
        sub->add_option("--predictions", o->predictions,
                        "predictions CSV to plot as per-node SVGs");
        sub->add_option("--plot-dir", o->plot_dir, "directory for the SVG plots");
        sub->add_option("--exclude", o->exclude, "comma list of nodes for an outlier table");
        sub->add_option("--model", o->model, "model of the cell to analyze");
        sub->add_option("--combo", o->combo, "combination key interval/seq/pred in minutes");
        sub->add_option("--split", o->split, "split label of the cell to analyze");
        sub->callback([o]() { run_report(*o); });
    }
}

} // namespace conglab::tools
