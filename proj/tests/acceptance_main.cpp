// Acceptance gate: one pass/fail line per criterion, exit 1 if any fail.
// Criteria 1 and 8 drive the real binary, whose path arrives as argv[1].

#include "conglab/arima.hpp"
#include "conglab/errors.hpp"
#include "conglab/evaluation.hpp"
#include "conglab/experiment.hpp"
#include "conglab/frame.hpp"
#include "conglab/ha.hpp"
#include "conglab/hash.hpp"
#include "conglab/image.hpp"
#include "conglab/model_io.hpp"
#include "conglab/road_network.hpp"
#include "conglab/series.hpp"
#include "conglab/svr.hpp"
#include "conglab/synth.hpp"
#include "conglab/timeutil.hpp"
#include "support/svr_oracle.hpp"
#include "support/tempdir.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>
#include <sys/wait.h>

using namespace conglab;
using conglab::testing::TempDir;
using conglab::testing::read_text_file;

namespace {

// Pinned tolerances.
constexpr double kSvrOracleTol = 1e-3;   // prediction gap vs reference solver
constexpr double kKktSumTol = 1e-8;      // |sum beta|
constexpr double kKktBoundSlack = 1e-12; // |beta| <= C + slack
constexpr double kKktTubeBetaTol = 1e-6; // in-tube rows carry no weight
constexpr double kArPhiTol = 0.05;       // AR coefficient recovery
constexpr double kArMeanTol = 2.0;       // 2% of the simulated mean of 100
constexpr double kForecastIdentityTol = 1e-9;
constexpr double kMetricTol = 1e-9;

std::string g_cli;
int g_failures = 0;

int run_cli(const TempDir& tmp, const std::string& args) {
    static int counter = 0;
    const std::string log = tmp.file("cli_log_" + std::to_string(counter++));
    const int raw = std::system((g_cli + " " + args + " >" + log + " 2>&1").c_str());
    const int code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    if (code != 0)
        std::fprintf(stderr, "command failed (%d): %s\n%s", code, args.c_str(),
                     read_text_file(log).c_str());
    return code;
}

void criterion(int idx, const char* name, const std::function<bool(std::string&)>& body) {
    bool ok = false;
    std::string detail;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        ok = false;
        detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s%s%s%s\n", ok ? "PASS" : "FAIL", idx, name,
                detail.empty() ? "" : " (", detail.c_str(), detail.empty() ? "" : ")");
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Six mornings (06:00-08:59:30 at 30 s) for three nodes: small enough that
// the full default grid runs in seconds, rich enough that every cell fits.
IntensityMatrix morning_matrix(std::uint64_t seed) {
    const std::vector<IntersectionId> nodes{"a", "b", "c"};
    std::vector<Timestamp> times;
    std::vector<std::int64_t> values;
    Rng rng(seed);
    const Date start = parse_iso_date("2019-11-01");
    for (int d = 0; d < 6; ++d) {
        const Date day{std::chrono::sys_days{start} + std::chrono::days{d}};
        for (int k = 0; k < 360; ++k) {
            times.push_back(at_time_of_day(day, 21600 + 30 * k));
            for (std::size_t c = 0; c < nodes.size(); ++c) {
                const double v = 80.0 + 40.0 * std::sin(2.0 * 3.14159265358979 * k / 360.0) +
                                 10.0 * rng.next_gauss();
                values.push_back(std::llround(std::max(0.0, v)));
            }
        }
    }
    return IntensityMatrix(std::move(times), nodes, std::move(values));
}

RoadNetwork triangle_net() {
    return RoadNetwork::from_parts(
        {RoadSegment{"ab", Rgb{1, 0, 0}, "a", "b", 1}, RoadSegment{"ba", Rgb{2, 0, 0}, "b", "a", 1},
         RoadSegment{"bc", Rgb{3, 0, 0}, "b", "c", 1}, RoadSegment{"cb", Rgb{4, 0, 0}, "c", "b", 1},
         RoadSegment{"ca", Rgb{5, 0, 0}, "c", "a", 1}, RoadSegment{"ac", Rgb{6, 0, 0}, "a", "c", 1}},
        {"a", "b", "c"});
}

WindowedDataset dataset_1d(const std::vector<double>& xs, const std::vector<double>& ys) {
    WindowedDataset ds;
    ds.target_node = "n";
    ds.lag_count = 1;
    ds.features = xs;
    ds.targets = ys;
    ds.target_times.resize(ys.size());
    return ds;
}

// ---------------------------------------------------------------- criteria

bool c1_extraction_oracle(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    TempDir tmp;
    auto scene = make_demo_scene(5, 2); // 10 segments, 5 intersections
    auto sim = simulate_process(scene, parse_iso_date("2019-11-04"), 1, Seconds{30}, 77);
    if (sim.instants.size() != 2160) {
        detail = "expected 2160 instants";
        return false;
    }
    const std::string frames = tmp.file("frames");
    render_frames(scene, sim, frames, 8);

    const std::string mask = tmp.file("mask.png");
    const std::string reg = tmp.file("registry.csv");
    save_png(mask, scene_mask(scene));
    save_registry(scene_network(scene), reg);

    const std::string extraction = tmp.file("extraction.csv");
    const std::string matrix = tmp.file("matrix.csv");
    if (run_cli(tmp, "extract --frames " + frames + " --mask " + mask + " --registry " + reg +
                         " --out " + extraction + " --workers 8") != 0)
        return false;
    if (run_cli(tmp, "assemble --extraction " + extraction + " --registry " + reg + " --mask " +
                         mask + " --out " + matrix + " --fill-interval 30") != 0)
        return false;

    const IntensityMatrix got = read_matrix_csv(matrix);
    if (got.rows() != sim.truth.rows() || got.cols() != sim.truth.cols()) {
        detail = "matrix shape mismatch";
        return false;
    }
    if (got.timestamps() != sim.truth.timestamps() || got.columns() != sim.truth.columns()) {
        detail = "matrix axes mismatch";
        return false;
    }
    for (std::size_t r = 0; r < got.rows(); ++r)
        for (std::size_t c = 0; c < got.cols(); ++c)
            if (got.at(r, c) != sim.truth.at(r, c)) {
                detail = "cell mismatch at row " + std::to_string(r);
                return false;
            }
    const double elapsed = seconds_since(start);
    detail = "2160 frames, zero tolerance, " + std::to_string(int(elapsed)) + " s";
    return elapsed <= 300.0;
}

bool c2_calendar(std::string& detail) {
    RegimeMatrixSpec spec;
    spec.nodes = {"a"};
    spec.start = parse_iso_date("2019-11-01");
    spec.days = 30;
    spec.interval = Seconds{21600};
    spec.seed = 1;
    const IntensityMatrix m = simulate_regime_matrix(spec);

    const CalendarSplit all = split_days(m, SplitPolicy{SplitKind::WeekdaysTrainWeekendsTest, 0, 0});
    if (all.train_days.size() != 20 || all.test_days.size() != 10) {
        detail = "weekday/weekend counts " + std::to_string(all.train_days.size()) + "/" +
                 std::to_string(all.test_days.size());
        return false;
    }
    const auto splits = weekday_weekend_splits(m);
    const std::vector<std::pair<std::size_t, std::size_t>> want{{14, 6}, {20, 10}, {7, 3}, {7, 3}};
    if (splits.size() != want.size()) return false;
    for (std::size_t i = 0; i < want.size(); ++i)
        if (splits[i].days.train_days.size() != want[i].first ||
            splits[i].days.test_days.size() != want[i].second) {
            detail = "split " + splits[i].label + " sized " +
                     std::to_string(splits[i].days.train_days.size()) + "/" +
                     std::to_string(splits[i].days.test_days.size());
            return false;
        }
    detail = "20/10 days; splits 14/6, 20/10, 7/3, 7/3";
    return true;
}

bool c3_grid_shape(std::string& detail) {
    const GridSpec grid = default_grid_spec();
    const std::size_t combos =
        grid.intervals.size() * grid.sequence_lengths.size() * grid.prediction_lengths.size();
    if (grid.intervals.size() != 3 || grid.sequence_lengths.size() != 4 ||
        grid.prediction_lengths.size() != 5 || combos != 60 || grid.models.size() != 4) {
        detail = "axes sized " + std::to_string(grid.intervals.size()) + "x" +
                 std::to_string(grid.sequence_lengths.size()) + "x" +
                 std::to_string(grid.prediction_lengths.size());
        return false;
    }

    const IntensityMatrix m = morning_matrix(12);
    const CalendarSplit split = split_days(m, SplitPolicy{SplitKind::FirstKTrain, 4, 0});
    GridOptions opts;
    opts.workers = 8;
    const auto results = run_grid(m, triangle_net(), grid, split, opts);
    std::size_t failed = 0;
    for (const auto& r : results)
        if (!r.error.empty()) ++failed;
    if (results.size() != 240 || failed != 0) {
        detail = std::to_string(results.size()) + " cells, " + std::to_string(failed) + " failed";
        return false;
    }

    TempDir tmp;
    const std::string path = tmp.file("results.csv");
    write_results_csv(results, path);
    const std::string text = read_text_file(path);
    std::size_t rows = 0;
    for (std::size_t pos = text.find(",AGGREGATE,"); pos != std::string::npos;
         pos = text.find(",AGGREGATE,", pos + 1))
        ++rows;
    detail = "60 combinations, " + std::to_string(rows) + " aggregate rows";
    return rows == 240;
}

bool c4_svr_oracle(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(2024);
    double worst_gap = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 10;
        std::vector<double> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = -2.0 + 4.0 * rng.next_unit();
            ys[i] = std::sin(2.0 * xs[i]) + 0.1 * rng.next_gauss();
        }
        SvrParams params;
        params.kkt_tol = 1e-6;
        SvrFitInfo info;
        const SvrModel model = svr_fit(dataset_1d(xs, ys), params, &info);

        // KKT on the fit itself.
        double sum = 0.0;
        for (double b : info.beta) {
            sum += b;
            if (std::abs(b) > params.c + kKktBoundSlack) {
                detail = "beta outside box on rep " + std::to_string(rep);
                return false;
            }
        }
        if (std::abs(sum) > kKktSumTol) {
            detail = "sum beta = " + std::to_string(sum);
            return false;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double resid = std::abs(info.std_fitted[i] - info.std_targets[i]);
            if (resid < params.epsilon - params.kkt_tol &&
                std::abs(info.beta[i]) > kKktTubeBetaTol) {
                detail = "in-tube row carries weight on rep " + std::to_string(rep);
                return false;
            }
        }

        // Reference solver on the same standardized problem.
        Eigen::MatrixXd k(n, n);
        std::vector<double> std_x(n), std_y(n);
        for (std::size_t i = 0; i < n; ++i) {
            std_x[i] = (xs[i] - model.feat_mean[0]) / model.feat_scale[0];
            std_y[i] = (ys[i] - model.target_mean) / model.target_scale;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double d = std_x[i] - std_x[j];
                k(long(i), long(j)) = std::exp(-d * d / (2.0 * model.sigma * model.sigma));
            }
        const auto oracle = conglab::testing::oracle_svr(k, std_y, params.c, params.epsilon);
        for (std::size_t i = 0; i < n; ++i) {
            double f = oracle.bias;
            for (std::size_t j = 0; j < n; ++j) f += oracle.beta[j] * k(long(i), long(j));
            const double oracle_pred = model.target_mean + model.target_scale * f;
            const double pred = svr_predict(model, std::vector<double>{xs[i]});
            worst_gap = std::max(worst_gap, std::abs(pred - oracle_pred));
        }
        if (worst_gap > kSvrOracleTol) {
            detail = "prediction gap " + std::to_string(worst_gap) + " on rep " +
                     std::to_string(rep);
            return false;
        }
    }
    const double elapsed = seconds_since(start);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "20 problems, worst gap %.2e, %.1f s", worst_gap, elapsed);
    detail = buf;
    return elapsed <= 60.0;
}

bool c5_arima_recovery(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const double mu = 100.0;
    for (double phi : {0.3, 0.5, 0.8}) {
        Rng rng(fnv1a64("accept-ar1", std::uint64_t(phi * 1000)));
        std::vector<double> y(10000);
        double prev = mu;
        for (auto& v : y) {
            prev = mu + phi * (prev - mu) + 5.0 * rng.next_gauss();
            v = prev;
        }
        const ArimaModel model = arima_fit(y, ArimaOrder{1, 0, 0});
        if (model.degenerate || model.stationary_warning) {
            detail = "fit flagged at phi " + std::to_string(phi);
            return false;
        }
        if (std::abs(model.ar[0] - phi) > kArPhiTol) {
            detail = "phi " + std::to_string(phi) + " estimated " + std::to_string(model.ar[0]);
            return false;
        }
        if (std::abs(model.mean() - mu) > kArMeanTol) {
            detail = "mean estimated " + std::to_string(model.mean());
            return false;
        }

        // h-step forecast equals mean + phi^h * (last - mean), h <= 60.
        const double mean_hat = model.mean();
        const double phi_hat = model.ar[0];
        const double last = model.tail_values.back();
        const std::vector<double> f = arima_forecast(model, 60);
        for (int h = 1; h <= 60; ++h) {
            const double closed = mean_hat + std::pow(phi_hat, h) * (last - mean_hat);
            if (std::abs(f[std::size_t(h - 1)] - closed) > kForecastIdentityTol) {
                detail = "forecast identity off at h=" + std::to_string(h);
                return false;
            }
        }
    }
    const double elapsed = seconds_since(start);
    detail = "phi 0.3/0.5/0.8 within 0.05, identity to 1e-9, " +
             std::to_string(int(elapsed)) + " s";
    return elapsed <= 30.0;
}

bool c6_metric_oracles(std::string& detail) {
    const std::vector<double> t1{0.0, 0.0}, p1{3.0, 4.0};
    if (std::abs(rmse(t1, p1) - std::sqrt(12.5)) > kMetricTol) {
        detail = "rmse fixture";
        return false;
    }
    if (std::abs(mae(t1, p1) - 3.5) > kMetricTol) {
        detail = "mae fixture";
        return false;
    }
    const std::vector<double> t2{1.0, 2.0, 3.0}, p2{2.0, 4.0, 7.0};
    const auto c = corr(t2, p2);
    if (!c || std::abs(*c - 15.0 / std::sqrt(228.0)) > kMetricTol) {
        detail = "corr fixture";
        return false;
    }

    Rng rng(555);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = 2 + std::size_t(rng.next_unit() * 30.0);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = 50.0 * rng.next_gauss();
            b[i] = 50.0 * rng.next_gauss();
        }
        if (mae(a, b) > rmse(a, b) + 1e-12) {
            detail = "mae exceeded rmse on rep " + std::to_string(rep);
            return false;
        }
    }
    detail = "fixtures to 1e-9; mae <= rmse on 1000 pairs";
    return true;
}

bool c7_regime_finding(std::string& detail) {
    const auto start = std::chrono::steady_clock::now();
    const RoadNetwork net = triangle_net();
    for (std::uint64_t seed = 101; seed <= 105; ++seed) {
        RegimeMatrixSpec spec;
        spec.nodes = {"a", "b"};
        spec.start = parse_iso_date("2019-11-01");
        spec.days = 30;
        spec.interval = Seconds{300};
        spec.profile.shape = ProfileShape::Sin;
        spec.profile.low = 200.0;
        spec.profile.high = 600.0;
        spec.weekday_amp = 1.0;
        spec.weekend_amp = 0.6;   // weekends follow their own calmer profile
        spec.phi = 0.5;
        spec.weekday_noise = 90.0; // weekdays carry 3x the innovation noise
        spec.weekend_noise = 30.0;
        spec.seed = seed;
        const IntensityMatrix m = simulate_regime_matrix(spec);

        const auto results = weekday_weekend_suite(
            m, net, SampleGrid{Seconds{300}, Seconds{1800}, Seconds{900}}, {ModelKind::Ha},
            GridOptions{});
        if (results.size() != 4) {
            detail = "suite produced " + std::to_string(results.size()) + " cells";
            return false;
        }
        for (const auto& r : results)
            if (!r.error.empty()) {
                detail = "cell failed: " + r.error;
                return false;
            }
        const double we_we = results[3].report.aggregate.rmse;
        for (int q = 0; q < 3; ++q)
            if (!(we_we < results[std::size_t(q)].report.aggregate.rmse)) {
                detail = "seed " + std::to_string(seed) + ": " + results[std::size_t(q)].split_label +
                         " beat we7-we3";
                return false;
            }
    }
    const double elapsed = seconds_since(start);
    detail = "we7-we3 strictly lowest across 5 seeds, " + std::to_string(int(elapsed)) + " s";
    return elapsed <= 600.0;
}

bool c8_determinism(std::string& detail) {
    TempDir tmp;
    const std::string scene = tmp.file("scene.conf");
    const std::string mask = tmp.file("mask.png");
    const std::string reg = tmp.file("registry.csv");
    const std::string matrix = tmp.file("matrix.csv");
    if (run_cli(tmp, "synth scene --out " + scene + " --intersections 4 --seed 3 --mask " + mask +
                         " --registry " + reg) != 0)
        return false;
    if (run_cli(tmp, "synth series --out " + matrix +
                         " --nodes n00,n01,n02,n03 --start 2019-11-01 --days 6 --interval 300" +
                         " --profile sin --low 50 --high 250 --phi 0.5 --weekday-noise 20" +
                         " --weekend-noise 20 --seed 15") != 0)
        return false;

    const std::string args = "grid --matrix " + matrix + " --registry " + reg + " --mask " + mask +
                             " --split first-k-train:4 --intervals 5 --sequences 15,30" +
                             " --predictions 5,15 --models ha,svr,svr_graph,arima";
    const std::string d1 = tmp.file("run1");
    const std::string d2 = tmp.file("run2");
    const std::string d3 = tmp.file("run3");
    if (run_cli(tmp, args + " --out-dir " + d1 + " --workers 8") != 0) return false;
    if (run_cli(tmp, args + " --out-dir " + d2 + " --workers 8") != 0) return false;
    if (run_cli(tmp, args + " --out-dir " + d3 + " --workers 1") != 0) return false;

    const std::string r1 = read_text_file(d1 + "/results.csv");
    if (r1.empty()) {
        detail = "empty results";
        return false;
    }
    if (r1 != read_text_file(d2 + "/results.csv")) {
        detail = "reruns with 8 workers differ";
        return false;
    }
    if (r1 != read_text_file(d3 + "/results.csv")) {
        detail = "worker count changed the bytes";
        return false;
    }
    if (read_text_file(d1 + "/topk.txt") != read_text_file(d3 + "/topk.txt")) {
        detail = "rankings differ";
        return false;
    }
    detail = "byte-identical across reruns and workers 1 vs 8";
    return true;
}

bool c9_outlier_arithmetic(std::string& detail) {
    RunResult cell;
    cell.report = aggregate({{"a", NodeMetrics{10.0, 10.0, 0.9, 100}},
                             {"b", NodeMetrics{20.0, 20.0, 0.8, 100}},
                             {"c", NodeMetrics{90.0, 90.0, 0.1, 100}}});
    const OutlierReport rep = outlier_report(cell, {"c"});
    if (rep.before.rmse != 40.0 || rep.before.mae != 40.0) {
        detail = "before aggregate " + std::to_string(rep.before.rmse);
        return false;
    }
    if (rep.after.rmse != 15.0 || rep.after.mae != 15.0) {
        detail = "after aggregate " + std::to_string(rep.after.rmse);
        return false;
    }
    if (rep.excluded.size() != 1 || rep.excluded[0].first != "c") {
        detail = "excluded set wrong";
        return false;
    }
    detail = "{10,20,90}: 40 -> 15 exactly";
    return true;
}

bool c10_round_trips(std::string& detail) {
    TempDir tmp;

    // Registry round trip.
    const auto scene = make_demo_scene(6, 4);
    const RoadNetwork net = scene_network(scene);
    const std::string reg = tmp.file("registry.csv");
    save_registry(net, reg);
    const RoadNetwork back = load_network(reg, scene_mask(scene));
    if (back.segments().size() != net.segments().size() ||
        back.intersections() != net.intersections()) {
        detail = "network shape changed";
        return false;
    }
    for (std::size_t i = 0; i < net.segments().size(); ++i) {
        const RoadSegment& s0 = net.segments()[i];
        const RoadSegment& s1 = back.segments()[i];
        if (s0.id != s1.id || !(s0.annotation_color == s1.annotation_color) ||
            s0.from != s1.from || s0.to != s1.to || s0.pixel_count != s1.pixel_count) {
            detail = "segment " + s0.id + " changed";
            return false;
        }
    }

    // Matrix CSV round trip with missing markers.
    {
        const Date day = parse_iso_date("2019-11-04");
        std::vector<Timestamp> times;
        for (int k = 0; k < 6; ++k) times.push_back(at_time_of_day(day, 21600 + 30 * k));
        std::vector<std::int64_t> values{5,  IntensityMatrix::kMissing,
                                         7,  8,
                                         0,  12,
                                         13, IntensityMatrix::kMissing,
                                         1,  2,
                                         3,  4};
        const IntensityMatrix m(times, {"a", "b"}, values);
        const std::string path = tmp.file("matrix.csv");
        write_matrix_csv(m, path);
        const IntensityMatrix m2 = read_matrix_csv(path);
        if (m2.timestamps() != m.timestamps() || m2.columns() != m.columns()) {
            detail = "matrix axes changed";
            return false;
        }
        for (std::size_t r = 0; r < m.rows(); ++r)
            for (std::size_t c = 0; c < m.cols(); ++c)
                if (m2.at(r, c) != m.at(r, c)) {
                    detail = "matrix cell changed";
                    return false;
                }
    }

    // Saved models predict bit-identically after reload.
    Rng rng(88);
    {
        std::vector<std::pair<Timestamp, double>> obs;
        const Date d0 = parse_iso_date("2019-11-04");
        for (int day = 0; day < 3; ++day)
            for (int k = 0; k < 40; ++k)
                obs.emplace_back(at_time_of_day(Date{std::chrono::sys_days{d0} +
                                                     std::chrono::days{day}},
                                                21600 + 30 * k),
                                 50.0 + 10.0 * rng.next_gauss());
        SavedModel saved;
        saved.kind = ModelKind::Ha;
        saved.node = "a";
        saved.grid = {Seconds{30}, Seconds{60}, Seconds{30}};
        saved.ha = ha_fit(obs);
        const std::string path = tmp.file("ha.model");
        save_model(saved, path);
        const SavedModel loaded = load_model(path);
        for (int k = 0; k < 45; ++k) {
            const Timestamp t = at_time_of_day(parse_iso_date("2019-11-07"), 21600 + 30 * k);
            if (ha_predict(loaded.ha, t) != ha_predict(saved.ha, t)) {
                detail = "ha predictions drifted";
                return false;
            }
        }
    }
    {
        std::vector<double> xs(24), ys(24);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            xs[i] = rng.next_gauss();
            ys[i] = std::sin(xs[i]) + 0.1 * rng.next_gauss();
        }
        SavedModel saved;
        saved.kind = ModelKind::Svr;
        saved.node = "a";
        saved.grid = {Seconds{30}, Seconds{30}, Seconds{30}};
        saved.svr = svr_fit(dataset_1d(xs, ys), SvrParams{});
        const std::string path = tmp.file("svr.model");
        save_model(saved, path);
        const SavedModel loaded = load_model(path);
        for (double x : xs)
            if (svr_predict(loaded.svr, std::vector<double>{x}) !=
                svr_predict(saved.svr, std::vector<double>{x})) {
                detail = "svr predictions drifted";
                return false;
            }
    }
    {
        std::vector<double> y(300);
        double prev = 20.0;
        for (auto& v : y) {
            prev = 20.0 + 0.6 * (prev - 20.0) + 2.0 * rng.next_gauss();
            v = prev;
        }
        SavedModel saved;
        saved.kind = ModelKind::Arima;
        saved.node = "a";
        saved.grid = {Seconds{30}, Seconds{150}, Seconds{60}};
        saved.arima = arima_fit(y, ArimaOrder{1, 0, 0});
        const std::string path = tmp.file("arima.model");
        save_model(saved, path);
        const SavedModel loaded = load_model(path);
        const auto f0 = arima_forecast(saved.arima, 10);
        const auto f1 = arima_forecast(loaded.arima, 10);
        if (f0 != f1) {
            detail = "arima forecasts drifted";
            return false;
        }
        const std::vector<double> window(y.end() - 5, y.end());
        if (arima_forecast_from(saved.arima, window, 4) !=
            arima_forecast_from(loaded.arima, window, 4)) {
            detail = "arima conditional forecasts drifted";
            return false;
        }
    }
    detail = "registry, matrix, and all model kinds";
    return true;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <conglab binary>\n");
        return 1;
    }
    g_cli = argv[1];

    criterion(1, "end-to-end extraction oracle", c1_extraction_oracle);
    criterion(2, "calendar splits for the study month", c2_calendar);
    criterion(3, "benchmark grid shape", c3_grid_shape);
    criterion(4, "svr against the reference solver", c4_svr_oracle);
    criterion(5, "arima parameter recovery and forecast identity", c5_arima_recovery);
    criterion(6, "metric oracles and mae<=rmse", c6_metric_oracles);
    criterion(7, "weekend regime wins its quadrant", c7_regime_finding);
    criterion(8, "grid determinism across reruns and workers", c8_determinism);
    criterion(9, "outlier exclusion arithmetic", c9_outlier_arithmetic);
    criterion(10, "registry, matrix, and model round trips", c10_round_trips);

    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 10 criteria passed\n");
    return 0;
}
