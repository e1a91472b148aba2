#include "conglab/experiment.hpp"

#include "conglab/csv.hpp"
#include "conglab/errors.hpp"
#include "conglab/frame.hpp"
#include "conglab/ha.hpp"
#include "conglab/hash.hpp"
#include "conglab/workers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace conglab {

namespace {

using Clock = std::chrono::steady_clock;

std::string hex_fingerprint(std::uint64_t fp) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fp));
    return buf;
}

std::uint64_t parse_fingerprint(const std::string& text) {
    if (text.size() != 16) throw SchemaError("bad fingerprint '" + text + "'");
    std::uint64_t v = 0;
    for (char c : text) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else throw SchemaError("bad fingerprint '" + text + "'");
        v = (v << 4) | std::uint64_t(d);
    }
    return v;
}

std::vector<Seconds> sorted_unique(std::vector<Seconds> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

struct CellOutcome {
    EvaluationReport report;
    std::string error;
};

// One (combination, model) cell: fit per node on the train matrix, score on
// the test windows. Nodes without usable data at this combination are left
// out; timeouts and solver failures fail the whole cell.
CellOutcome run_model_cell(ModelKind model, const IntensityMatrix& train,
                           const std::vector<WindowedDataset>& train_plain,
                           const std::vector<WindowedDataset>& test_plain,
                           const std::vector<WindowedDataset>& train_nb,
                           const std::vector<WindowedDataset>& test_nb, int horizon,
                           const GridOptions& opts) {
    CellOutcome out;
    std::vector<std::pair<IntersectionId, NodeMetrics>> per_node;
    const std::vector<IntersectionId>& nodes = train.columns();

    try {
        for (std::size_t c = 0; c < nodes.size(); ++c) {
            const WindowedDataset& tests =
                model == ModelKind::SvrGraph ? test_nb[c] : test_plain[c];
            if (tests.rows() == 0) continue;

            std::vector<double> preds;
            preds.reserve(tests.rows());
            try {
                switch (model) {
                case ModelKind::Ha: {
                    auto obs = node_observations(train, nodes[c]);
                    if (obs.empty()) continue;
                    HaModel ha = ha_fit(obs);
                    for (Timestamp t : tests.target_times) preds.push_back(ha_predict(ha, t));
                    break;
                }
                case ModelKind::Svr:
                case ModelKind::SvrGraph: {
                    const WindowedDataset& trains =
                        model == ModelKind::SvrGraph ? graph_features(train_nb[c])
                                                     : train_plain[c];
                    SvrParams params = opts.svr;
                    params.fit_timeout = opts.fit_timeout;
                    SvrModel svr = svr_fit(trains, params);
                    for (std::size_t i = 0; i < tests.rows(); ++i)
                        preds.push_back(svr_predict(svr, tests.row(i)));
                    break;
                }
                case ModelKind::Arima: {
                    ArimaModel ar = arima_fit(node_runs(train, nodes[c]), opts.arima);
                    for (std::size_t i = 0; i < tests.rows(); ++i) {
                        std::span<const double> lags = tests.row(i).first(tests.lag_count);
                        preds.push_back(arima_forecast_from(ar, lags, horizon).back());
                    }
                    break;
                }
                }
            } catch (const DataError&) {
                continue; // this node lacks usable data at this combination
            }
            per_node.emplace_back(nodes[c], compute_metrics(
                                                std::span<const double>(tests.targets), preds));
        }
        if (per_node.empty()) {
            out.error = "no node produced test predictions";
            return out;
        }
        out.report = aggregate(std::move(per_node));
    } catch (const NumericError& e) {
        out.error = std::string("numeric failure: ") + e.what();
    } catch (const std::exception& e) {
        out.error = std::string("cell failed: ") + e.what();
    }
    return out;
}

} // namespace

GridSpec default_grid_spec() {
    GridSpec grid;
    grid.intervals = {Seconds{30}, Seconds{60}, Seconds{300}};
    grid.sequence_lengths = {Seconds{900}, Seconds{1800}, Seconds{2700}, Seconds{3600}};
    grid.prediction_lengths = {Seconds{300}, Seconds{900}, Seconds{1800}, Seconds{2700},
                               Seconds{3600}};
    grid.models = {ModelKind::Ha, ModelKind::Svr, ModelKind::SvrGraph, ModelKind::Arima};
    return grid;
}

void check_grid_spec(const GridSpec& grid) {
    if (grid.intervals.empty() || grid.sequence_lengths.empty() ||
        grid.prediction_lengths.empty())
        throw UsageError("grid needs at least one value on every axis");
    if (grid.models.empty()) throw UsageError("grid needs at least one model");
    for (Seconds s : grid.intervals)
        if (s.count() <= 0) throw UsageError("grid intervals must be positive");
    for (Seconds s : grid.sequence_lengths)
        if (s.count() <= 0) throw UsageError("grid sequence lengths must be positive");
    for (Seconds s : grid.prediction_lengths)
        if (s.count() <= 0) throw UsageError("grid prediction lengths must be positive");
}

std::string format_minutes(Seconds s) { return fmt_double(double(s.count()) / 60.0); }

Seconds parse_minutes(const std::string& text) {
    const double minutes = parse_double(text);
    const double seconds = minutes * 60.0;
    const long long whole = std::llround(seconds);
    if (whole <= 0 || std::abs(seconds - double(whole)) > 1e-9)
        throw SchemaError("'" + text + "' minutes is not a positive whole number of seconds");
    return Seconds{whole};
}

std::string RunResult::combo_key() const {
    return format_minutes(interval) + "/" + format_minutes(sequence_length) + "/" +
           format_minutes(prediction_length);
}

std::uint64_t config_fingerprint(Seconds interval, Seconds sequence_length,
                                 Seconds prediction_length, ModelKind model,
                                 const std::string& split_label, const GridOptions& opts) {
    std::string s = "v1";
    s += "|interval=" + std::to_string(interval.count());
    s += "|seq=" + std::to_string(sequence_length.count());
    s += "|pred=" + std::to_string(prediction_length.count());
    s += "|model=" + model_kind_name(model);
    s += "|split=" + split_label;
    s += "|agg=" + aggregation_name(opts.aggregation);
    s += std::string("|resample=") +
         (opts.resample_agg == ResampleAgg::Decimate ? "decimate" : "mean");
    s += "|svr.c=" + fmt_double(opts.svr.c);
    s += "|svr.epsilon=" + fmt_double(opts.svr.epsilon);
    s += "|svr.sigma=" + fmt_double(opts.svr.sigma);
    s += "|svr.kkt_tol=" + fmt_double(opts.svr.kkt_tol);
    s += "|svr.max_iter=" + std::to_string(opts.svr.max_iter);
    s += "|svr.row_cap=" + std::to_string(opts.svr.row_cap);
    s += "|arima=" + std::to_string(opts.arima.p) + "," + std::to_string(opts.arima.d) + "," +
         std::to_string(opts.arima.q);
    s += "|seed=" + std::to_string(opts.seed);
    return fnv1a64(s);
}

std::vector<RunResult> run_grid(const IntensityMatrix& m, const RoadNetwork& net,
                                const GridSpec& grid, const CalendarSplit& split,
                                const GridOptions& opts) {
    check_grid_spec(grid);
    if (split.train_days.empty() || split.test_days.empty())
        throw UsageError("split needs both train and test days");

    {
        const std::vector<Date> have = m.days();
        const std::set<Date> have_set(have.begin(), have.end());
        std::vector<Date> missing;
        for (Date d : split.train_days)
            if (!have_set.count(d)) missing.push_back(d);
        for (Date d : split.test_days)
            if (!have_set.count(d)) missing.push_back(d);
        if (!missing.empty()) {
            std::string msg = "matrix lacks split days:";
            for (Date d : missing) msg += " " + to_iso_date(d);
            throw DataError(msg);
        }
    }

    const std::vector<Seconds> intervals = sorted_unique(grid.intervals);
    const std::vector<Seconds> seqs = sorted_unique(grid.sequence_lengths);
    const std::vector<Seconds> preds = sorted_unique(grid.prediction_lengths);
    std::vector<ModelKind> models;
    for (ModelKind k : grid.models)
        if (std::find(models.begin(), models.end(), k) == models.end()) models.push_back(k);

    // Matrices resampled once per distinct interval, shared read-only by all
    // combination jobs.
    std::map<Seconds, IntensityMatrix> train_by_interval, test_by_interval;
    for (Seconds interval : intervals) {
        IntensityMatrix res = resample(m, interval, opts.resample_agg);
        train_by_interval.emplace(interval, filter_days(res, split.train_days));
        test_by_interval.emplace(interval, filter_days(res, split.test_days));
    }

    struct Combo {
        Seconds interval, seq, pred;
    };
    std::vector<Combo> combos;
    for (Seconds i : intervals)
        for (Seconds s : seqs)
            for (Seconds p : preds) combos.push_back({i, s, p});

    std::vector<RunResult> results(combos.size() * models.size());
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
        for (std::size_t mi = 0; mi < models.size(); ++mi) {
            RunResult& r = results[ci * models.size() + mi];
            r.interval = combos[ci].interval;
            r.sequence_length = combos[ci].seq;
            r.prediction_length = combos[ci].pred;
            r.model = models[mi];
            r.split_label = opts.split_label;
            r.fingerprint = config_fingerprint(r.interval, r.sequence_length,
                                               r.prediction_length, r.model, r.split_label, opts);
        }
    }

    const bool wants_nb = std::find(models.begin(), models.end(), ModelKind::SvrGraph) !=
                          models.end();

    parallel_for(combos.size(), opts.workers, [&](std::size_t ci) {
        const Combo& combo = combos[ci];
        RunResult* cell = &results[ci * models.size()];

        if (combo.seq.count() % combo.interval.count() != 0) {
            for (std::size_t mi = 0; mi < models.size(); ++mi)
                cell[mi].error = "skipped: sequence length " +
                                 std::to_string(combo.seq.count()) +
                                 " s is not a multiple of interval " +
                                 std::to_string(combo.interval.count()) + " s";
            return;
        }

        const IntensityMatrix& train = train_by_interval.at(combo.interval);
        const IntensityMatrix& test = test_by_interval.at(combo.interval);
        const SampleGrid sample{combo.interval, combo.seq, combo.pred};
        const std::vector<IntersectionId>& nodes = train.columns();

        std::vector<WindowedDataset> train_plain, test_plain, train_nb, test_nb;
        try {
            train_plain.reserve(nodes.size());
            test_plain.reserve(nodes.size());
            for (const IntersectionId& node : nodes) {
                train_plain.push_back(window(train, node, sample, false, net));
                test_plain.push_back(window(test, node, sample, false, net));
            }
            if (wants_nb) {
                train_nb.reserve(nodes.size());
                test_nb.reserve(nodes.size());
                for (const IntersectionId& node : nodes) {
                    train_nb.push_back(window(train, node, sample, true, net));
                    test_nb.push_back(window(test, node, sample, true, net));
                }
            }
        } catch (const std::exception& e) {
            for (std::size_t mi = 0; mi < models.size(); ++mi)
                cell[mi].error = std::string("windowing failed: ") + e.what();
            return;
        }

        const int horizon = int(combo.pred.count() / combo.interval.count());
        for (std::size_t mi = 0; mi < models.size(); ++mi) {
            RunResult& r = cell[mi];
            const Clock::time_point t0 = Clock::now();
            CellOutcome outcome = run_model_cell(r.model, train, train_plain, test_plain,
                                                 train_nb, test_nb, horizon, opts);
            r.report = std::move(outcome.report);
            r.error = std::move(outcome.error);
            r.duration = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0);
        }
    });

    return results;
}

std::vector<ComboRank> rank_combinations(const std::vector<RunResult>& results) {
    if (results.empty()) throw DataError("no results to rank");
    struct Accum {
        Seconds interval{}, seq{}, pred{};
        double rmse_sum = 0, mae_sum = 0;
        int count = 0;
    };
    std::map<std::tuple<long long, long long, long long>, Accum> by_combo;
    for (const RunResult& r : results) {
        if (!r.error.empty()) continue;
        Accum& a = by_combo[{r.interval.count(), r.sequence_length.count(),
                             r.prediction_length.count()}];
        a.interval = r.interval;
        a.seq = r.sequence_length;
        a.pred = r.prediction_length;
        a.rmse_sum += r.report.aggregate.rmse;
        a.mae_sum += r.report.aggregate.mae;
        ++a.count;
    }
    if (by_combo.empty()) throw DataError("every cell failed; nothing to rank");

    std::vector<ComboRank> ranks;
    ranks.reserve(by_combo.size());
    for (const auto& [key, a] : by_combo) {
        ComboRank rank;
        rank.interval = a.interval;
        rank.sequence_length = a.seq;
        rank.prediction_length = a.pred;
        rank.avg_rmse = a.rmse_sum / a.count;
        rank.avg_mae = a.mae_sum / a.count;
        rank.model_count = a.count;
        rank.key = format_minutes(a.interval) + "/" + format_minutes(a.seq) + "/" +
                   format_minutes(a.pred);
        ranks.push_back(std::move(rank));
    }
    std::sort(ranks.begin(), ranks.end(), [](const ComboRank& a, const ComboRank& b) {
        if (a.avg_rmse != b.avg_rmse) return a.avg_rmse < b.avg_rmse;
        if (a.avg_mae != b.avg_mae) return a.avg_mae < b.avg_mae;
        return a.key < b.key;
    });
    return ranks;
}

OutlierReport outlier_report(const RunResult& result,
                             const std::vector<IntersectionId>& exclude) {
    if (!result.error.empty())
        throw DataError("cannot build an outlier report from a failed cell: " + result.error);
    OutlierReport out;
    out.before = result.report.aggregate;

    std::vector<IntersectionId> wanted;
    for (const IntersectionId& node : exclude)
        if (std::find(wanted.begin(), wanted.end(), node) == wanted.end())
            wanted.push_back(node);

    std::vector<std::pair<IntersectionId, NodeMetrics>> kept = result.report.per_node;
    for (const IntersectionId& node : wanted) {
        auto it = std::find_if(kept.begin(), kept.end(),
                               [&](const auto& row) { return row.first == node; });
        if (it == kept.end()) {
            auto orig = std::find_if(result.report.per_node.begin(),
                                     result.report.per_node.end(),
                                     [&](const auto& row) { return row.first == node; });
            if (orig == result.report.per_node.end())
                throw DataError("unknown intersection '" + node + "' in exclusion list");
            throw DataError("intersection '" + node + "' listed twice in exclusion list");
        }
        out.excluded.push_back(*it);
        kept.erase(it);
    }

    if (wanted.empty()) {
        out.after = out.before;
    } else {
        if (kept.empty()) throw DataError("exclusion list removes every intersection");
        out.after = aggregate(std::move(kept)).aggregate;
    }
    return out;
}

std::vector<LabeledSplit> weekday_weekend_splits(const IntensityMatrix& m) {
    auto label = [](const char* train_tag, std::size_t n_train, const char* test_tag,
                    std::size_t n_test) {
        return std::string(train_tag) + std::to_string(n_train) + "-" + test_tag +
               std::to_string(n_test);
    };
    std::vector<LabeledSplit> splits;

    CalendarSplit s1 = split_days(m, SplitPolicy{SplitKind::WeekdaysOnly, 14, 0});
    splits.push_back({label("wd", s1.train_days.size(), "wd", s1.test_days.size()), s1});

    CalendarSplit s2 = split_days(m, SplitPolicy{SplitKind::WeekdaysTrainWeekendsTest, 0, 0});
    splits.push_back({label("wd", s2.train_days.size(), "we", s2.test_days.size()), s2});

    CalendarSplit s3 = split_days(m, SplitPolicy{SplitKind::WeekendsTrainWeekdaysTest, 7, 3});
    splits.push_back({label("we", s3.train_days.size(), "wd", s3.test_days.size()), s3});

    CalendarSplit s4 = split_days(m, SplitPolicy{SplitKind::WeekendsOnly, 7, 0});
    splits.push_back({label("we", s4.train_days.size(), "we", s4.test_days.size()), s4});
    return splits;
}

std::vector<RunResult> weekday_weekend_suite(const IntensityMatrix& m, const RoadNetwork& net,
                                             const SampleGrid& combo,
                                             const std::vector<ModelKind>& models,
                                             const GridOptions& opts) {
    GridSpec grid;
    grid.intervals = {combo.interval};
    grid.sequence_lengths = {combo.sequence_length};
    grid.prediction_lengths = {combo.prediction_length};
    grid.models = models;

    std::vector<RunResult> all;
    for (const LabeledSplit& split : weekday_weekend_splits(m)) {
        GridOptions cell_opts = opts;
        cell_opts.split_label = split.label;
        std::vector<RunResult> part = run_grid(m, net, grid, split.days, cell_opts);
        all.insert(all.end(), std::make_move_iterator(part.begin()),
                   std::make_move_iterator(part.end()));
    }
    return all;
}

void write_results_csv(const std::vector<RunResult>& results, const std::string& path,
                       bool with_timings) {
    CsvTable table;
    table.header = {"interval_min", "seq_min", "pred_min", "model", "split", "node",
                    "rmse",         "mae",     "corr",     "n",     "duration_ms", "fingerprint"};
    for (const RunResult& r : results) {
        const std::string interval = format_minutes(r.interval);
        const std::string seq = format_minutes(r.sequence_length);
        const std::string pred = format_minutes(r.prediction_length);
        const std::string model = model_kind_name(r.model);
        const std::string duration =
            with_timings ? std::to_string(r.duration.count()) : std::string();
        const std::string fp = hex_fingerprint(r.fingerprint);

        auto push = [&](const std::string& node, const NodeMetrics& metrics) {
            table.rows.push_back({interval, seq, pred, model, r.split_label, node,
                                  fmt_double(metrics.rmse), fmt_double(metrics.mae),
                                  metrics.corr ? fmt_double(*metrics.corr) : std::string(),
                                  std::to_string(metrics.n), duration, fp});
        };

        if (!r.error.empty()) {
            table.rows.push_back({interval, seq, pred, model, r.split_label, "AGGREGATE", "",
                                  "", "", "0", duration, fp});
            continue;
        }
        for (const auto& [node, metrics] : r.report.per_node) push(node, metrics);
        push("AGGREGATE", r.report.aggregate);
    }
    write_csv(path, table);
}

std::vector<RunResult> read_results_csv(const std::string& path) {
    const CsvTable table = read_csv(path);
    const std::size_t c_interval = table.column("interval_min");
    const std::size_t c_seq = table.column("seq_min");
    const std::size_t c_pred = table.column("pred_min");
    const std::size_t c_model = table.column("model");
    const std::size_t c_split = table.column("split");
    const std::size_t c_node = table.column("node");
    const std::size_t c_rmse = table.column("rmse");
    const std::size_t c_mae = table.column("mae");
    const std::size_t c_corr = table.column("corr");
    const std::size_t c_n = table.column("n");
    const std::size_t c_fp = table.column("fingerprint");

    std::vector<RunResult> results;
    RunResult cur;
    bool open = false;

    auto parse_metrics = [&](const std::vector<std::string>& row) {
        NodeMetrics metrics;
        metrics.rmse = parse_double(row[c_rmse]);
        metrics.mae = parse_double(row[c_mae]);
        if (!row[c_corr].empty()) metrics.corr = parse_double(row[c_corr]);
        const long long n = parse_int(row[c_n]);
        if (n < 0) throw SchemaError("negative n in results row");
        metrics.n = std::size_t(n);
        return metrics;
    };

    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const std::vector<std::string>& row = table.rows[i];
        RunResult head;
        head.interval = parse_minutes(row[c_interval]);
        head.sequence_length = parse_minutes(row[c_seq]);
        head.prediction_length = parse_minutes(row[c_pred]);
        head.model = parse_model_kind(row[c_model]);
        head.split_label = row[c_split];
        head.fingerprint = parse_fingerprint(row[c_fp]);

        if (!open) {
            cur = std::move(head);
            open = true;
        } else if (head.interval != cur.interval || head.sequence_length != cur.sequence_length ||
                   head.prediction_length != cur.prediction_length || head.model != cur.model ||
                   head.split_label != cur.split_label || head.fingerprint != cur.fingerprint) {
            throw SchemaError("results row " + std::to_string(i + 2) +
                              " switches configuration before an AGGREGATE row");
        }

        if (row[c_node] == "AGGREGATE") {
            if (row[c_rmse].empty()) {
                cur.error = "failed cell (metrics absent)";
            } else {
                cur.report.aggregate = parse_metrics(row);
            }
            results.push_back(std::move(cur));
            cur = RunResult{};
            open = false;
        } else {
            cur.report.per_node.emplace_back(row[c_node], parse_metrics(row));
        }
    }
    if (open) throw SchemaError("results file ends without an AGGREGATE row");
    return results;
}

void write_run_manifest(const std::string& path, const GridSpec& grid, const GridOptions& opts,
                        const CalendarSplit& split, const std::vector<ManifestInput>& inputs) {
    std::string out = "# run manifest\n";
    out += "\n[grid]\n";
    auto axis = [](const std::vector<Seconds>& values) {
        std::string s;
        for (Seconds v : values) {
            if (!s.empty()) s += " ";
            s += format_minutes(v);
        }
        return s;
    };
    out += "intervals_min = " + axis(grid.intervals) + "\n";
    out += "sequence_min = " + axis(grid.sequence_lengths) + "\n";
    out += "prediction_min = " + axis(grid.prediction_lengths) + "\n";
    std::string models;
    for (ModelKind k : grid.models) {
        if (!models.empty()) models += " ";
        models += model_kind_name(k);
    }
    out += "models = " + models + "\n";

    out += "\n[split]\n";
    out += "label = " + opts.split_label + "\n";
    auto days = [](const std::vector<Date>& d) {
        std::string s;
        for (Date day : d) {
            if (!s.empty()) s += " ";
            s += to_iso_date(day);
        }
        return s;
    };
    out += "train_days = " + days(split.train_days) + "\n";
    out += "test_days = " + days(split.test_days) + "\n";

    out += "\n[options]\n";
    out += "aggregation = " + aggregation_name(opts.aggregation) + "\n";
    out += std::string("resample = ") +
           (opts.resample_agg == ResampleAgg::Decimate ? "decimate" : "mean") + "\n";
    out += "svr.c = " + fmt_double(opts.svr.c) + "\n";
    out += "svr.epsilon = " + fmt_double(opts.svr.epsilon) + "\n";
    out += "svr.sigma = " + fmt_double(opts.svr.sigma) + "\n";
    out += "svr.kkt_tol = " + fmt_double(opts.svr.kkt_tol) + "\n";
    out += "svr.max_iter = " + std::to_string(opts.svr.max_iter) + "\n";
    out += "svr.row_cap = " + std::to_string(opts.svr.row_cap) + "\n";
    out += "arima.order = " + std::to_string(opts.arima.p) + "," + std::to_string(opts.arima.d) +
           "," + std::to_string(opts.arima.q) + "\n";
    out += "fit_timeout_ms = " + std::to_string(opts.fit_timeout.count()) + "\n";
    out += "top_k = " + std::to_string(opts.top_k) + "\n";
    out += "workers = " + std::to_string(opts.workers) + "\n";
    out += "seed = " + std::to_string(opts.seed) + "\n";

    out += "\n[inputs]\n";
    for (const ManifestInput& input : inputs)
        out += input.role + " = " + input.path + " fnv1a64=" + hex_fingerprint(input.content_hash) +
               "\n";
    write_text_atomic(path, out);
}

} // namespace conglab
