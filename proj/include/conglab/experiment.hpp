#pragma once

#include "conglab/arima.hpp"
#include "conglab/evaluation.hpp"
#include "conglab/model_io.hpp"
#include "conglab/road_network.hpp"
#include "conglab/series.hpp"
#include "conglab/svr.hpp"

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

namespace conglab {

// Benchmark grid over sampling interval x sequence length x horizon.
struct GridSpec {
    std::vector<Seconds> intervals;
    std::vector<Seconds> sequence_lengths;
    std::vector<Seconds> prediction_lengths;
    std::vector<ModelKind> models;
};

// 0.5/1/5 min intervals, 15..60 min sequences, 5..60 min horizons, all four
// models: 60 combinations.
GridSpec default_grid_spec();

void check_grid_spec(const GridSpec& grid);

struct GridOptions {
    SvrParams svr;
    ArimaOrder arima;
    Aggregation aggregation = Aggregation::Count;
    ResampleAgg resample_agg = ResampleAgg::Decimate;
    std::string split_label = "split";
    int workers = 1;
    std::chrono::milliseconds fit_timeout{600000}; // per model fit
    int top_k = 8;
    bool record_timings = false; // timings stay out of the CSV unless asked
    std::uint64_t seed = 0;
};

// One (combination, model) cell. A non-empty `error` marks a skipped or
// failed cell; its report is empty and it still occupies its output row.
struct RunResult {
    Seconds interval{};
    Seconds sequence_length{};
    Seconds prediction_length{};
    ModelKind model = ModelKind::Ha;
    std::string split_label;
    EvaluationReport report;
    std::chrono::milliseconds duration{};
    std::uint64_t fingerprint = 0;
    std::string error;

    std::string combo_key() const; // "interval/seq/pred" in minutes
};

// Fits and evaluates every combination x model on the calendar split. All
// models of a combination score the same (node, instant) test targets.
// Cells run on a bounded worker pool; output order is by combination key
// then model order, independent of scheduling. Throws DataError listing the
// dates when the matrix does not cover every split day.
std::vector<RunResult> run_grid(const IntensityMatrix& m, const RoadNetwork& net,
                                const GridSpec& grid, const CalendarSplit& split,
                                const GridOptions& opts = {});

struct ComboRank {
    Seconds interval{};
    Seconds sequence_length{};
    Seconds prediction_length{};
    double avg_rmse = 0.0;
    double avg_mae = 0.0;
    int model_count = 0;
    std::string key; // "interval/seq/pred" in minutes, the deterministic tie-break
};

// Average aggregate RMSE/MAE across the models that ran, ascending by
// (avg rmse, avg mae, key). Combinations where every model failed are left
// out. Throws DataError on empty input.
std::vector<ComboRank> rank_combinations(const std::vector<RunResult>& results);

struct OutlierReport {
    NodeMetrics before;
    NodeMetrics after;
    std::vector<std::pair<IntersectionId, NodeMetrics>> excluded;
};

// Aggregate with and without the named nodes. Unknown node -> DataError;
// excluding everything -> DataError from the empty re-aggregate.
OutlierReport outlier_report(const RunResult& result,
                             const std::vector<IntersectionId>& exclude);

// The four calendar quadrants: first-14 weekdays vs rest, all weekdays vs
// all weekend days, first-7 weekend days vs last-3 weekdays, first-7 weekend
// days vs remaining weekend days. Labels carry the realized sizes.
struct LabeledSplit {
    std::string label;
    CalendarSplit days;
};
std::vector<LabeledSplit> weekday_weekend_splits(const IntensityMatrix& m);

std::vector<RunResult> weekday_weekend_suite(const IntensityMatrix& m, const RoadNetwork& net,
                                             const SampleGrid& combo,
                                             const std::vector<ModelKind>& models,
                                             const GridOptions& opts = {});

// interval_min,seq_min,pred_min,model,split,node,rmse,mae,corr,n,duration_ms,fingerprint
// Per-node rows then one AGGREGATE row per result; failed cells emit a lone
// AGGREGATE row with empty metrics and n = 0. duration_ms stays empty unless
// with_timings (timings would break byte-identical reruns).
void write_results_csv(const std::vector<RunResult>& results, const std::string& path,
                       bool with_timings = false);
std::vector<RunResult> read_results_csv(const std::string& path);

// Canonical-config hash; identical configs hash identically.
std::uint64_t config_fingerprint(Seconds interval, Seconds sequence_length,
                                 Seconds prediction_length, ModelKind model,
                                 const std::string& split_label, const GridOptions& opts);

struct ManifestInput {
    std::string role; // "matrix", "registry", ...
    std::string path;
    std::uint64_t content_hash = 0;
};

void write_run_manifest(const std::string& path, const GridSpec& grid, const GridOptions& opts,
                        const CalendarSplit& split, const std::vector<ManifestInput>& inputs);

std::string format_minutes(Seconds s);
Seconds parse_minutes(const std::string& text);

} // namespace conglab
