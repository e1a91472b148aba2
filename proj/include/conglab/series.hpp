#pragma once

#include "conglab/frame.hpp"
#include "conglab/road_network.hpp"
#include "conglab/timeutil.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace conglab {

// Per-intersection intensity time series. Rows are instants (strictly
// increasing, inside the daily 06:00-23:59:59 window), columns are sorted
// intersection ids. kMissing marks gaps left by dropped frames.
class IntensityMatrix {
public:
    static constexpr std::int64_t kMissing = -1;

    IntensityMatrix() = default;
    IntensityMatrix(std::vector<Timestamp> timestamps, std::vector<IntersectionId> columns,
                    std::vector<std::int64_t> values);

    std::size_t rows() const { return timestamps_.size(); }
    std::size_t cols() const { return columns_.size(); }
    const std::vector<Timestamp>& timestamps() const { return timestamps_; }
    const std::vector<IntersectionId>& columns() const { return columns_; }

    std::int64_t at(std::size_t row, std::size_t col) const {
        return values_[row * columns_.size() + col];
    }
    bool is_missing(std::size_t row, std::size_t col) const { return at(row, col) == kMissing; }
    // Column index for a node id; DataError when absent.
    std::size_t column_index(const IntersectionId& node) const;
    // Sorted unique dates with at least one row.
    std::vector<Date> days() const;

private:
    std::vector<Timestamp> timestamps_;
    std::vector<IntersectionId> columns_;
    std::vector<std::int64_t> values_; // row-major
};

// One row per frame timestamp, one column per intersection (sorted ids),
// cell = intersection_intensity. With fill_interval set, each day present in
// the input instead expands to the full daily grid at that cadence and
// absent instants become missing markers; frame timestamps must then sit on
// the grid.
IntensityMatrix assemble_matrix(const std::vector<FrameObservation>& frames,
                                const RoadNetwork& net, Aggregation agg = Aggregation::Count,
                                std::optional<Seconds> fill_interval = std::nullopt);

// Decimation: keeps rows whose offset from 06:00:00 is a multiple of the
// interval. Mean: averages present values over [slot, slot+interval) per
// day, rounded half away from zero to keep intensities integral.
enum class ResampleAgg { Decimate, Mean };
IntensityMatrix resample(const IntensityMatrix& m, Seconds interval,
                         ResampleAgg agg = ResampleAgg::Decimate);

// Rows whose date is in `days` (order preserved).
IntensityMatrix filter_days(const IntensityMatrix& m, const std::vector<Date>& days);

// Present (instant, value) pairs of one column, row order.
std::vector<std::pair<Timestamp, double>> node_observations(const IntensityMatrix& m,
                                                            const IntersectionId& node);

// Maximal gap-free stretches of one column; a run breaks at a missing value
// or a day boundary.
std::vector<std::vector<double>> node_runs(const IntensityMatrix& m, const IntersectionId& node);

struct SampleGrid {
    Seconds interval{};
    Seconds sequence_length{};
    Seconds prediction_length{};
};

// Supervised windows for one node. Feature rows hold the L = sequence/interval
// lag values oldest-first, optionally followed by one neighbor-sum column
// (intensities of neighbors(node) at the feature-end instant). Windows with
// any missing value, or whose target leaves the day, are dropped.
struct WindowedDataset {
    IntersectionId target_node;
    std::size_t lag_count = 0;
    bool has_neighbor_sum = false;
    std::vector<double> features; // row-major
    std::vector<double> targets;
    std::vector<Timestamp> target_times;

    std::size_t width() const { return lag_count + (has_neighbor_sum ? 1 : 0); }
    std::size_t rows() const { return targets.size(); }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * width(), width()};
    }
};

WindowedDataset window(const IntensityMatrix& m, const IntersectionId& node,
                       const SampleGrid& grid, bool with_neighbor_sum, const RoadNetwork& net);

enum class SplitKind {
    FirstKTrain,
    WeekdaysOnly,             // first k_train weekdays train, remaining weekdays test
    WeekdaysTrainWeekendsTest,
    WeekendsTrainWeekdaysTest, // first k_train weekend days train (0 = all), last k_test weekdays test (0 = all)
    WeekendsOnly,             // first k_train weekend days train, remaining weekend days test
};

struct SplitPolicy {
    SplitKind kind = SplitKind::FirstKTrain;
    int k_train = 0;
    int k_test = 0;
};

struct CalendarSplit {
    std::vector<Date> train_days;
    std::vector<Date> test_days;
};

// Weekend means Friday or Saturday. Throws DataError when the matrix has too
// few days of the required kind, stating the counts.
CalendarSplit split_days(const IntensityMatrix& m, const SplitPolicy& policy);

SplitPolicy parse_split_policy(const std::string& text);

// Matrix CSV: header `timestamp,<node ids...>`, ISO-8601 timestamps, empty
// field = missing. Round trip is lossless.
void write_matrix_csv(const IntensityMatrix& m, const std::string& path);
IntensityMatrix read_matrix_csv(const std::string& path);

// Split file: `[train]` / `[test]` sections of ISO dates, one per line.
void write_split_file(const CalendarSplit& split, const std::string& path);
CalendarSplit read_split_file(const std::string& path);

} // namespace conglab
