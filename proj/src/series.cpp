#include "conglab/series.hpp"

#include "conglab/csv.hpp"
#include "conglab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace conglab {

IntensityMatrix::IntensityMatrix(std::vector<Timestamp> timestamps,
                                 std::vector<IntersectionId> columns,
                                 std::vector<std::int64_t> values)
    : timestamps_(std::move(timestamps)), columns_(std::move(columns)),
      values_(std::move(values)) {
    if (values_.size() != timestamps_.size() * columns_.size())
        throw DataError("matrix value count does not match rows x columns");
    for (std::size_t i = 1; i < columns_.size(); ++i)
        if (!(columns_[i - 1] < columns_[i]))
            throw DataError("matrix columns must be sorted unique intersection ids");
    for (std::size_t i = 0; i < timestamps_.size(); ++i) {
        if (i > 0 && !(timestamps_[i - 1] < timestamps_[i]))
            throw DataError("matrix timestamps must be strictly increasing at row " +
                            std::to_string(i + 1));
        if (!in_day_window(timestamps_[i]))
            throw DataError("timestamp " + to_iso_timestamp(timestamps_[i]) +
                            " lies outside the 06:00:00-23:59:59 window");
    }
    for (std::int64_t v : values_)
        if (v < 0 && v != kMissing)
            throw DataError("matrix values must be non-negative or the missing marker");
}

std::size_t IntensityMatrix::column_index(const IntersectionId& node) const {
    auto it = std::lower_bound(columns_.begin(), columns_.end(), node);
    if (it == columns_.end() || *it != node)
        throw DataError("intersection '" + node + "' is not a matrix column");
    return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<Date> IntensityMatrix::days() const {
    std::vector<Date> out;
    for (Timestamp t : timestamps_) {
        Date d = date_of(t);
        if (out.empty() || out.back() != d) out.push_back(d);
    }
    return out;
}

IntensityMatrix assemble_matrix(const std::vector<FrameObservation>& frames,
                                const RoadNetwork& net, Aggregation agg,
                                std::optional<Seconds> fill_interval) {
    std::vector<const FrameObservation*> ordered;
    ordered.reserve(frames.size());
    for (const FrameObservation& f : frames) ordered.push_back(&f);
    std::sort(ordered.begin(), ordered.end(),
              [](const FrameObservation* a, const FrameObservation* b) {
                  return a->timestamp < b->timestamp;
              });
    for (std::size_t i = 1; i < ordered.size(); ++i)
        if (ordered[i]->timestamp == ordered[i - 1]->timestamp)
            throw DataError("duplicate frame timestamp " + to_frame_stem(ordered[i]->timestamp));
    for (const FrameObservation* f : ordered)
        if (!in_day_window(f->timestamp))
            throw DataError("frame " + to_frame_stem(f->timestamp) +
                            " lies outside the daily capture window");

    const std::vector<IntersectionId>& columns = net.intersections();
    auto intensities_of = [&](const FrameObservation& f) {
        std::vector<std::int64_t> row(columns.size());
        for (std::size_t c = 0; c < columns.size(); ++c)
            row[c] = intersection_intensity(f, net, columns[c], agg);
        return row;
    };

    std::vector<Timestamp> times;
    std::vector<std::int64_t> values;

    if (!fill_interval) {
        for (const FrameObservation* f : ordered) {
            times.push_back(f->timestamp);
            auto row = intensities_of(*f);
            values.insert(values.end(), row.begin(), row.end());
        }
        return IntensityMatrix(std::move(times), columns, std::move(values));
    }

    const long long step = fill_interval->count();
    if (step <= 0) throw UsageError("fill interval must be positive");
    std::unordered_map<long long, const FrameObservation*> by_instant;
    std::vector<Date> days;
    for (const FrameObservation* f : ordered) {
        if ((seconds_of_day(f->timestamp) - kDayWindowStart) % step != 0)
            throw DataError("frame " + to_frame_stem(f->timestamp) +
                            " is off the fill grid of " + std::to_string(step) + " s");
        by_instant.emplace(f->timestamp.time_since_epoch().count(), f);
        Date d = date_of(f->timestamp);
        if (days.empty() || days.back() != d) days.push_back(d);
    }
    for (Date d : days) {
        for (int s = kDayWindowStart; s <= kDayWindowEnd; s += static_cast<int>(step)) {
            Timestamp t = at_time_of_day(d, s);
            times.push_back(t);
            auto it = by_instant.find(t.time_since_epoch().count());
            if (it == by_instant.end()) {
                values.insert(values.end(), columns.size(), IntensityMatrix::kMissing);
            } else {
                auto row = intensities_of(*it->second);
                values.insert(values.end(), row.begin(), row.end());
            }
        }
    }
    return IntensityMatrix(std::move(times), columns, std::move(values));
}

IntensityMatrix resample(const IntensityMatrix& m, Seconds interval, ResampleAgg agg) {
    const long long step = interval.count();
    if (step <= 0 || step % kBaseCadence.count() != 0)
        throw UsageError("resample interval must be a positive multiple of " +
                         std::to_string(kBaseCadence.count()) + " s, got " +
                         std::to_string(step) + " s");

    std::vector<Timestamp> times;
    std::vector<std::int64_t> values;

    if (agg == ResampleAgg::Decimate) {
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if ((seconds_of_day(m.timestamps()[r]) - kDayWindowStart) % step != 0) continue;
            times.push_back(m.timestamps()[r]);
            for (std::size_t c = 0; c < m.cols(); ++c) values.push_back(m.at(r, c));
        }
        return IntensityMatrix(std::move(times), m.columns(), std::move(values));
    }

    // Mean aggregation: average the present values in [slot, slot+interval)
    // per day; a bucket with no rows emits nothing, a cell with no present
    // values stays missing.
    std::size_t r = 0;
    while (r < m.rows()) {
        Date day = date_of(m.timestamps()[r]);
        std::size_t day_end = r;
        while (day_end < m.rows() && date_of(m.timestamps()[day_end]) == day) ++day_end;
        std::size_t i = r;
        while (i < day_end) {
            long long slot =
                (seconds_of_day(m.timestamps()[i]) - kDayWindowStart) / step * step +
                kDayWindowStart;
            std::size_t j = i;
            while (j < day_end && seconds_of_day(m.timestamps()[j]) < slot + step) ++j;
            times.push_back(at_time_of_day(day, static_cast<int>(slot)));
            for (std::size_t c = 0; c < m.cols(); ++c) {
                long long sum = 0, n = 0;
                for (std::size_t k = i; k < j; ++k) {
                    if (!m.is_missing(k, c)) {
                        sum += m.at(k, c);
                        ++n;
                    }
                }
                values.push_back(n == 0 ? IntensityMatrix::kMissing
                                        : std::llround(double(sum) / double(n)));
            }
            i = j;
        }
        r = day_end;
    }
    return IntensityMatrix(std::move(times), m.columns(), std::move(values));
}

IntensityMatrix filter_days(const IntensityMatrix& m, const std::vector<Date>& days) {
    std::vector<Date> wanted = days;
    std::sort(wanted.begin(), wanted.end(), [](Date a, Date b) {
        return std::chrono::sys_days{a} < std::chrono::sys_days{b};
    });
    std::vector<Timestamp> times;
    std::vector<std::int64_t> values;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (!std::binary_search(wanted.begin(), wanted.end(), date_of(m.timestamps()[r]),
                                [](Date a, Date b) {
                                    return std::chrono::sys_days{a} < std::chrono::sys_days{b};
                                }))
            continue;
        times.push_back(m.timestamps()[r]);
        for (std::size_t c = 0; c < m.cols(); ++c) values.push_back(m.at(r, c));
    }
    return IntensityMatrix(std::move(times), m.columns(), std::move(values));
}

std::vector<std::pair<Timestamp, double>> node_observations(const IntensityMatrix& m,
                                                            const IntersectionId& node) {
    const std::size_t col = m.column_index(node);
    std::vector<std::pair<Timestamp, double>> obs;
    for (std::size_t r = 0; r < m.rows(); ++r)
        if (!m.is_missing(r, col))
            obs.emplace_back(m.timestamps()[r], static_cast<double>(m.at(r, col)));
    return obs;
}

std::vector<std::vector<double>> node_runs(const IntensityMatrix& m, const IntersectionId& node) {
    const std::size_t col = m.column_index(node);
    std::vector<std::vector<double>> runs;
    std::vector<double> cur;
    std::optional<Date> cur_day;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const Date day = date_of(m.timestamps()[r]);
        if (m.is_missing(r, col) || (cur_day && day != *cur_day)) {
            if (!cur.empty()) runs.push_back(std::move(cur));
            cur.clear();
            cur_day.reset();
        }
        if (!m.is_missing(r, col)) {
            cur.push_back(static_cast<double>(m.at(r, col)));
            cur_day = day;
        }
    }
    if (!cur.empty()) runs.push_back(std::move(cur));
    return runs;
}

WindowedDataset window(const IntensityMatrix& m, const IntersectionId& node,
                       const SampleGrid& grid, bool with_neighbor_sum, const RoadNetwork& net) {
    const long long step = grid.interval.count();
    if (step <= 0) throw UsageError("sample interval must be positive");
    if (grid.sequence_length.count() % step != 0)
        throw DataError("sequence length " + std::to_string(grid.sequence_length.count()) +
                        " s is not a multiple of the interval " + std::to_string(step) + " s");
    if (grid.prediction_length.count() % step != 0)
        throw DataError("prediction length " + std::to_string(grid.prediction_length.count()) +
                        " s is not a multiple of the interval " + std::to_string(step) + " s");
    const long long L = grid.sequence_length.count() / step;
    const long long H = grid.prediction_length.count() / step;
    if (L < 1) throw DataError("sequence length must cover at least one sample");
    if (H < 1) throw DataError("prediction length must cover at least one sample");

    const std::size_t col = m.column_index(node);
    std::vector<std::size_t> neighbor_cols;
    if (with_neighbor_sum)
        for (const IntersectionId& nb : net.neighbors(node))
            neighbor_cols.push_back(m.column_index(nb));

    for (Timestamp t : m.timestamps())
        if ((seconds_of_day(t) - kDayWindowStart) % step != 0)
            throw DataError("matrix is not resampled to a " + std::to_string(step) +
                            " s interval (offending row " + to_iso_timestamp(t) + ")");

    WindowedDataset out;
    out.target_node = node;
    out.lag_count = static_cast<std::size_t>(L);
    out.has_neighbor_sum = with_neighbor_sum;

    std::size_t r = 0;
    while (r < m.rows()) {
        Date day = date_of(m.timestamps()[r]);
        std::size_t day_end = r;
        std::unordered_map<long long, std::size_t> slot_row;
        while (day_end < m.rows() && date_of(m.timestamps()[day_end]) == day) {
            slot_row.emplace((seconds_of_day(m.timestamps()[day_end]) - kDayWindowStart) / step,
                             day_end);
            ++day_end;
        }
        for (std::size_t i = r; i < day_end; ++i) {
            const long long end_slot =
                (seconds_of_day(m.timestamps()[i]) - kDayWindowStart) / step;
            auto target_it = slot_row.find(end_slot + H);
            if (target_it == slot_row.end() || m.is_missing(target_it->second, col)) continue;

            bool usable = true;
            std::vector<double> lags(static_cast<std::size_t>(L));
            for (long long k = 0; k < L && usable; ++k) {
                auto it = slot_row.find(end_slot - L + 1 + k);
                if (it == slot_row.end() || m.is_missing(it->second, col))
                    usable = false;
                else
                    lags[static_cast<std::size_t>(k)] = double(m.at(it->second, col));
            }
            if (!usable) continue;

            double neighbor_sum = 0.0;
            if (with_neighbor_sum) {
                for (std::size_t nc : neighbor_cols) {
                    if (m.is_missing(i, nc)) {
                        usable = false;
                        break;
                    }
                    neighbor_sum += double(m.at(i, nc));
                }
                if (!usable) continue;
            }

            out.features.insert(out.features.end(), lags.begin(), lags.end());
            if (with_neighbor_sum) out.features.push_back(neighbor_sum);
            out.targets.push_back(double(m.at(target_it->second, col)));
            out.target_times.push_back(m.timestamps()[target_it->second]);
        }
        r = day_end;
    }
    return out;
}

namespace {

std::vector<Date> pick_first(const std::vector<Date>& days, std::size_t k) {
    return {days.begin(), days.begin() + static_cast<std::ptrdiff_t>(k)};
}

std::vector<Date> pick_rest(const std::vector<Date>& days, std::size_t k) {
    return {days.begin() + static_cast<std::ptrdiff_t>(k), days.end()};
}

[[noreturn]] void too_few(const std::string& what, std::size_t have, long long need) {
    throw DataError("split needs at least " + std::to_string(need + 1) + " " + what + ", found " +
                    std::to_string(have));
}

} // namespace

CalendarSplit split_days(const IntensityMatrix& m, const SplitPolicy& policy) {
    const std::vector<Date> all = m.days();
    std::vector<Date> weekdays, weekends;
    for (Date d : all) (is_weekend(d) ? weekends : weekdays).push_back(d);

    CalendarSplit split;
    switch (policy.kind) {
    case SplitKind::FirstKTrain: {
        if (policy.k_train < 1) throw UsageError("first-k-train needs k_train >= 1");
        if (all.size() <= static_cast<std::size_t>(policy.k_train))
            too_few("days", all.size(), policy.k_train);
        split.train_days = pick_first(all, static_cast<std::size_t>(policy.k_train));
        split.test_days = pick_rest(all, static_cast<std::size_t>(policy.k_train));
        break;
    }
    case SplitKind::WeekdaysOnly: {
        if (policy.k_train < 1) throw UsageError("weekdays-only needs k_train >= 1");
        if (weekdays.size() <= static_cast<std::size_t>(policy.k_train))
            too_few("weekdays", weekdays.size(), policy.k_train);
        split.train_days = pick_first(weekdays, static_cast<std::size_t>(policy.k_train));
        split.test_days = pick_rest(weekdays, static_cast<std::size_t>(policy.k_train));
        break;
    }
    case SplitKind::WeekdaysTrainWeekendsTest: {
        if (weekdays.empty()) too_few("weekdays", 0, 0);
        if (weekends.empty()) too_few("weekend days", 0, 0);
        split.train_days = weekdays;
        split.test_days = weekends;
        break;
    }
    case SplitKind::WeekendsTrainWeekdaysTest: {
        std::size_t k_train = policy.k_train > 0 ? static_cast<std::size_t>(policy.k_train)
                                                 : weekends.size();
        std::size_t k_test =
            policy.k_test > 0 ? static_cast<std::size_t>(policy.k_test) : weekdays.size();
        if (weekends.size() < k_train || k_train == 0)
            too_few("weekend days", weekends.size(), policy.k_train);
        if (weekdays.size() < k_test || k_test == 0)
            too_few("weekdays", weekdays.size(), policy.k_test);
        split.train_days = pick_first(weekends, k_train);
        split.test_days = pick_rest(weekdays, weekdays.size() - k_test);
        break;
    }
    case SplitKind::WeekendsOnly: {
        if (policy.k_train < 1) throw UsageError("weekends-only needs k_train >= 1");
        if (weekends.size() <= static_cast<std::size_t>(policy.k_train))
            too_few("weekend days", weekends.size(), policy.k_train);
        split.train_days = pick_first(weekends, static_cast<std::size_t>(policy.k_train));
        split.test_days = pick_rest(weekends, static_cast<std::size_t>(policy.k_train));
        break;
    }
    }
    return split;
}

SplitPolicy parse_split_policy(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);

    SplitPolicy policy;
    const std::string& name = parts[0];
    if (name == "first-k-train")
        policy.kind = SplitKind::FirstKTrain;
    else if (name == "weekdays-only")
        policy.kind = SplitKind::WeekdaysOnly;
    else if (name == "weekdays-train-weekends-test")
        policy.kind = SplitKind::WeekdaysTrainWeekendsTest;
    else if (name == "weekends-train-weekdays-test")
        policy.kind = SplitKind::WeekendsTrainWeekdaysTest;
    else if (name == "weekends-only")
        policy.kind = SplitKind::WeekendsOnly;
    else
        throw UsageError("unknown split policy '" + name + "'");

    try {
        if (parts.size() > 1 && !parts[1].empty())
            policy.k_train = static_cast<int>(parse_int(parts[1]));
        if (parts.size() > 2 && !parts[2].empty())
            policy.k_test = static_cast<int>(parse_int(parts[2]));
    } catch (const SchemaError& e) {
        throw UsageError("bad split policy '" + text + "': " + e.what());
    }
    if (parts.size() > 3) throw UsageError("bad split policy '" + text + "'");
    return policy;
}

void write_matrix_csv(const IntensityMatrix& m, const std::string& path) {
    std::string buf = "timestamp";
    for (const IntersectionId& c : m.columns()) buf += "," + c;
    buf.push_back('\n');
    for (std::size_t r = 0; r < m.rows(); ++r) {
        buf += to_iso_timestamp(m.timestamps()[r]);
        for (std::size_t c = 0; c < m.cols(); ++c) {
            buf.push_back(',');
            if (!m.is_missing(r, c)) buf += std::to_string(m.at(r, c));
        }
        buf.push_back('\n');
    }
    write_text_atomic(path, buf);
}

IntensityMatrix read_matrix_csv(const std::string& path) {
    CsvTable table = read_csv(path);
    if (table.header.empty() || table.header[0] != "timestamp")
        throw SchemaError("matrix file '" + path + "' must start with a timestamp column");
    std::vector<IntersectionId> columns(table.header.begin() + 1, table.header.end());
    std::vector<Timestamp> times;
    std::vector<std::int64_t> values;
    times.reserve(table.rows.size());
    values.reserve(table.rows.size() * columns.size());
    for (const auto& row : table.rows) {
        times.push_back(parse_iso_timestamp(row[0]));
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (row[c].empty()) {
                values.push_back(IntensityMatrix::kMissing);
            } else {
                long long v = parse_int(row[c]);
                if (v < 0)
                    throw SchemaError("matrix file '" + path + "': negative intensity " + row[c]);
                values.push_back(v);
            }
        }
    }
    return IntensityMatrix(std::move(times), std::move(columns), std::move(values));
}

void write_split_file(const CalendarSplit& split, const std::string& path) {
    std::string buf = "[train]\n";
    for (Date d : split.train_days) buf += to_iso_date(d) + "\n";
    buf += "[test]\n";
    for (Date d : split.test_days) buf += to_iso_date(d) + "\n";
    write_text_atomic(path, buf);
}

CalendarSplit read_split_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open split file '" + path + "'");
    CalendarSplit split;
    std::vector<Date>* side = nullptr;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (line == "[train]") {
            side = &split.train_days;
        } else if (line == "[test]") {
            side = &split.test_days;
        } else if (line[0] == '[') {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": unknown section " + line);
        } else {
            if (side == nullptr)
                throw SchemaError(path + ":" + std::to_string(lineno) +
                                  ": date before any [train]/[test] section");
            side->push_back(parse_iso_date(line));
        }
    }
    auto chrono_less = [](Date a, Date b) {
        return std::chrono::sys_days{a} < std::chrono::sys_days{b};
    };
    std::sort(split.train_days.begin(), split.train_days.end(), chrono_less);
    std::sort(split.test_days.begin(), split.test_days.end(), chrono_less);
    if (split.train_days.empty() || split.test_days.empty())
        throw DataError("split file '" + path + "' must list both train and test days");
    for (Date d : split.train_days)
        if (std::binary_search(split.test_days.begin(), split.test_days.end(), d, chrono_less))
            throw DataError("split file '" + path + "': " + to_iso_date(d) +
                            " appears in both roles");
    return split;
}

} // namespace conglab
