#pragma once

#include "conglab/timeutil.hpp"

#include <map>
#include <utility>
#include <vector>

namespace conglab {

// Historical average with a fallback chain: (weekday, time-of-day) slot mean
// when at least two matching days were seen, then the all-days time-of-day
// mean, then the global mean.
struct HaModel {
    // key = (weekday c_encoding 0..6, seconds of day)
    std::map<std::pair<unsigned, int>, double> weekday_slot_means;
    std::map<int, double> slot_means;
    double global_mean = 0.0;
};

// One observation per (timestamp, value); duplicates of the same instant are
// rejected upstream (matrix timestamps are unique).
HaModel ha_fit(const std::vector<std::pair<Timestamp, double>>& train);

double ha_predict(const HaModel& model, Timestamp target_time);

} // namespace conglab
