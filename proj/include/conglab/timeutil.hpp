#pragma once

#include <chrono>
#include <string>

namespace conglab {

// All instants are local wall-clock at second resolution; there is no time
// zone handling anywhere in the pipeline.
using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::year_month_day;
using Seconds = std::chrono::seconds;

// Capture runs from 06:00:00 to 23:59:59 each day.
inline constexpr int kDayWindowStart = 6 * 3600;
inline constexpr int kDayWindowEnd = 23 * 3600 + 59 * 60 + 59;
inline constexpr Seconds kBaseCadence{30};
inline constexpr int kSlotsPerDay = (kDayWindowEnd + 1 - kDayWindowStart) / 30; // 2160

Date date_of(Timestamp t);
int seconds_of_day(Timestamp t);
bool in_day_window(Timestamp t);
Timestamp at_time_of_day(Date d, int seconds_of_day);

// Weekend in the Bangladesh calendar: Friday and Saturday.
bool is_weekend(Date d);

// "YYYYMMDD_HHMMSS" as encoded in frame filenames.
Timestamp parse_frame_timestamp(const std::string& stem);
std::string to_frame_stem(Timestamp t);

// ISO-8601 local: "YYYY-MM-DDTHH:MM:SS" and "YYYY-MM-DD".
Timestamp parse_iso_timestamp(const std::string& text);
std::string to_iso_timestamp(Timestamp t);
Date parse_iso_date(const std::string& text);
std::string to_iso_date(Date d);

} // namespace conglab
