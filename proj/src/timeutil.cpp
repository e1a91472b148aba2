#include "conglab/timeutil.hpp"

#include "conglab/errors.hpp"

#include <cstdio>

namespace conglab {

namespace chr = std::chrono;

Date date_of(Timestamp t) {
    return Date{chr::floor<chr::days>(t)};
}

int seconds_of_day(Timestamp t) {
    const auto day = chr::floor<chr::days>(t);
    return int((t - day).count());
}

bool in_day_window(Timestamp t) {
    const int s = seconds_of_day(t);
    return s >= kDayWindowStart && s <= kDayWindowEnd;
}

Timestamp at_time_of_day(Date d, int seconds) {
    return chr::sys_days{d} + Seconds{seconds};
}

bool is_weekend(Date d) {
    const chr::weekday wd{chr::sys_days{d}};
    return wd == chr::Friday || wd == chr::Saturday;
}

namespace {

bool all_digits(const std::string& s, std::size_t from, std::size_t count) {
    if (from + count > s.size()) return false;
    for (std::size_t i = from; i < from + count; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    return true;
}

int digits(const std::string& s, std::size_t from, std::size_t count) {
    int v = 0;
    for (std::size_t i = from; i < from + count; ++i) v = v * 10 + (s[i] - '0');
    return v;
}

Timestamp make_timestamp(int y, int mo, int d, int h, int mi, int s, const std::string& text) {
    const Date ymd{chr::year{y}, chr::month{unsigned(mo)}, chr::day{unsigned(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59) {
        throw SchemaError("invalid timestamp '" + text + "'");
    }
    return chr::sys_days{ymd} + chr::hours{h} + chr::minutes{mi} + Seconds{s};
}

} // namespace

Timestamp parse_frame_timestamp(const std::string& stem) {
    // YYYYMMDD_HHMMSS
    if (stem.size() != 15 || stem[8] != '_' || !all_digits(stem, 0, 8) || !all_digits(stem, 9, 6)) {
        throw SchemaError("unparseable frame timestamp '" + stem + "' (expected YYYYMMDD_HHMMSS)");
    }
    return make_timestamp(digits(stem, 0, 4), digits(stem, 4, 2), digits(stem, 6, 2),
                          digits(stem, 9, 2), digits(stem, 11, 2), digits(stem, 13, 2), stem);
}

std::string to_frame_stem(Timestamp t) {
    const Date d = date_of(t);
    const int s = seconds_of_day(t);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%04d%02u%02u_%02d%02d%02d", int(d.year()),
                  unsigned(d.month()), unsigned(d.day()), s / 3600, (s / 60) % 60, s % 60);
    return buf;
}

Timestamp parse_iso_timestamp(const std::string& text) {
    // YYYY-MM-DDTHH:MM:SS
    if (text.size() != 19 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':' || !all_digits(text, 0, 4) ||
        !all_digits(text, 5, 2) || !all_digits(text, 8, 2) || !all_digits(text, 11, 2) ||
        !all_digits(text, 14, 2) || !all_digits(text, 17, 2)) {
        throw SchemaError("invalid timestamp '" + text + "' (expected YYYY-MM-DDTHH:MM:SS)");
    }
    return make_timestamp(digits(text, 0, 4), digits(text, 5, 2), digits(text, 8, 2),
                          digits(text, 11, 2), digits(text, 14, 2), digits(text, 17, 2), text);
}

std::string to_iso_timestamp(Timestamp t) {
    const Date d = date_of(t);
    const int s = seconds_of_day(t);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d", int(d.year()),
                  unsigned(d.month()), unsigned(d.day()), s / 3600, (s / 60) % 60, s % 60);
    return buf;
}

Date parse_iso_date(const std::string& text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !all_digits(text, 0, 4) ||
        !all_digits(text, 5, 2) || !all_digits(text, 8, 2)) {
        throw SchemaError("invalid date '" + text + "' (expected YYYY-MM-DD)");
    }
    const Date d{chr::year{digits(text, 0, 4)}, chr::month{unsigned(digits(text, 5, 2))},
                 chr::day{unsigned(digits(text, 8, 2))}};
    if (!d.ok()) throw SchemaError("invalid date '" + text + "'");
    return d;
}

std::string to_iso_date(Date d) {
    char buf[12];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(d.year()), unsigned(d.month()),
                  unsigned(d.day()));
    return buf;
}

} // namespace conglab
