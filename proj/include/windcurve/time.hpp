#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <string>
#include <string_view>

#include "windcurve/error.hpp"

namespace windcurve {

// Instant as whole seconds since the Unix epoch (UTC).
struct Timestamp {
    std::int64_t seconds = 0;

    constexpr auto operator<=>(const Timestamp&) const = default;

    constexpr Timestamp operator+(std::int64_t s) const { return {seconds + s}; }
    constexpr Timestamp operator-(std::int64_t s) const { return {seconds - s}; }
    constexpr std::int64_t operator-(Timestamp other) const { return seconds - other.seconds; }
};

inline constexpr std::int64_t kQuarterHour = 900;
inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr int kStepsPerDay = 96;

inline Timestamp from_civil(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                            int second = 0) {
    using namespace std::chrono;
    const sys_days d = year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                      std::chrono::day{day}};
    return {static_cast<std::int64_t>(d.time_since_epoch().count()) * kSecondsPerDay +
            hour * 3600 + minute * 60 + second};
}

// Parses "YYYY-MM-DDTHH:MM[:SS][Z|+HH:MM|-HH:MM]"; a space may replace 'T'.
// A missing zone designator means UTC.
inline Timestamp parse_iso8601(std::string_view s) {
    auto fail = [&]() -> Timestamp {
        throw InvalidSeriesError("malformed ISO-8601 timestamp '" + std::string(s) + "'");
    };
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        if (pos + len > s.size()) fail();
        auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
        if (ec != std::errc{} || p != s.data() + pos + len) fail();
        return v;
    };
    if (s.size() < 16 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
        s[13] != ':')
        fail();
    const int year = num(0, 4);
    const int month = num(5, 2);
    const int day = num(8, 2);
    const int hour = num(11, 2);
    const int minute = num(14, 2);
    std::size_t pos = 16;
    int second = 0;
    if (pos < s.size() && s[pos] == ':') {
        second = num(pos + 1, 2);
        pos += 3;
        // fractional seconds are truncated
        if (pos < s.size() && s[pos] == '.') {
            ++pos;
            while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        }
    }
    int offset = 0;
    if (pos < s.size()) {
        if (s[pos] == 'Z' && pos + 1 == s.size()) {
            pos += 1;
        } else if ((s[pos] == '+' || s[pos] == '-') && pos + 6 == s.size() && s[pos + 3] == ':') {
            const int sign = s[pos] == '+' ? 1 : -1;
            offset = sign * (num(pos + 1, 2) * 60 + num(pos + 4, 2));
        } else {
            fail();
        }
    }
    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{static_cast<unsigned>(month)},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) fail();
    return from_civil(year, month, day, hour, minute, second) - offset * 60;
}

inline std::string format_iso8601(Timestamp t) {
    using namespace std::chrono;
    const auto days = static_cast<int>(
        std::floor(static_cast<double>(t.seconds) / static_cast<double>(kSecondsPerDay)));
    const std::int64_t secs = t.seconds - static_cast<std::int64_t>(days) * kSecondsPerDay;
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(secs / 3600),
                  static_cast<int>((secs / 60) % 60), static_cast<int>(secs % 60));
    return buf.data();
}

// Calendar features are evaluated in a fixed-offset local time.
struct CalendarConfig {
    int utc_offset_minutes = 0;
};

struct CalendarPosition {
    int day_of_year;     // 1-based, 366 on leap-year 31 Dec
    int minute_of_day;   // 0..1439
};

inline CalendarPosition calendar_position(Timestamp t, const CalendarConfig& cal = {}) {
    using namespace std::chrono;
    const std::int64_t local = t.seconds + std::int64_t{cal.utc_offset_minutes} * 60;
    std::int64_t days = local / kSecondsPerDay;
    std::int64_t rem = local % kSecondsPerDay;
    if (rem < 0) {
        rem += kSecondsPerDay;
        --days;
    }
    const sys_days d{std::chrono::days{days}};
    const year_month_day ymd{d};
    const sys_days jan1 = year_month_day{ymd.year(), January, std::chrono::day{1}};
    return {static_cast<int>((d - jan1).count()) + 1, static_cast<int>(rem / 60)};
}

struct CyclicFeatures {
    double sin_year;
    double cos_year;
    double sin_day;
    double cos_day;
};

// Sine/cosine encoding of day-of-year (period 365, also for leap years) and
// minute-of-day (period 1440).
inline CyclicFeatures cyclic_features(int day_of_year, int minute_of_day) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double a = two_pi * day_of_year / 365.0;
    const double b = two_pi * minute_of_day / 1440.0;
    return {std::sin(a), std::cos(a), std::sin(b), std::cos(b)};
}

inline CyclicFeatures cyclic_features(Timestamp t, const CalendarConfig& cal = {}) {
    const auto pos = calendar_position(t, cal);
    return cyclic_features(pos.day_of_year, pos.minute_of_day);
}

// Half-open minute-of-day window [start, end); wraps midnight when start > end.
struct NightWindow {
    int start_minute = 22 * 60;
    int end_minute = 6 * 60;
};

inline int night_indicator(int minute_of_day, const NightWindow& w) {
    if (w.start_minute < 0 || w.start_minute >= 1440 || w.end_minute < 0 || w.end_minute > 1440)
        throw ParameterError("night window minutes must lie in [0, 1440)");
    if (w.start_minute == w.end_minute) return 0;
    if (w.start_minute < w.end_minute)
        return minute_of_day >= w.start_minute && minute_of_day < w.end_minute ? 1 : 0;
    return minute_of_day >= w.start_minute || minute_of_day < w.end_minute ? 1 : 0;
}

inline int night_indicator(Timestamp t, const NightWindow& w, const CalendarConfig& cal = {}) {
    return night_indicator(calendar_position(t, cal).minute_of_day, w);
}

}  // namespace windcurve
