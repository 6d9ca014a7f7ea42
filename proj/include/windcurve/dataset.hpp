#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windcurve/error.hpp"
#include "windcurve/mask.hpp"
#include "windcurve/series.hpp"
#include "windcurve/time.hpp"

namespace windcurve {

enum class Role : std::uint8_t { Train, Holdout, Test };

inline const char* to_string(Role r) {
    switch (r) {
        case Role::Train: return "train";
        case Role::Holdout: return "holdout";
        case Role::Test: return "test";
    }
    return "train";
}

// Extra columns appended by the explanatory-variables shutdown strategy.
struct ExplanatoryColumns {
    std::vector<double> shutdown_label;        // x_sd: 1 abnormal, 0 normal
    std::vector<double> theoretical_power_kw;  // OEM curve at measured hub wind
    std::vector<double> night;                 // 1 inside the night window
};

// Row-aligned join of measurements, weather forecasts and calendar features.
struct AlignedDataset {
    std::vector<Timestamp> timestamps;
    std::vector<double> power_kw;
    std::vector<double> hub_wind_ms;
    std::vector<double> v100_ms;
    std::vector<double> v10_ms;
    std::vector<double> direction_deg;
    std::vector<double> temperature_c;
    std::vector<double> pressure_hpa;
    std::vector<CyclicFeatures> calendar;
    std::vector<Role> roles;
    std::optional<ShutdownMask> mask;
    std::optional<ExplanatoryColumns> explanatory;

    double peak_rating_kw = kMissing;
    std::int64_t period_s = kQuarterHour;
    CalendarConfig calendar_config;
    std::size_t dropped_rows = 0;  // rows removed by align() for missing mandatory values

    std::size_t size() const { return timestamps.size(); }

    // Index of the row with timestamp t, if present.
    std::optional<std::size_t> find(Timestamp t) const {
        auto it = std::lower_bound(timestamps.begin(), timestamps.end(), t);
        if (it == timestamps.end() || *it != t) return std::nullopt;
        return static_cast<std::size_t>(it - timestamps.begin());
    }

    std::vector<std::size_t> rows_with(std::initializer_list<Role> wanted) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < roles.size(); ++i)
            if (std::find(wanted.begin(), wanted.end(), roles[i]) != wanted.end()) out.push_back(i);
        return out;
    }

    // Copy of the listed rows, in the given order (which must be increasing).
    AlignedDataset select(std::span<const std::size_t> rows) const {
        AlignedDataset out;
        out.peak_rating_kw = peak_rating_kw;
        out.period_s = period_s;
        out.calendar_config = calendar_config;
        out.dropped_rows = dropped_rows;
        auto pick = [&](const auto& src, auto& dst) {
            if (src.empty()) return;
            dst.reserve(rows.size());
            for (auto r : rows) dst.push_back(src[r]);
        };
        pick(timestamps, out.timestamps);
        pick(power_kw, out.power_kw);
        pick(hub_wind_ms, out.hub_wind_ms);
        pick(v100_ms, out.v100_ms);
        pick(v10_ms, out.v10_ms);
        pick(direction_deg, out.direction_deg);
        pick(temperature_c, out.temperature_c);
        pick(pressure_hpa, out.pressure_hpa);
        pick(calendar, out.calendar);
        pick(roles, out.roles);
        if (mask) {
            ShutdownMask m;
            m.source = mask->source;
            pick(mask->timestamps, m.timestamps);
            pick(mask->flags, m.flags);
            out.mask = std::move(m);
        }
        if (explanatory) {
            ExplanatoryColumns e;
            pick(explanatory->shutdown_label, e.shutdown_label);
            pick(explanatory->theoretical_power_kw, e.theoretical_power_kw);
            pick(explanatory->night, e.night);
            out.explanatory = std::move(e);
        }
        return out;
    }

    void validate() const {
        const std::size_t n = timestamps.size();
        for (const auto* col : {&power_kw, &hub_wind_ms, &v100_ms, &v10_ms, &direction_deg,
                                &temperature_c, &pressure_hpa})
            if (col->size() != n) throw InvalidSeriesError("dataset columns differ in length");
        if (calendar.size() != n || roles.size() != n)
            throw InvalidSeriesError("dataset columns differ in length");
        if (mask) require_aligned(*mask, timestamps);
        validate_timeline(timestamps, period_s);
    }
};

// Inner join on timestamps. Rows lacking power or the 100 m wind forecast are
// dropped and counted; a missing hub measurement keeps the row.
inline AlignedDataset align(const PowerSeries& power, const HubWindSeries& hub,
                            const WeatherForecastFrame& weather, const CalendarConfig& cal = {}) {
    weather.validate();
    if (power.period_seconds() != hub.period_seconds() ||
        power.period_seconds() != weather.period_s)
        throw AlignmentError("series declare different sampling periods");

    AlignedDataset ds;
    ds.peak_rating_kw = power.peak_rating_kw();
    ds.period_s = power.period_seconds();
    ds.calendar_config = cal;

    const auto& tp = power.timestamps();
    const auto& th = hub.timestamps();
    const auto& tw = weather.timestamps;
    std::size_t i = 0, j = 0, k = 0;
    std::size_t joined = 0;
    while (i < tp.size() && j < th.size() && k < tw.size()) {
        const Timestamp t = std::max({tp[i], th[j], tw[k]});
        if (tp[i] < t) { ++i; continue; }
        if (th[j] < t) { ++j; continue; }
        if (tw[k] < t) { ++k; continue; }
        ++joined;
        if (is_missing(power[i]) || is_missing(weather.v100[k])) {
            ++ds.dropped_rows;
        } else {
            ds.timestamps.push_back(t);
            ds.power_kw.push_back(power[i]);
            ds.hub_wind_ms.push_back(hub[j]);
            ds.v100_ms.push_back(weather.v100[k]);
            ds.v10_ms.push_back(weather.v10[k]);
            ds.direction_deg.push_back(weather.direction_deg[k]);
            ds.temperature_c.push_back(weather.temperature_c[k]);
            ds.pressure_hpa.push_back(weather.pressure_hpa[k]);
            ds.calendar.push_back(cyclic_features(t, cal));
        }
        ++i, ++j, ++k;
    }
    if (joined == 0) throw AlignmentError("power, hub wind and weather share no timestamps");
    if (ds.timestamps.empty())
        throw AlignmentError("every shared timestamp lacks power or the 100 m forecast");
    ds.roles.assign(ds.size(), Role::Train);
    return ds;
}

// Rows before `boundary` become training rows, of which the chronologically
// last `holdout_fraction` are re-tagged as early-stopping hold-out; rows at or
// after the boundary are test rows.
inline AlignedDataset split(AlignedDataset ds, Timestamp boundary, double holdout_fraction) {
    if (ds.size() == 0) throw SplitError("cannot split an empty dataset");
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0))
        throw SplitError("hold-out fraction must lie in [0, 1)");
    if (boundary <= ds.timestamps.front() || boundary > ds.timestamps.back())
        throw SplitError("split boundary " + format_iso8601(boundary) +
                         " lies outside the dataset range");
    const auto n_train = static_cast<std::size_t>(
        std::lower_bound(ds.timestamps.begin(), ds.timestamps.end(), boundary) -
        ds.timestamps.begin());
    const auto n_holdout =
        static_cast<std::size_t>(std::floor(static_cast<double>(n_train) * holdout_fraction + 1e-9));
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i >= n_train)
            ds.roles[i] = Role::Test;
        else if (i >= n_train - n_holdout)
            ds.roles[i] = Role::Holdout;
        else
            ds.roles[i] = Role::Train;
    }
    return ds;
}

}  // namespace windcurve
