#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "windcurve/error.hpp"
#include "windcurve/time.hpp"

namespace windcurve {

// Missing samples are NaN; zero is a legitimate measurement.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

// Checks that timestamps are strictly increasing and that every step is a
// positive multiple of the declared period. Gaps are allowed; they are how
// missing rows show up after ingestion.
inline void validate_timeline(std::span<const Timestamp> ts, std::int64_t period_s) {
    if (period_s <= 0) throw InvalidPeriodError("sampling period must be positive");
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const auto d = ts[i] - ts[i - 1];
        if (d <= 0)
            throw InvalidSeriesError("timestamps not strictly increasing at " +
                                     format_iso8601(ts[i]));
        if (d % period_s != 0)
            throw InvalidSeriesError("timestamp " + format_iso8601(ts[i]) +
                                     " is off the sampling grid");
    }
}

struct PowerTag {};
struct EnergyTag {};
struct WindTag {};

// A univariate, time-indexed series. Tag distinguishes physical quantities.
template <class Tag>
class Series {
public:
    Series() = default;

    Series(std::vector<Timestamp> timestamps, std::vector<double> values,
           std::int64_t period_s = kQuarterHour)
        : timestamps_(std::move(timestamps)), values_(std::move(values)), period_s_(period_s) {
        if (timestamps_.size() != values_.size())
            throw InvalidSeriesError("timestamp and value columns differ in length");
        if (timestamps_.empty()) throw InvalidSeriesError("series must hold at least one sample");
        validate_timeline(timestamps_, period_s_);
        if constexpr (std::is_same_v<Tag, WindTag>) {
            for (double v : values_)
                if (!is_missing(v) && v < 0) throw InvalidSeriesError("negative wind speed");
        }
        for (double v : values_)
            if (std::isinf(v)) throw InvalidSeriesError("non-finite sample value");
    }

    std::size_t size() const { return values_.size(); }
    std::int64_t period_seconds() const { return period_s_; }
    double period_hours() const { return static_cast<double>(period_s_) / 3600.0; }
    const std::vector<Timestamp>& timestamps() const { return timestamps_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

private:
    std::vector<Timestamp> timestamps_;
    std::vector<double> values_;
    std::int64_t period_s_ = kQuarterHour;
};

// Metered energy per sample period (kWh).
using EnergySeries = Series<EnergyTag>;
// Measured wind speed at hub height (m/s).
using HubWindSeries = Series<WindTag>;

// Mean power per sample period (kW) with the turbine's peak rating.
class PowerSeries : public Series<PowerTag> {
public:
    PowerSeries() = default;
    PowerSeries(std::vector<Timestamp> timestamps, std::vector<double> values,
                double peak_rating_kw = kMissing, std::int64_t period_s = kQuarterHour)
        : Series<PowerTag>(std::move(timestamps), std::move(values), period_s),
          peak_rating_kw_(peak_rating_kw) {}

    double peak_rating_kw() const { return peak_rating_kw_; }

private:
    double peak_rating_kw_ = kMissing;
};

// Day-ahead weather forecast covariates; v10 may be absent (all NaN).
struct WeatherForecastFrame {
    std::vector<Timestamp> timestamps;
    std::vector<double> v100;
    std::vector<double> v10;
    std::vector<double> direction_deg;
    std::vector<double> temperature_c;
    std::vector<double> pressure_hpa;
    std::int64_t period_s = kQuarterHour;

    std::size_t size() const { return timestamps.size(); }

    void validate() const {
        const std::size_t n = timestamps.size();
        if (n == 0) throw InvalidSeriesError("weather frame is empty");
        for (const auto* col : {&v100, &v10, &direction_deg, &temperature_c, &pressure_hpa})
            if (col->size() != n) throw InvalidSeriesError("weather columns differ in length");
        validate_timeline(timestamps, period_s);
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_missing(v100[i]) && v100[i] < 0)
                throw InvalidSeriesError("negative v100 at " + format_iso8601(timestamps[i]));
            const double d = direction_deg[i];
            if (!is_missing(d) && (d < 0 || d >= 360))
                throw InvalidSeriesError("wind direction outside [0,360) at " +
                                         format_iso8601(timestamps[i]));
        }
    }
};

// Mean power from metered energy: P[k] = dE[k] / t_k.
inline PowerSeries energy_to_power(const EnergySeries& e, double peak_rating_kw = kMissing) {
    const double hours = e.period_hours();
    if (!(hours > 0)) throw InvalidPeriodError("sample period must be positive");
    std::vector<double> p(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) p[i] = e[i] / hours;
    return PowerSeries(e.timestamps(), std::move(p), peak_rating_kw, e.period_seconds());
}

// Scalar form used where a sample period is given explicitly in hours.
inline double energy_to_power(double energy_kwh, double period_h) {
    if (!(period_h > 0)) throw InvalidPeriodError("sample period must be positive");
    return energy_kwh / period_h;
}

}  // namespace windcurve
