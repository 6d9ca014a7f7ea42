#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "windcurve/curves.hpp"
#include "windcurve/dataset.hpp"
#include "windcurve/error.hpp"
#include "windcurve/height.hpp"
#include "windcurve/mask.hpp"
#include "windcurve/series.hpp"
#include "windcurve/time.hpp"

namespace windcurve {

// Convex weights over library curves (by id), or explicit points in kW.
struct TrueCurveSpec {
    std::vector<std::pair<std::string, double>> weights;
    std::vector<CurvePoint> points;
};

struct WindProcessConfig {
    double weibull_shape = 2.0;
    double weibull_scale = 7.0;  // m/s
    double persistence = 0.97;   // AR(1) coefficient per step of the latent Gaussian
    double diurnal_amplitude = 0.1;
    double seasonal_amplitude = 0.1;
};

struct ForecastErrorConfig {
    double sigma_ms = 0.0;
    double bias_ms = 0.0;
    double persistence = 0.0;  // AR(1) coefficient of the error
};

struct RegularShutdownConfig {
    bool enabled = false;
    NightWindow window;
    std::vector<std::pair<int, int>> active_days;  // inclusive day-of-year ranges; empty = every day
};

struct IrregularShutdownConfig {
    double rate_per_day = 0.0;
    double mean_duration_steps = 16.0;
    double transition_probability = 0.0;  // chance of a partial-power step on each side of an event
};

struct SynthConfig {
    std::uint64_t seed = 1;
    Timestamp start = from_civil(2019, 1, 1);
    int days = 365;
    std::int64_t period_s = kQuarterHour;
    int utc_offset_minutes = 0;
    double peak_rating_kw = 1500.0;
    TrueCurveSpec curve;
    double hub_height_m = 100.0;
    double terrain_alpha = 1.0 / 7.0;
    WindProcessConfig wind;
    ForecastErrorConfig forecast_error;
    RegularShutdownConfig regular;
    IrregularShutdownConfig irregular;
    double noise_kw = 0.0;

    void validate() const {
        if (days < 1) throw ConfigError("duration must be at least one day");
        if (period_s <= 0 || kSecondsPerDay % period_s != 0) throw ConfigError("period must divide one day");
        if (!(peak_rating_kw > 0)) throw ConfigError("peak rating must be positive");
        if (!(hub_height_m > 0) || !(terrain_alpha > 0)) throw ConfigError("hub height and alpha must be positive");
        if (!(wind.weibull_shape > 0) || !(wind.weibull_scale > 0)) throw ConfigError("Weibull parameters must be positive");
        if (wind.persistence < 0 || wind.persistence >= 1) throw ConfigError("wind persistence must lie in [0, 1)");
        if (std::abs(wind.diurnal_amplitude) + std::abs(wind.seasonal_amplitude) >= 1)
            throw ConfigError("diurnal and seasonal amplitudes must sum below one");
        if (forecast_error.sigma_ms < 0 || noise_kw < 0) throw ConfigError("sigmas must be non-negative");
        if (forecast_error.persistence < 0 || forecast_error.persistence >= 1)
            throw ConfigError("forecast error persistence must lie in [0, 1)");
        if (irregular.rate_per_day < 0 || irregular.mean_duration_steps < 1)
            throw ConfigError("irregular rate must be >= 0 and mean duration >= 1 step");
        if (irregular.transition_probability < 0 || irregular.transition_probability > 1)
            throw ConfigError("transition probability must lie in [0, 1]");
        if (curve.weights.empty() == curve.points.empty())
            throw ConfigError("true curve needs either library weights or explicit points");
        if (!curve.weights.empty()) {
            double sum = 0;
            for (const auto& [id, w] : curve.weights) {
                if (w < 0) throw ConfigError("true curve weight for '" + id + "' is negative");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("true curve weights must sum to one");
        }
        for (const auto& [a, b] : regular.active_days)
            if (a < 1 || b > 366 || a > b) throw ConfigError("active day ranges must lie in 1..366");
    }
};

enum class TruthCategory : std::uint8_t { Normal = 0, Regular = 1, Irregular = 2, Transition = 3 };

inline const char* to_string(TruthCategory c) {
    switch (c) {
        case TruthCategory::Normal: return "normal";
        case TruthCategory::Regular: return "regular";
        case TruthCategory::Irregular: return "irregular";
        case TruthCategory::Transition: return "transition";
    }
    return "normal";
}

struct SynthDataset {
    AlignedDataset data;  // roles all Train; split separately
    EnergySeries energy;
    HubWindSeries hub_wind;
    WeatherForecastFrame weather;
    ShutdownMask truth;  // injected shutdown steps (regular and irregular)
    std::vector<TruthCategory> categories;
    PowerCurve true_curve;
};

// Builds the true curve in kW on the library grid.
inline PowerCurve build_true_curve(const TrueCurveSpec& spec, double peak_rating_kw,
                                   const std::vector<NormalizedPowerCurve>* library) {
    if (!spec.points.empty()) return PowerCurve("true", spec.points);
    if (!library) throw ConfigError("true curve weights need a curve library");
    std::vector<const NormalizedPowerCurve*> parts;
    for (const auto& [id, w] : spec.weights) {
        auto it = std::find_if(library->begin(), library->end(), [&](const auto& c) { return c.id == id; });
        if (it == library->end()) throw ConfigError("true curve references unknown curve '" + id + "'");
        parts.push_back(&*it);
    }
    const double step = parts.front()->grid_step;
    std::size_t n = 0;
    for (const auto* p : parts) {
        if (p->grid_start != 0.0 || std::abs(p->grid_step - step) > 1e-12)
            throw ConfigError("true curve components use different grids");
        n = std::max(n, p->values.size());
    }
    std::vector<CurvePoint> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0;
        for (std::size_t c = 0; c < parts.size(); ++c)
            if (i < parts[c]->values.size()) acc += spec.weights[c].second * parts[c]->values[i];
        pts[i] = {static_cast<double>(i) * step, acc * peak_rating_kw};
    }
    return PowerCurve("true", std::move(pts));
}

namespace detail {

inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline bool in_active_days(int doy, const std::vector<std::pair<int, int>>& ranges) {
    if (ranges.empty()) return true;
    for (const auto& [a, b] : ranges)
        if (doy >= a && doy <= b) return true;
    return false;
}

}  // namespace detail

inline SynthDataset generate(const SynthConfig& cfg, const std::vector<NormalizedPowerCurve>* library = nullptr) {
    cfg.validate();
    const PowerCurve curve = build_true_curve(cfg.curve, cfg.peak_rating_kw, library);
    const auto steps_per_day = static_cast<std::size_t>(kSecondsPerDay / cfg.period_s);
    const std::size_t n = static_cast<std::size_t>(cfg.days) * steps_per_day;
    const CalendarConfig cal{cfg.utc_offset_minutes};
    constexpr double two_pi = 2.0 * std::numbers::pi;

    // separate streams so that changing one component leaves the others intact
    std::seed_seq root{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32)};
    std::array<std::uint32_t, 6> stream_seeds{};
    root.generate(stream_seeds.begin(), stream_seeds.end());
    std::mt19937_64 rng_wind(stream_seeds[0]), rng_fc(stream_seeds[1]), rng_weather(stream_seeds[2]),
        rng_noise(stream_seeds[3]), rng_shutdown(stream_seeds[4]), rng_transition(stream_seeds[5]);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::vector<Timestamp> ts(n);
    std::vector<double> hub(n), v100(n), v10(n), dir(n), temp(n), pres(n), power(n);

    const double phi = cfg.wind.persistence;
    const double innov = std::sqrt(1.0 - phi * phi);
    double z = gauss(rng_wind);
    const double phi_e = cfg.forecast_error.persistence;
    const double innov_e = std::sqrt(1.0 - phi_e * phi_e);
    double err = gauss(rng_fc);
    double dir_state = gauss(rng_weather), pres_state = gauss(rng_weather);
    const double to_100 = std::pow(kForecastHeight / cfg.hub_height_m, cfg.terrain_alpha);
    const double to_10 = std::pow(10.0 / kForecastHeight, cfg.terrain_alpha);

    for (std::size_t i = 0; i < n; ++i) {
        ts[i] = cfg.start + static_cast<std::int64_t>(i) * cfg.period_s;
        const auto pos = calendar_position(ts[i], cal);
        const double day_frac = pos.minute_of_day / 1440.0;
        const double year_frac = (pos.day_of_year - 1) / 365.0;

        if (i > 0) z = phi * z + innov * gauss(rng_wind);
        const double u = std::clamp(detail::std_normal_cdf(z), 1e-12, 1.0 - 1e-12);
        double v = cfg.wind.weibull_scale * std::pow(-std::log1p(-u), 1.0 / cfg.wind.weibull_shape);
        v *= 1.0 + cfg.wind.diurnal_amplitude * std::sin(two_pi * (day_frac - 0.375)) +
             cfg.wind.seasonal_amplitude * std::cos(two_pi * (year_frac - 0.04));
        hub[i] = v;

        if (i > 0) err = phi_e * err + innov_e * gauss(rng_fc);
        v100[i] = std::max(0.0, v * to_100 + cfg.forecast_error.bias_ms + cfg.forecast_error.sigma_ms * err);
        v10[i] = v100[i] * to_10;

        dir_state = 0.98 * dir_state + std::sqrt(1 - 0.98 * 0.98) * gauss(rng_weather);
        const double d = 240.0 + 40.0 * std::sin(two_pi * year_frac) + 60.0 * dir_state;
        dir[i] = std::fmod(std::fmod(d, 360.0) + 360.0, 360.0);
        temp[i] = 9.0 - 8.0 * std::cos(two_pi * (year_frac - 0.05)) + 4.0 * std::sin(two_pi * (day_frac - 0.375)) +
                  gauss(rng_weather);
        pres_state = 0.995 * pres_state + std::sqrt(1 - 0.995 * 0.995) * gauss(rng_weather);
        pres[i] = 1013.0 + 3.0 * std::cos(two_pi * year_frac) + 8.0 * pres_state;

        const double p = curve(v) + (cfg.noise_kw > 0 ? cfg.noise_kw * gauss(rng_noise) : 0.0);
        power[i] = std::clamp(p, 0.0, cfg.peak_rating_kw);
    }

    std::vector<TruthCategory> cat(n, TruthCategory::Normal);
    if (cfg.regular.enabled) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto pos = calendar_position(ts[i], cal);
            if (night_indicator(pos.minute_of_day, cfg.regular.window) &&
                detail::in_active_days(pos.day_of_year, cfg.regular.active_days))
                cat[i] = TruthCategory::Regular;
        }
    }
    if (cfg.irregular.rate_per_day > 0) {
        const double p_start = std::min(1.0, cfg.irregular.rate_per_day / static_cast<double>(steps_per_day));
        std::geometric_distribution<long> duration(1.0 / cfg.irregular.mean_duration_steps);
        std::size_t i = 0;
        while (i < n) {
            if (unif(rng_shutdown) >= p_start) {
                ++i;
                continue;
            }
            const auto len = static_cast<std::size_t>(duration(rng_shutdown) + 1);
            const std::size_t end = std::min(n, i + len);
            for (std::size_t k = i; k < end; ++k)
                if (cat[k] == TruthCategory::Normal || cat[k] == TruthCategory::Transition)
                    cat[k] = TruthCategory::Irregular;
            if (cfg.irregular.transition_probability > 0) {
                if (i > 0 && cat[i - 1] == TruthCategory::Normal &&
                    unif(rng_transition) < cfg.irregular.transition_probability)
                    cat[i - 1] = TruthCategory::Transition;
                if (end < n && cat[end] == TruthCategory::Normal &&
                    unif(rng_transition) < cfg.irregular.transition_probability)
                    cat[end] = TruthCategory::Transition;
            }
            i = end + 1;
        }
    }

    ShutdownMask truth = ShutdownMask::empty(ts, "truth");
    for (std::size_t i = 0; i < n; ++i) {
        switch (cat[i]) {
            case TruthCategory::Regular:
            case TruthCategory::Irregular:
                power[i] = 0.0;
                truth.flags[i] = MaskFlag::RuleShutdown;
                break;
            case TruthCategory::Transition:
                power[i] *= 0.1 + 0.8 * unif(rng_transition);
                break;
            case TruthCategory::Normal:
                break;
        }
    }

    const double hours = static_cast<double>(cfg.period_s) / 3600.0;
    std::vector<double> energy(n);
    for (std::size_t i = 0; i < n; ++i) energy[i] = power[i] * hours;

    SynthDataset out{.data = {},
                     .energy = EnergySeries(ts, energy, cfg.period_s),
                     .hub_wind = HubWindSeries(ts, hub, cfg.period_s),
                     .weather = {},
                     .truth = std::move(truth),
                     .categories = std::move(cat),
                     .true_curve = curve};
    out.weather.timestamps = ts;
    out.weather.v100 = v100;
    out.weather.v10 = v10;
    out.weather.direction_deg = dir;
    out.weather.temperature_c = temp;
    out.weather.pressure_hpa = pres;
    out.weather.period_s = cfg.period_s;
    out.data = align(energy_to_power(out.energy, cfg.peak_rating_kw), out.hub_wind, out.weather, cal);
    return out;
}

namespace detail {

template <class T>
void read_opt(const nlohmann::json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace detail

// Reads the generator section of a preset / config document.
inline SynthConfig synth_config_from_json(const nlohmann::json& j) {
    SynthConfig c;
    try {
        using detail::read_opt;
        read_opt(j, "seed", c.seed);
        if (j.contains("start")) c.start = parse_iso8601(j.at("start").get<std::string>());
        read_opt(j, "days", c.days);
        read_opt(j, "period_s", c.period_s);
        read_opt(j, "utc_offset_minutes", c.utc_offset_minutes);
        read_opt(j, "peak_rating_kw", c.peak_rating_kw);
        read_opt(j, "hub_height_m", c.hub_height_m);
        read_opt(j, "terrain_alpha", c.terrain_alpha);
        read_opt(j, "noise_kw", c.noise_kw);
        if (j.contains("true_curve")) {
            const auto& tc = j.at("true_curve");
            if (tc.contains("weights"))
                for (const auto& [id, w] : tc.at("weights").items()) c.curve.weights.emplace_back(id, w.get<double>());
            if (tc.contains("points"))
                for (const auto& p : tc.at("points")) c.curve.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        }
        if (j.contains("wind")) {
            const auto& w = j.at("wind");
            read_opt(w, "weibull_shape", c.wind.weibull_shape);
            read_opt(w, "weibull_scale", c.wind.weibull_scale);
            read_opt(w, "persistence", c.wind.persistence);
            read_opt(w, "diurnal_amplitude", c.wind.diurnal_amplitude);
            read_opt(w, "seasonal_amplitude", c.wind.seasonal_amplitude);
        }
        if (j.contains("forecast_error")) {
            const auto& f = j.at("forecast_error");
            read_opt(f, "sigma_ms", c.forecast_error.sigma_ms);
            read_opt(f, "bias_ms", c.forecast_error.bias_ms);
            read_opt(f, "persistence", c.forecast_error.persistence);
        }
        if (j.contains("regular_shutdowns")) {
            const auto& r = j.at("regular_shutdowns");
            c.regular.enabled = r.value("enabled", true);
            if (r.contains("window")) {
                const auto w = r.at("window").get<std::vector<std::string>>();
                if (w.size() != 2) throw ConfigError("regular window must be [\"HH:MM\", \"HH:MM\"]");
                auto minutes = [](const std::string& s) {
                    if (s.size() != 5 || s[2] != ':') throw ConfigError("expected HH:MM, got '" + s + "'");
                    return std::stoi(s.substr(0, 2)) * 60 + std::stoi(s.substr(3, 2));
                };
                c.regular.window = {minutes(w[0]), minutes(w[1])};
            }
            if (r.contains("active_days"))
                for (const auto& d : r.at("active_days")) c.regular.active_days.emplace_back(d.at(0).get<int>(), d.at(1).get<int>());
        }
        if (j.contains("irregular_shutdowns")) {
            const auto& r = j.at("irregular_shutdowns");
            read_opt(r, "rate_per_day", c.irregular.rate_per_day);
            read_opt(r, "mean_duration_steps", c.irregular.mean_duration_steps);
            read_opt(r, "transition_probability", c.irregular.transition_probability);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed generator config: ") + e.what());
    }
    c.validate();
    return c;
}

}  // namespace windcurve
