#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "windcurve/error.hpp"
#include "windcurve/series.hpp"

namespace windcurve {

inline constexpr double kAlphaOnshore = 1.0 / 7.0;
inline constexpr double kAlphaOffshore = 1.0 / 9.0;
inline constexpr double kForecastHeight = 100.0;  // m

// Wind profile power law: v_a = v_b * (h_a / h_b)^alpha.
inline double power_law_scale(double v_b, double h_b, double h_a, double alpha) {
    if (!(h_a > 0) || !(h_b > 0)) throw DomainError("heights must be positive");
    if (!(alpha > 0)) throw DomainError("power-law exponent must be positive");
    if (v_b < 0) throw DomainError("wind speed must be non-negative");
    return v_b * std::pow(h_a / h_b, alpha);
}

struct HeightCorrectionModel {
    double alpha = kAlphaOnshore;
    double effective_height_m = kForecastHeight;
    double reference_height_m = kForecastHeight;

    // Multiplier taking a reference-height forecast to the effective hub height.
    double factor() const { return std::pow(effective_height_m / reference_height_m, alpha); }

    double correct(double v_ref) const { return v_ref * factor(); }
};

// h_eff = 100 m * (mean_hub / mean_v100)^(1/alpha)
inline double estimate_effective_hub_height(double mean_hub_ms, double mean_v100_ms, double alpha) {
    if (!(mean_hub_ms > 0) || !(mean_v100_ms > 0))
        throw EstimationError("mean wind speeds must be positive to estimate the hub height");
    if (!(alpha > 0)) throw EstimationError("power-law exponent must be positive");
    return kForecastHeight * std::pow(mean_hub_ms / mean_v100_ms, 1.0 / alpha);
}

// Fits h_eff from paired samples; rows where either value is missing are
// skipped, as are rows with `exclude[i]` set when an exclusion list is given.
inline HeightCorrectionModel fit_height_model(std::span<const double> hub_ms,
                                              std::span<const double> v100_ms, double alpha,
                                              std::span<const bool> exclude = {}) {
    if (hub_ms.size() != v100_ms.size() || (!exclude.empty() && exclude.size() != hub_ms.size()))
        throw MisalignedError("hub wind and forecast columns differ in length");
    double sum_hub = 0, sum_fc = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < hub_ms.size(); ++i) {
        if (is_missing(hub_ms[i]) || is_missing(v100_ms[i])) continue;
        if (!exclude.empty() && exclude[i]) continue;
        sum_hub += hub_ms[i];
        sum_fc += v100_ms[i];
        ++n;
    }
    if (n == 0) throw EstimationError("no paired hub/forecast samples for height estimation");
    const double mh = sum_hub / static_cast<double>(n);
    const double mf = sum_fc / static_cast<double>(n);
    return {alpha, estimate_effective_hub_height(mh, mf, alpha), kForecastHeight};
}

inline double correct_forecast(double v100, const HeightCorrectionModel& m) {
    return m.correct(v100);
}

inline std::vector<double> correct_forecast(std::span<const double> v100,
                                            const HeightCorrectionModel& m) {
    const double f = m.factor();
    std::vector<double> out(v100.size());
    for (std::size_t i = 0; i < v100.size(); ++i) out[i] = v100[i] * f;
    return out;
}

}  // namespace windcurve
