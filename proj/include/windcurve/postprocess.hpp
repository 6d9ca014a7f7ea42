#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "windcurve/error.hpp"

namespace windcurve {

inline constexpr double kDefaultCutOut = 25.0;  // m/s

struct ClipConfig {
    double p_max_kw;
    double v_cut_out_ms = kDefaultCutOut;
};

// Prior-knowledge clipping of one forecast value:
//   y            if 0 < y <= p_max and v < v_cut_out
//   p_max        if y > p_max and v < v_cut_out
//   0            otherwise (negative, NaN, or wind at/above cut-out)
// y == p_max is passed through unchanged.
inline double clip_value(double y, double v_eff, const ClipConfig& cfg) {
    if (!(v_eff < cfg.v_cut_out_ms)) return 0.0;
    if (y > cfg.p_max_kw) return cfg.p_max_kw;
    if (y > 0.0) return y;
    return 0.0;
}

inline std::vector<double> clip_forecast(std::span<const double> y_hat, std::span<const double> v_eff_hat,
                                         const ClipConfig& cfg) {
    if (y_hat.size() != v_eff_hat.size())
        throw MisalignedError("forecast and wind speed series differ in length");
    if (!(cfg.p_max_kw > 0) || !(cfg.v_cut_out_ms > 0))
        throw ParameterError("clip limits must be positive");
    std::vector<double> out(y_hat.size());
    for (std::size_t k = 0; k < y_hat.size(); ++k) out[k] = clip_value(y_hat[k], v_eff_hat[k], cfg);
    return out;
}

}  // namespace windcurve
