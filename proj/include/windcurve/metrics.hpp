#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "windcurve/error.hpp"
#include "windcurve/mask.hpp"

namespace windcurve {

// sum|y_hat - y| / sum y
inline double nmae(std::span<const double> y_hat, std::span<const double> y) {
    if (y_hat.size() != y.size()) throw MisalignedError("forecast and measurement differ in length");
    double num = 0, den = 0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        num += std::abs(y_hat[k] - y[k]);
        den += y[k];
    }
    if (!(den > 0)) throw UndefinedMetricError("nMAE undefined: measured generation sums to <= 0");
    return num / den;
}

// sqrt(mean((y_hat - y)^2)) / mean(y)
inline double nrmse(std::span<const double> y_hat, std::span<const double> y) {
    if (y_hat.size() != y.size()) throw MisalignedError("forecast and measurement differ in length");
    if (y.empty()) throw UndefinedMetricError("nRMSE undefined: no samples");
    double sq = 0, sum = 0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double e = y_hat[k] - y[k];
        sq += e * e;
        sum += y[k];
    }
    const double n = static_cast<double>(y.size());
    const double mean = sum / n;
    if (!(mean > 0)) throw UndefinedMetricError("nRMSE undefined: mean measured generation <= 0");
    return std::sqrt(sq / n) / mean;
}

enum class Scenario { ConsiderShutdowns, DisregardShutdowns };

inline const char* to_string(Scenario s) {
    return s == Scenario::ConsiderShutdowns ? "consider" : "disregard";
}

inline Scenario scenario_from_string(const std::string& s) {
    if (s == "consider") return Scenario::ConsiderShutdowns;
    if (s == "disregard") return Scenario::DisregardShutdowns;
    throw ConfigError("unknown scenario '" + s + "' (valid: consider, disregard)");
}

struct ScenarioMetrics {
    double nmae;
    double nrmse;
    std::size_t samples;
};

// Consider: every row against the raw measurement. Disregard: rows flagged in
// `flags` are removed from both sums. `flags` may be empty for Consider.
inline ScenarioMetrics evaluate_scenario(std::span<const double> y_hat, std::span<const double> y,
                                         std::span<const MaskFlag> flags, Scenario scenario) {
    if (y_hat.size() != y.size()) throw MisalignedError("forecast and measurement differ in length");
    if (scenario == Scenario::ConsiderShutdowns) return {nmae(y_hat, y), nrmse(y_hat, y), y.size()};
    if (flags.size() != y.size())
        throw MisalignedError("disregard scenario needs a mask aligned with the test rows");
    std::vector<double> f, m;
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (is_flagged(flags[k])) continue;
        f.push_back(y_hat[k]);
        m.push_back(y[k]);
    }
    if (m.empty()) throw UndefinedMetricError("every test row is flagged; no rows remain");
    return {nmae(f, m), nrmse(f, m), m.size()};
}

}  // namespace windcurve
