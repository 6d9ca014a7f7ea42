#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windcurve/dataset.hpp"
#include "windcurve/error.hpp"
#include "windcurve/series.hpp"
#include "windcurve/time.hpp"

namespace windcurve {

// Covariates known for the forecast horizon: no measurements, only weather
// forecasts and calendar information.
struct CovariateFrame {
    std::vector<Timestamp> timestamps;
    std::vector<double> v100_ms;
    std::vector<double> direction_deg;
    std::vector<double> temperature_c;
    std::vector<double> pressure_hpa;
    CalendarConfig calendar;

    std::size_t size() const { return timestamps.size(); }

    static CovariateFrame from(const AlignedDataset& ds, std::size_t first, std::size_t count) {
        CovariateFrame f;
        f.calendar = ds.calendar_config;
        for (std::size_t i = first; i < first + count; ++i) {
            f.timestamps.push_back(ds.timestamps[i]);
            f.v100_ms.push_back(ds.v100_ms[i]);
            f.direction_deg.push_back(ds.direction_deg[i]);
            f.temperature_c.push_back(ds.temperature_c[i]);
            f.pressure_hpa.push_back(ds.pressure_hpa[i]);
        }
        return f;
    }

    static CovariateFrame from(const WeatherForecastFrame& w, std::size_t first, std::size_t count,
                               const CalendarConfig& cal = {}) {
        CovariateFrame f;
        f.calendar = cal;
        for (std::size_t i = first; i < first + count; ++i) {
            f.timestamps.push_back(w.timestamps[i]);
            f.v100_ms.push_back(w.v100[i]);
            f.direction_deg.push_back(w.direction_deg[i]);
            f.temperature_c.push_back(w.temperature_c[i]);
            f.pressure_hpa.push_back(w.pressure_hpa[i]);
        }
        return f;
    }
};

struct ArxConfig {
    std::vector<int> lags = {1, 2, 3, 4, 96};
    double ridge = 1.0;
    int wind_degree = 3;  // v100, v100^2, ... as exogenous terms
    bool use_direction = true;
    bool use_temperature = true;
    bool use_pressure = true;
    bool use_cyclic = true;
};

// Linear autoregression with exogenous inputs. Coefficients apply to raw
// (unstandardized) feature values.
struct ArxModel {
    ArxConfig config;
    std::vector<double> lag_coefficients;  // aligned with config.lags
    std::vector<double> exog_coefficients; // aligned with exog_names()
    double intercept = 0.0;
    bool explanatory = false;  // shutdown label, theoretical power, night indicator
    NightWindow night;
    std::int64_t period_s = kQuarterHour;

    int max_lag() const {
        return config.lags.empty() ? 0 : *std::max_element(config.lags.begin(), config.lags.end());
    }

    std::vector<std::string> exog_names() const {
        std::vector<std::string> names;
        for (int d = 1; d <= config.wind_degree; ++d) names.push_back("v100^" + std::to_string(d));
        if (config.use_direction) {
            names.push_back("dir_sin");
            names.push_back("dir_cos");
        }
        if (config.use_temperature) names.push_back("temp");
        if (config.use_pressure) names.push_back("pressure");
        if (config.use_cyclic) {
            for (auto n : {"sin_365", "cos_365", "sin_1440", "cos_1440"}) names.push_back(n);
        }
        if (explanatory) {
            names.push_back("night");
            for (int l : config.lags) names.push_back("x_sd_lag" + std::to_string(l));
            for (int l : config.lags) names.push_back("y_wpc_lag" + std::to_string(l));
        }
        return names;
    }

    // Exogenous features for one target time, including the night indicator
    // in explanatory mode. Lagged explanatory values are appended by callers.
    bool exog_row(Timestamp t, double v100, double dir_deg, double temp, double pres,
                  const CalendarConfig& cal, std::vector<double>& out) const {
        out.clear();
        double p = 1.0;
        for (int d = 1; d <= config.wind_degree; ++d) {
            p *= v100;
            out.push_back(p);
        }
        if (config.use_direction) {
            const double a = dir_deg * std::numbers::pi / 180.0;
            out.push_back(std::sin(a));
            out.push_back(std::cos(a));
        }
        if (config.use_temperature) out.push_back(temp);
        if (config.use_pressure) out.push_back(pres);
        if (config.use_cyclic) {
            const auto c = cyclic_features(t, cal);
            out.insert(out.end(), {c.sin_year, c.cos_year, c.sin_day, c.cos_day});
        }
        if (explanatory) out.push_back(night_indicator(t, night, cal));
        for (double x : out)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

// Ridge-regularized least squares for one-step-ahead power on lagged power,
// exogenous forecasts and calendar features, fitted on train + hold-out rows.
// Lagged values must exist in the dataset (dropped rows break lag chains).
inline ArxModel fit_arx(const AlignedDataset& ds, const ArxConfig& cfg,
                        const NightWindow& night = {}) {
    if (cfg.ridge < 0) throw ParameterError("ridge penalty must be non-negative");
    for (int l : cfg.lags)
        if (l < 1 || l > kStepsPerDay) throw ParameterError("lags must lie in 1..96");

    ArxModel model;
    model.config = cfg;
    model.explanatory = ds.explanatory.has_value();
    model.night = night;
    model.period_s = ds.period_s;

    const auto rows = ds.rows_with({Role::Train, Role::Holdout});
    std::vector<bool> usable(ds.size(), false);
    for (auto r : rows) usable[r] = !is_missing(ds.power_kw[r]);

    std::vector<std::vector<double>> feats;
    std::vector<double> target;
    std::vector<double> exog;
    for (auto r : rows) {
        if (!usable[r]) continue;
        const Timestamp t = ds.timestamps[r];
        std::vector<double> f;
        std::vector<std::size_t> sources;
        bool ok = true;
        for (int l : cfg.lags) {
            const auto src = ds.find(t - l * ds.period_s);
            if (!src || !usable[*src]) {
                ok = false;
                break;
            }
            f.push_back(ds.power_kw[*src]);
            sources.push_back(*src);
        }
        if (!ok) continue;
        if (!model.exog_row(t, ds.v100_ms[r], ds.direction_deg[r], ds.temperature_c[r],
                            ds.pressure_hpa[r], ds.calendar_config, exog))
            continue;
        f.insert(f.end(), exog.begin(), exog.end());
        if (model.explanatory) {
            for (auto src : sources) f.push_back(ds.explanatory->shutdown_label[src]);
            for (auto src : sources) f.push_back(ds.explanatory->theoretical_power_kw[src]);
            if (std::any_of(f.end() - static_cast<std::ptrdiff_t>(sources.size()), f.end(),
                            [](double x) { return !std::isfinite(x); }))
                continue;
        }
        feats.push_back(std::move(f));
        target.push_back(ds.power_kw[r]);
    }
    const auto p = static_cast<Eigen::Index>(cfg.lags.size() + model.exog_names().size());
    const auto n = static_cast<Eigen::Index>(feats.size());
    if (n <= p) throw FitError("not enough complete lagged rows to fit the ARX model");

    Eigen::MatrixXd X(n, p + 1);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (Eigen::Index c = 0; c < p; ++c) X(i, c + 1) = feats[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        y(i) = target[static_cast<std::size_t>(i)];
    }
    // standardize non-intercept columns so the penalty treats them alike
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(p + 1), scale = Eigen::VectorXd::Ones(p + 1);
    for (Eigen::Index c = 1; c <= p; ++c) {
        mean(c) = X.col(c).mean();
        const double sd = std::sqrt((X.col(c).array() - mean(c)).square().mean());
        scale(c) = sd > 0 ? sd : 1.0;
        X.col(c) = (X.col(c).array() - mean(c)) / scale(c);
    }

    Eigen::VectorXd beta;
    if (cfg.ridge == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
        qr.setThreshold(1e-10);
        if (qr.rank() < X.cols())
            throw FitError("ARX normal equations are singular with ridge = 0; use a ridge penalty > 0");
        beta = qr.solve(y);
    } else {
        Eigen::MatrixXd G = X.transpose() * X;
        G.diagonal().tail(p).array() += cfg.ridge;
        beta = G.ldlt().solve(X.transpose() * y);
    }

    model.intercept = beta(0);
    std::vector<double> raw(static_cast<std::size_t>(p));
    for (Eigen::Index c = 1; c <= p; ++c) {
        raw[static_cast<std::size_t>(c - 1)] = beta(c) / scale(c);
        model.intercept -= beta(c) * mean(c) / scale(c);
    }
    model.lag_coefficients.assign(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(cfg.lags.size()));
    model.exog_coefficients.assign(raw.begin() + static_cast<std::ptrdiff_t>(cfg.lags.size()), raw.end());
    return model;
}

// Recursive multi-step forecast. `window` is the processed past horizon
// ending one step before the first future timestamp; forecasts feed back as
// lagged inputs once the lag reaches past the origin.
inline std::vector<double> predict_arx(const ArxModel& m, const AlignedDataset& window,
                                       const CovariateFrame& future) {
    const auto W = window.size();
    if (W < static_cast<std::size_t>(m.max_lag()))
        throw ParameterError("past window holds " + std::to_string(W) + " rows but the model needs " +
                             std::to_string(m.max_lag()) + " (the past horizon)");
    if (m.lag_coefficients.size() != m.config.lags.size())
        throw ParameterError("ARX model is inconsistent");
    if (W > 0 && future.size() > 0 && future.timestamps.front() - window.timestamps.back() != m.period_s)
        throw ParameterError("forecast horizon must start one step after the past window");
    for (std::size_t i = 1; i < W; ++i)
        if (window.timestamps[i] - window.timestamps[i - 1] != m.period_s)
            throw ParameterError("past window is not contiguous");
    for (double v : window.power_kw)
        if (is_missing(v)) throw ParameterError("past window contains missing power values");
    if (m.explanatory && !window.explanatory)
        throw ParameterError("model expects explanatory columns in the past window");

    const std::size_t L = m.config.lags.size();
    std::vector<double> out(future.size());
    std::vector<double> exog;
    for (std::size_t j = 0; j < future.size(); ++j) {
        double acc = m.intercept;
        if (!m.exog_row(future.timestamps[j], future.v100_ms[j], future.direction_deg[j],
                        future.temperature_c[j], future.pressure_hpa[j], future.calendar, exog)) {
            out[j] = kMissing;
            continue;
        }
        for (std::size_t c = 0; c < exog.size(); ++c) acc += m.exog_coefficients[c] * exog[c];
        for (std::size_t li = 0; li < L; ++li) {
            const auto back = static_cast<std::ptrdiff_t>(j) - m.config.lags[li];
            double y = 0, label = 0, theo = 0;
            if (back < 0) {
                const auto w = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(W) + back);
                y = window.power_kw[w];
                if (m.explanatory) {
                    label = window.explanatory->shutdown_label[w];
                    theo = window.explanatory->theoretical_power_kw[w];
                }
            } else {
                // forecast positions count as normal operation
                y = out[static_cast<std::size_t>(back)];
                theo = y;
            }
            acc += m.lag_coefficients[li] * y;
            if (m.explanatory) {
                acc += m.exog_coefficients[exog.size() + li] * label;
                acc += m.exog_coefficients[exog.size() + L + li] * theo;
            }
        }
        out[j] = acc;
    }
    return out;
}

inline nlohmann::json to_json(const ArxModel& m) {
    return {{"lags", m.config.lags},
            {"ridge", m.config.ridge},
            {"wind_degree", m.config.wind_degree},
            {"use_direction", m.config.use_direction},
            {"use_temperature", m.config.use_temperature},
            {"use_pressure", m.config.use_pressure},
            {"use_cyclic", m.config.use_cyclic},
            {"lag_coefficients", m.lag_coefficients},
            {"exog_names", m.exog_names()},
            {"exog_coefficients", m.exog_coefficients},
            {"intercept", m.intercept},
            {"explanatory", m.explanatory},
            {"night_window", {m.night.start_minute, m.night.end_minute}},
            {"period_s", m.period_s}};
}

inline ArxModel arx_model_from_json(const nlohmann::json& j) {
    ArxModel m;
    try {
        m.config.lags = j.at("lags").get<std::vector<int>>();
        m.config.ridge = j.at("ridge").get<double>();
        m.config.wind_degree = j.at("wind_degree").get<int>();
        m.config.use_direction = j.at("use_direction").get<bool>();
        m.config.use_temperature = j.at("use_temperature").get<bool>();
        m.config.use_pressure = j.at("use_pressure").get<bool>();
        m.config.use_cyclic = j.at("use_cyclic").get<bool>();
        m.lag_coefficients = j.at("lag_coefficients").get<std::vector<double>>();
        m.exog_coefficients = j.at("exog_coefficients").get<std::vector<double>>();
        m.intercept = j.at("intercept").get<double>();
        m.explanatory = j.at("explanatory").get<bool>();
        const auto nw = j.at("night_window").get<std::vector<int>>();
        if (nw.size() != 2) throw SchemaError("night_window must hold two minutes");
        m.night = {nw[0], nw[1]};
        m.period_s = j.at("period_s").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed ARX document: ") + e.what());
    }
    if (m.lag_coefficients.size() != m.config.lags.size() ||
        m.exog_coefficients.size() != m.exog_names().size())
        throw SchemaError("ARX coefficient counts do not match the feature schema");
    return m;
}

}  // namespace windcurve
