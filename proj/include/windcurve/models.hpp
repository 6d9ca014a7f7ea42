#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "windcurve/arx.hpp"
#include "windcurve/autowp.hpp"
#include "windcurve/curves.hpp"
#include "windcurve/dataset.hpp"
#include "windcurve/error.hpp"
#include "windcurve/height.hpp"
#include "windcurve/mlp.hpp"

namespace windcurve {

// Common interface for day-ahead forecasters. `window` is the processed past
// horizon before the origin; static models ignore it and accept nullptr.
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::string name() const = 0;
    virtual bool autoregressive() const { return false; }
    virtual std::vector<double> forecast(const AlignedDataset* window, const CovariateFrame& future) const = 0;
    virtual nlohmann::json to_json() const = 0;
};

class AutoWpForecaster : public Forecaster {
public:
    explicit AutoWpForecaster(EnsembleModel m) : model_(std::move(m)) {}
    std::string name() const override { return "autowp"; }
    std::vector<double> forecast(const AlignedDataset*, const CovariateFrame& future) const override {
        return model_.predict(future.v100_ms);
    }
    nlohmann::json to_json() const override { return windcurve::to_json(model_); }
    const EnsembleModel& model() const { return model_; }

private:
    EnsembleModel model_;
};

// Single manufacturer curve applied to the height-corrected forecast.
struct OemCurveForecaster : Forecaster {
    PowerCurve curve;
    HeightCorrectionModel height;

    OemCurveForecaster(PowerCurve c, HeightCorrectionModel h) : curve(std::move(c)), height(h) {
        if (curve.points().empty()) throw InvalidCurveError("OEM curve has no points");
    }
    std::string name() const override { return "oem"; }
    std::vector<double> forecast(const AlignedDataset*, const CovariateFrame& future) const override;
    nlohmann::json to_json() const override;
};

inline std::vector<double> oem_forecast(const OemCurveForecaster& f, std::span<const double> v100) {
    std::vector<double> out(v100.size());
    for (std::size_t k = 0; k < v100.size(); ++k)
        out[k] = is_missing(v100[k]) ? kMissing : f.curve(f.height.correct(v100[k]));
    return out;
}

inline std::vector<double> OemCurveForecaster::forecast(const AlignedDataset*, const CovariateFrame& future) const {
    return oem_forecast(*this, future.v100_ms);
}

inline nlohmann::json OemCurveForecaster::to_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : curve.points()) pts.push_back({p.v_ms, p.p_kw});
    return {{"schema_version", kModelSchemaVersion},
            {"model_type", "oem"},
            {"curve_id", curve.id()},
            {"points", pts},
            {"alpha_h", height.alpha},
            {"h_eff_m", height.effective_height_m}};
}

class MlpForecaster : public Forecaster {
public:
    explicit MlpForecaster(MlpRegressor m) : model_(std::move(m)) {}
    std::string name() const override { return "mlp"; }
    std::vector<double> forecast(const AlignedDataset*, const CovariateFrame& future) const override {
        Eigen::MatrixXd X(static_cast<Eigen::Index>(future.size()), kMlpFeatures);
        for (std::size_t k = 0; k < future.size(); ++k) {
            const double dir = future.direction_deg[k] * std::numbers::pi / 180.0;
            const auto r = static_cast<Eigen::Index>(k);
            X(r, 0) = future.v100_ms[k];
            X(r, 1) = std::sin(dir);
            X(r, 2) = std::cos(dir);
            X(r, 3) = future.temperature_c[k];
            X(r, 4) = future.pressure_hpa[k];
        }
        const Eigen::VectorXd y = model_.predict(X);
        return {y.data(), y.data() + y.size()};
    }
    nlohmann::json to_json() const override {
        auto j = model_.to_json();
        j["schema_version"] = kModelSchemaVersion;
        j["model_type"] = "mlp";
        return j;
    }
    const MlpRegressor& model() const { return model_; }

private:
    MlpRegressor model_;
};

class ArxForecaster : public Forecaster {
public:
    explicit ArxForecaster(ArxModel m) : model_(std::move(m)) {}
    std::string name() const override { return "arx"; }
    bool autoregressive() const override { return true; }
    std::vector<double> forecast(const AlignedDataset* window, const CovariateFrame& future) const override {
        if (window == nullptr)
            throw ParameterError("ARX forecasts need a past window of " + std::to_string(model_.max_lag()) +
                                 " rows of measured power");
        return predict_arx(model_, *window, future);
    }
    nlohmann::json to_json() const override {
        auto j = windcurve::to_json(model_);
        j["schema_version"] = kModelSchemaVersion;
        j["model_type"] = "arx";
        return j;
    }
    const ArxModel& model() const { return model_; }

private:
    ArxModel model_;
};

inline const std::vector<std::string>& known_models() {
    static const std::vector<std::string> names = {"autowp", "oem", "mlp", "arx"};
    return names;
}

inline bool is_static_model(const std::string& name) { return name != "arx"; }
inline bool is_stochastic_model(const std::string& name) { return name == "mlp"; }

inline void require_known_model(const std::string& name) {
    for (const auto& n : known_models())
        if (n == name) return;
    throw ConfigError("unknown model '" + name + "' (valid: autowp, oem, mlp, arx)");
}

enum class FitWind { Forecast, Hub };

struct AutoWpConfig {
    std::size_t pool_size = kDefaultPoolSize;
    ConstraintMode mode = ConstraintMode::Simplex;
    double alpha = kAlphaOnshore;
    FitWind fit_wind = FitWind::Forecast;  // height-corrected forecast or measured hub wind
};

struct ModelSuiteConfig {
    AutoWpConfig autowp;
    MlpConfig mlp;
    ArxConfig arx;
    NightWindow night;
};

// Fits the height model on the training rows (train + hold-out).
inline HeightCorrectionModel fit_height(const AlignedDataset& ds, double alpha) {
    const auto rows = ds.rows_with({Role::Train, Role::Holdout});
    std::vector<double> hub, fc;
    hub.reserve(rows.size());
    fc.reserve(rows.size());
    for (auto r : rows) {
        hub.push_back(ds.hub_wind_ms[r]);
        fc.push_back(ds.v100_ms[r]);
    }
    return fit_height_model(hub, fc, alpha);
}

inline AutoWpFit fit_autowp(const AlignedDataset& ds, const std::vector<NormalizedPowerCurve>& library,
                            const AutoWpConfig& cfg) {
    const auto pool = select_pool(library, cfg.pool_size);
    const auto height = fit_height(ds, cfg.alpha);
    const auto rows = ds.rows_with({Role::Train, Role::Holdout});
    std::vector<double> v, y;
    v.reserve(rows.size());
    y.reserve(rows.size());
    for (auto r : rows) {
        v.push_back(cfg.fit_wind == FitWind::Hub ? ds.hub_wind_ms[r] : height.correct(ds.v100_ms[r]));
        y.push_back(ds.power_kw[r]);
    }
    return fit_autowp(pool, v, y, ds.peak_rating_kw, cfg.mode, height);
}

inline MlpRegressor fit_mlp(const AlignedDataset& ds, const MlpConfig& cfg, std::uint64_t seed,
                            MlpFitReport* report = nullptr) {
    const auto [Xt, yt] = mlp_design(ds, ds.rows_with({Role::Train}));
    const auto [Xh, yh] = mlp_design(ds, ds.rows_with({Role::Holdout}));
    return fit_mlp(Xt, yt, Xh, yh, cfg, seed, report);
}

// Fits one model on a dataset already processed by apply_training_strategy.
inline std::unique_ptr<Forecaster> fit_forecaster(const std::string& model, const AlignedDataset& ds,
                                                  const std::vector<NormalizedPowerCurve>& library,
                                                  const PowerCurve& oem, const ModelSuiteConfig& cfg,
                                                  std::uint64_t seed) {
    require_known_model(model);
    if (model == "autowp") return std::make_unique<AutoWpForecaster>(fit_autowp(ds, library, cfg.autowp).model);
    if (model == "oem") return std::make_unique<OemCurveForecaster>(oem, fit_height(ds, cfg.autowp.alpha));
    if (model == "mlp") return std::make_unique<MlpForecaster>(fit_mlp(ds, cfg.mlp, seed));
    return std::make_unique<ArxForecaster>(fit_arx(ds, cfg.arx, cfg.night));
}

// Restores a forecaster from its JSON document.
inline std::unique_ptr<Forecaster> forecaster_from_json(const nlohmann::json& j,
                                                        const std::vector<NormalizedPowerCurve>* library = nullptr) {
    if (!j.is_object() || !j.contains("model_type") || !j.at("model_type").is_string())
        throw SchemaError("model document lacks a model_type");
    if (!j.contains("schema_version") || j.at("schema_version") != kModelSchemaVersion)
        throw SchemaError("unsupported model schema version");
    const auto type = j.at("model_type").get<std::string>();
    if (type == "autowp") return std::make_unique<AutoWpForecaster>(ensemble_model_from_json(j, library));
    if (type == "mlp") return std::make_unique<MlpForecaster>(MlpRegressor::from_json(j));
    if (type == "arx") return std::make_unique<ArxForecaster>(arx_model_from_json(j));
    if (type == "oem") {
        std::vector<CurvePoint> pts;
        try {
            for (const auto& p : j.at("points")) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
            HeightCorrectionModel h{j.at("alpha_h").get<double>(), j.at("h_eff_m").get<double>(), kForecastHeight};
            return std::make_unique<OemCurveForecaster>(PowerCurve(j.at("curve_id").get<std::string>(), pts), h);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("malformed OEM model document: ") + e.what());
        }
    }
    throw SchemaError("unknown model_type '" + type + "'");
}

}  // namespace windcurve
