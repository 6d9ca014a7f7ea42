#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "windcurve/curves.hpp"
#include "windcurve/error.hpp"
#include "windcurve/height.hpp"
#include "windcurve/nnls.hpp"
#include "windcurve/series.hpp"

namespace windcurve {

// Simplex: weights in [0,1] summing to one, output re-scaled by the new
// turbine's rating. Relaxed: non-negative weights fitted directly in kW, so
// no rating is needed at prediction time.
enum class ConstraintMode { Simplex, Relaxed };

inline const char* to_string(ConstraintMode m) {
    return m == ConstraintMode::Simplex ? "simplex" : "relaxed";
}

inline ConstraintMode constraint_mode_from_string(const std::string& s) {
    if (s == "simplex") return ConstraintMode::Simplex;
    if (s == "relaxed") return ConstraintMode::Relaxed;
    throw SchemaError("constraint mode must be 'simplex' or 'relaxed', got '" + s + "'");
}

struct EnsembleModel {
    CurvePool pool;
    std::vector<double> weights;
    double peak_rating_kw = 0.0;
    HeightCorrectionModel height;
    ConstraintMode mode = ConstraintMode::Simplex;

    // Weighted sum of pool curves at an effective (hub-height) wind speed.
    // Normalized in simplex mode, kW in relaxed mode.
    double ensemble_value(double v_eff) const {
        double acc = 0.0;
        for (std::size_t n = 0; n < pool.curves.size(); ++n)
            if (weights[n] != 0.0) acc += weights[n] * pool.curves[n](v_eff);
        return acc;
    }

    double predict_normalized(double v_eff) const {
        const double e = ensemble_value(v_eff);
        return mode == ConstraintMode::Simplex ? e : e / peak_rating_kw;
    }

    // Power in kW at an effective wind speed.
    double power_at(double v_eff) const {
        const double e = ensemble_value(v_eff);
        return mode == ConstraintMode::Simplex ? e * peak_rating_kw : e;
    }

    // Raw (unclipped) forecast from 100 m wind speed forecasts.
    std::vector<double> predict(std::span<const double> v100) const {
        std::vector<double> out(v100.size());
        const double f = height.factor();
        for (std::size_t k = 0; k < v100.size(); ++k) out[k] = power_at(v100[k] * f);
        return out;
    }

    PowerSeries predict(const std::vector<Timestamp>& ts, std::span<const double> v100,
                        std::int64_t period_s = kQuarterHour) const {
        return PowerSeries(ts, predict(v100), peak_rating_kw, period_s);
    }
};

struct FitReport {
    double mse = 0.0;                // on normalized power, final weights
    std::vector<double> weights;
    int iterations = 0;
    double nnls_objective = 0.0;     // ||A w - b||^2 before post-normalization
    double uniform_objective = 0.0;  // same objective at w = 1/N
    bool uniform_fallback = false;   // NNLS returned zero; uniform weights used
    std::size_t rows = 0;
};

struct AutoWpFit {
    EnsembleModel model;
    FitReport report;
};

// Fits ensemble weights by non-negative least squares on the design matrix
// A[k][n] = curve_n(v_input[k]). In simplex mode the target is y / rating and
// the NNLS solution is divided by its sum afterwards.
inline AutoWpFit fit_autowp(const CurvePool& pool, std::span<const double> v_input,
                            std::span<const double> y_kw, double peak_rating_kw,
                            ConstraintMode mode = ConstraintMode::Simplex,
                            const HeightCorrectionModel& height = {}) {
    if (pool.curves.empty()) throw FitError("curve pool is empty");
    if (!(peak_rating_kw > 0)) throw FitError("peak rating of the new turbine must be positive");
    if (v_input.size() != y_kw.size()) throw MisalignedError("wind input and power differ in length");

    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < y_kw.size(); ++k)
        if (!is_missing(v_input[k]) && !is_missing(y_kw[k])) rows.push_back(k);
    if (rows.empty()) throw FitError("no complete training rows");

    const auto m = static_cast<Eigen::Index>(rows.size());
    const auto n = static_cast<Eigen::Index>(pool.curves.size());
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd b(m);
    const double target_scale = mode == ConstraintMode::Simplex ? 1.0 / peak_rating_kw : 1.0;
    for (Eigen::Index r = 0; r < m; ++r) {
        const double v = v_input[rows[static_cast<std::size_t>(r)]];
        for (Eigen::Index c = 0; c < n; ++c) A(r, c) = pool.curves[static_cast<std::size_t>(c)](v);
        b(r) = y_kw[rows[static_cast<std::size_t>(r)]] * target_scale;
    }
    if (mode == ConstraintMode::Relaxed) A *= peak_rating_kw;

    const auto sol = nnls(A, b);
    FitReport report;
    report.iterations = sol.iterations;
    report.nnls_objective = sol.objective;
    report.rows = rows.size();
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    report.uniform_objective = (A * uniform - b).squaredNorm();

    Eigen::VectorXd w = sol.x;
    if (mode == ConstraintMode::Simplex) {
        const double total = w.sum();
        if (!(total > 0)) {
            w = uniform;
            report.uniform_fallback = true;
        } else {
            w /= total;
        }
    } else {
        // weights were fitted against curves scaled to the new rating
        w *= peak_rating_kw;
    }

    AutoWpFit out;
    out.model.pool = pool;
    out.model.weights.assign(w.data(), w.data() + w.size());
    out.model.peak_rating_kw = peak_rating_kw;
    out.model.height = height;
    out.model.mode = mode;

    double sse = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const double e = out.model.predict_normalized(v_input[rows[r]]) - y_kw[rows[r]] / peak_rating_kw;
        sse += e * e;
    }
    report.mse = sse / static_cast<double>(rows.size());
    report.weights = out.model.weights;
    out.report = std::move(report);
    return out;
}

inline nlohmann::json to_json(const NormalizedPowerCurve& c) {
    return {{"id", c.id}, {"grid_start", c.grid_start}, {"grid_step", c.grid_step},
            {"values", c.values}};
}

namespace detail {

template <class T>
T require(const nlohmann::json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("field '") + key + "' has the wrong type: " + e.what());
    }
}

}  // namespace detail

inline NormalizedPowerCurve normalized_curve_from_json(const nlohmann::json& j) {
    NormalizedPowerCurve c;
    c.id = detail::require<std::string>(j, "id");
    c.grid_start = detail::require<double>(j, "grid_start");
    c.grid_step = detail::require<double>(j, "grid_step");
    c.values = detail::require<std::vector<double>>(j, "values");
    if (c.values.empty() || !(c.grid_step > 0)) throw SchemaError("curve '" + c.id + "' is malformed");
    return c;
}

inline constexpr int kModelSchemaVersion = 1;

// {pool_ids, grid_step, weights, peak_rating_kw, alpha_h, h_eff_m, mode}
// plus the pool curves themselves so a model file is self-contained.
inline nlohmann::json to_json(const EnsembleModel& m) {
    nlohmann::json curves = nlohmann::json::array();
    for (const auto& c : m.pool.curves) curves.push_back(to_json(c));
    return {{"schema_version", kModelSchemaVersion},
            {"model_type", "autowp"},
            {"pool_ids", m.pool.ids()},
            {"grid_step", m.pool.curves.empty() ? kDefaultGridStep : m.pool.curves.front().grid_step},
            {"weights", m.weights},
            {"peak_rating_kw", m.peak_rating_kw},
            {"alpha_h", m.height.alpha},
            {"h_eff_m", m.height.effective_height_m},
            {"mode", to_string(m.mode)},
            {"pool_curves", std::move(curves)}};
}

// `library` resolves pool ids when the document carries no pool curves.
inline EnsembleModel ensemble_model_from_json(const nlohmann::json& j,
                                              const std::vector<NormalizedPowerCurve>* library = nullptr) {
    if (j.contains("model_type") && j.at("model_type") != "autowp")
        throw SchemaError("not an autowp model document");
    EnsembleModel m;
    const auto ids = detail::require<std::vector<std::string>>(j, "pool_ids");
    detail::require<double>(j, "grid_step");
    m.weights = detail::require<std::vector<double>>(j, "weights");
    m.peak_rating_kw = detail::require<double>(j, "peak_rating_kw");
    m.height.alpha = detail::require<double>(j, "alpha_h");
    m.height.effective_height_m = detail::require<double>(j, "h_eff_m");
    m.mode = constraint_mode_from_string(detail::require<std::string>(j, "mode"));
    if (j.contains("pool_curves")) {
        for (const auto& c : j.at("pool_curves")) m.pool.curves.push_back(normalized_curve_from_json(c));
    } else if (library) {
        for (const auto& id : ids) {
            auto it = std::find_if(library->begin(), library->end(),
                                   [&](const auto& c) { return c.id == id; });
            if (it == library->end()) throw SchemaError("pool curve '" + id + "' not in library");
            m.pool.curves.push_back(*it);
        }
    } else {
        throw SchemaError("model carries no pool curves and no library was given");
    }
    if (m.pool.ids() != ids) throw SchemaError("pool_ids do not match the pool curves");
    if (m.weights.size() != m.pool.size()) throw SchemaError("weights and pool differ in size");
    for (double w : m.weights)
        if (!std::isfinite(w) || w < 0) throw SchemaError("weights must be finite and non-negative");
    if (!(m.peak_rating_kw > 0) || !(m.height.alpha > 0) || !(m.height.effective_height_m > 0))
        throw SchemaError("rating, alpha_h and h_eff_m must be positive");
    return m;
}

}  // namespace windcurve
