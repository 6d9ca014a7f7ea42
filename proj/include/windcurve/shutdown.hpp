#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windcurve/curves.hpp"
#include "windcurve/dataset.hpp"
#include "windcurve/error.hpp"
#include "windcurve/lof.hpp"
#include "windcurve/mask.hpp"
#include "windcurve/series.hpp"

namespace windcurve {

enum class HandlingStrategy { None, ExplanatoryVariables, Drop, Imputation, DropImputation };

inline const char* to_string(HandlingStrategy s) {
    switch (s) {
        case HandlingStrategy::None: return "none";
        case HandlingStrategy::ExplanatoryVariables: return "explanatory";
        case HandlingStrategy::Drop: return "drop";
        case HandlingStrategy::Imputation: return "imputation";
        case HandlingStrategy::DropImputation: return "drop_imputation";
    }
    return "none";
}

inline HandlingStrategy strategy_from_string(const std::string& s) {
    for (auto st : {HandlingStrategy::None, HandlingStrategy::ExplanatoryVariables, HandlingStrategy::Drop,
                    HandlingStrategy::Imputation, HandlingStrategy::DropImputation})
        if (s == to_string(st)) return st;
    throw ConfigError("unknown shutdown strategy '" + s +
                      "' (valid: none, explanatory, drop, imputation, drop_imputation)");
}

inline constexpr double kDefaultCutIn = 2.5;              // m/s
inline constexpr double kDefaultCutInPowerShare = 0.005;  // of peak rating
inline constexpr std::size_t kDefaultLofNeighbors = 20;
inline constexpr double kDefaultLofThreshold = 1.5;

enum class DetectionMode { Rule, Lof, Combined };

struct DetectionConfig {
    double v_cut_in_ms = kDefaultCutIn;
    double p_cut_in_kw = kMissing;  // NaN: 0.5 % of the peak rating
    std::size_t lof_k = kDefaultLofNeighbors;
    double lof_threshold = kDefaultLofThreshold;
    DetectionMode mode = DetectionMode::Combined;

    double cut_in_power(double peak_rating_kw) const {
        return is_missing(p_cut_in_kw) ? kDefaultCutInPowerShare * peak_rating_kw : p_cut_in_kw;
    }
};

// Rule: wind above cut-in speed while power stays below cut-in power.
inline ShutdownMask rule_based_flags(std::span<const Timestamp> ts, std::span<const double> hub_ms,
                                     std::span<const double> power_kw, double v_cut_in,
                                     double p_cut_in) {
    if (ts.size() != hub_ms.size() || ts.size() != power_kw.size())
        throw MisalignedError("rule-based detection needs aligned wind and power");
    ShutdownMask m{{ts.begin(), ts.end()}, std::vector<MaskFlag>(ts.size(), MaskFlag::Normal), "rule"};
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (hub_ms[i] > v_cut_in && power_kw[i] < p_cut_in) m.flags[i] = MaskFlag::RuleShutdown;
    return m;
}

inline ShutdownMask rule_based_flags(const HubWindSeries& hub, const PowerSeries& power,
                                     double v_cut_in, double p_cut_in) {
    if (hub.timestamps() != power.timestamps())
        throw MisalignedError("hub wind and power series are not aligned");
    return rule_based_flags(hub.timestamps(), hub.values(), power.values(), v_cut_in, p_cut_in);
}

inline ShutdownMask rule_based_flags(const AlignedDataset& ds, const DetectionConfig& cfg) {
    return rule_based_flags(ds.timestamps, ds.hub_wind_ms, ds.power_kw, cfg.v_cut_in_ms,
                            cfg.cut_in_power(ds.peak_rating_kw));
}

// LOF reference set in the (hub wind, power / rating) plane.
inline LofModel fit_lof(const AlignedDataset& ds, std::span<const std::size_t> rows, std::size_t k) {
    if (!(ds.peak_rating_kw > 0)) throw ParameterError("LOF features need the peak rating");
    std::vector<Point2> pts;
    pts.reserve(rows.size());
    for (auto r : rows)
        if (!is_missing(ds.hub_wind_ms[r]) && !is_missing(ds.power_kw[r]))
            pts.push_back({ds.hub_wind_ms[r], ds.power_kw[r] / ds.peak_rating_kw});
    return LofModel(pts, k);
}

// Flags rows whose LOF against `model` exceeds the threshold. Rows in
// `reference_rows` were the model's reference points and are scored
// in-sample (self excluded); all other rows are scored as new points.
inline ShutdownMask lof_flags(const AlignedDataset& ds, const LofModel& model, double threshold,
                              std::span<const std::size_t> reference_rows = {}) {
    ShutdownMask m = ShutdownMask::empty(ds.timestamps, "lof");
    std::vector<double> in_sample;
    if (!reference_rows.empty()) in_sample = model.training_scores();
    std::vector<int> ref_slot(ds.size(), -1);
    {
        std::size_t slot = 0;
        for (auto r : reference_rows) {
            if (is_missing(ds.hub_wind_ms[r]) || is_missing(ds.power_kw[r])) continue;
            ref_slot[r] = static_cast<int>(slot++);
        }
        if (!reference_rows.empty() && slot != model.size())
            throw MisalignedError("reference rows do not match the LOF model");
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (is_missing(ds.hub_wind_ms[i]) || is_missing(ds.power_kw[i])) continue;
        const double s = ref_slot[i] >= 0 ? in_sample[static_cast<std::size_t>(ref_slot[i])]
                                          : model.score({ds.hub_wind_ms[i], ds.power_kw[i] / ds.peak_rating_kw});
        if (s > threshold) m.flags[i] = MaskFlag::LofOutlier;
    }
    return m;
}

// Fits on the training rows (train + hold-out) and flags every row.
inline ShutdownMask lof_flags(const AlignedDataset& ds, std::size_t k, double threshold) {
    const auto rows = ds.rows_with({Role::Train, Role::Holdout});
    const auto model = fit_lof(ds, rows, k);
    return lof_flags(ds, model, threshold, rows);
}

// Union of two masks; rows flagged by both carry MaskFlag::Combined.
inline ShutdownMask combine(const ShutdownMask& a, const ShutdownMask& b) {
    if (a.timestamps != b.timestamps) throw MisalignedError("masks cover different timestamps");
    ShutdownMask out{a.timestamps, std::vector<MaskFlag>(a.size()), {}};
    for (std::size_t i = 0; i < a.size(); ++i) out.flags[i] = a.flags[i] | b.flags[i];
    if (a.source == b.source || b.source == "none")
        out.source = a.source;
    else if (a.source == "none")
        out.source = b.source;
    else
        out.source = a.source + "+" + b.source;
    return out;
}

inline ShutdownMask detect(const AlignedDataset& ds, const DetectionConfig& cfg) {
    if (ds.size() == 0) throw ParameterError("cannot detect shutdowns in an empty dataset");
    if (cfg.mode == DetectionMode::Rule) return rule_based_flags(ds, cfg);
    auto lof = lof_flags(ds, cfg.lof_k, cfg.lof_threshold);
    if (cfg.mode == DetectionMode::Lof) return lof;
    return combine(rule_based_flags(ds, cfg), lof);
}

namespace detail {

inline void impute_flagged(AlignedDataset& ds, const ShutdownMask& mask, const PowerCurve& oem,
                           std::span<const std::size_t> rows) {
    for (auto r : rows) {
        if (!mask.flagged(r)) continue;
        if (is_missing(ds.hub_wind_ms[r]))
            throw ImputationError("hub wind missing at " + format_iso8601(ds.timestamps[r]) +
                                  "; cannot impute theoretical power");
        ds.power_kw[r] = oem(ds.hub_wind_ms[r]);
    }
}

inline void append_explanatory(AlignedDataset& ds, const ShutdownMask& mask, const PowerCurve& oem,
                               const NightWindow& night) {
    ExplanatoryColumns e;
    e.shutdown_label.resize(ds.size());
    e.theoretical_power_kw.resize(ds.size());
    e.night.resize(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        e.shutdown_label[i] = mask.flagged(i) ? 1.0 : 0.0;
        e.theoretical_power_kw[i] = oem(ds.hub_wind_ms[i]);
        e.night[i] = night_indicator(ds.timestamps[i], night, ds.calendar_config);
    }
    ds.explanatory = std::move(e);
}

}  // namespace detail

// Model-design side of shutdown handling. Test rows are never modified.
inline AlignedDataset apply_training_strategy(const AlignedDataset& ds, const ShutdownMask& mask,
                                              HandlingStrategy strategy, const PowerCurve& oem,
                                              const NightWindow& night = {}) {
    require_aligned(mask, ds.timestamps);
    switch (strategy) {
        case HandlingStrategy::None:
            return ds;
        case HandlingStrategy::ExplanatoryVariables: {
            AlignedDataset out = ds;
            out.mask = mask;
            detail::append_explanatory(out, mask, oem, night);
            return out;
        }
        case HandlingStrategy::Drop:
        case HandlingStrategy::DropImputation: {
            std::vector<std::size_t> keep;
            keep.reserve(ds.size());
            for (std::size_t i = 0; i < ds.size(); ++i)
                if (ds.roles[i] == Role::Test || !mask.flagged(i)) keep.push_back(i);
            AlignedDataset with_mask = ds;
            with_mask.mask = mask;
            return with_mask.select(keep);
        }
        case HandlingStrategy::Imputation: {
            AlignedDataset out = ds;
            out.mask = mask;
            detail::impute_flagged(out, mask, oem, out.rows_with({Role::Train, Role::Holdout}));
            return out;
        }
    }
    return ds;
}

// Operation-time handling of the past-horizon window available at a forecast
// origin. Rows are never removed, so Drop acts like None here.
inline AlignedDataset apply_operation_strategy(const AlignedDataset& window, const ShutdownMask& mask,
                                               HandlingStrategy strategy, const PowerCurve& oem,
                                               std::size_t past_horizon = kStepsPerDay,
                                               const NightWindow& night = {}) {
    if (window.size() != past_horizon)
        throw ParameterError("past-horizon window must hold exactly " + std::to_string(past_horizon) +
                             " rows, got " + std::to_string(window.size()));
    require_aligned(mask, window.timestamps);
    AlignedDataset out = window;
    out.mask = mask;
    switch (strategy) {
        case HandlingStrategy::None:
        case HandlingStrategy::Drop:
            break;
        case HandlingStrategy::ExplanatoryVariables:
            detail::append_explanatory(out, mask, oem, night);
            break;
        case HandlingStrategy::Imputation:
        case HandlingStrategy::DropImputation: {
            std::vector<std::size_t> all(out.size());
            for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
            detail::impute_flagged(out, mask, oem, all);
            break;
        }
    }
    return out;
}

}  // namespace windcurve
