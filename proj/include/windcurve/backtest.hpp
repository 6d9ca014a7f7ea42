#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "windcurve/csv.hpp"
#include "windcurve/dataset.hpp"
#include "windcurve/metrics.hpp"
#include "windcurve/models.hpp"
#include "windcurve/postprocess.hpp"
#include "windcurve/shutdown.hpp"

namespace windcurve {

struct BacktestConfig {
    int horizon = kStepsPerDay;
    int past_horizon = kStepsPerDay;
    int restarts = 5;  // runs of stochastic models
    std::uint64_t seed = 0;
    int jobs = 1;
    bool timing = false;  // record wall-clock runtimes (makes reports non-reproducible)
    double v_cut_out_ms = kDefaultCutOut;
};

struct BacktestRequest {
    std::string turbine_id;
    std::vector<std::string> models;
    std::vector<HandlingStrategy> strategies;
    std::vector<Scenario> scenarios = {Scenario::ConsiderShutdowns, Scenario::DisregardShutdowns};
    ModelSuiteConfig suite;
    BacktestConfig backtest;
};

struct ReportRow {
    std::string turbine_id;
    std::string model;
    std::string strategy;
    std::string scenario;
    double nmae_mean = 0, nmae_std = 0;
    double nrmse_mean = 0, nrmse_std = 0;
    std::size_t n_samples = 0;
    std::optional<double> runtime_s;
};

struct ForecastRecord {
    Timestamp timestamp;
    std::string model;
    std::string strategy;
    double forecast_kw;
    double measured_kw;
    bool flagged;
};

struct SkippedOrigin {
    Timestamp origin;
    std::string reason;
};

struct EvaluationReport {
    std::string turbine_id;
    std::uint64_t seed = 0;
    std::size_t origins = 0;
    std::vector<SkippedOrigin> skipped;
    std::vector<ReportRow> rows;
    std::vector<ForecastRecord> forecasts;  // first run of every model/strategy cell
};

struct OriginPlan {
    std::vector<std::size_t> rows;  // dataset row of each origin
    std::vector<SkippedOrigin> skipped;
};

// Origins at local midnight inside the test period whose full horizon and
// past horizon are present.
inline OriginPlan plan_origins(const AlignedDataset& ds, const BacktestConfig& cfg) {
    if (cfg.horizon < 1 || cfg.past_horizon < 1) throw ParameterError("horizon and past horizon must be >= 1");
    OriginPlan plan;
    const auto H = static_cast<std::size_t>(cfg.horizon);
    const auto H1 = static_cast<std::size_t>(cfg.past_horizon);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (ds.roles[i] != Role::Test) continue;
        if (calendar_position(ds.timestamps[i], ds.calendar_config).minute_of_day != 0) continue;
        const Timestamp t = ds.timestamps[i];
        const bool horizon_ok = i + H <= ds.size() && ds.roles[i + H - 1] == Role::Test &&
                                ds.timestamps[i + H - 1] - t == static_cast<std::int64_t>(H - 1) * ds.period_s;
        if (!horizon_ok) {
            plan.skipped.push_back({t, "incomplete forecast horizon"});
            continue;
        }
        const bool past_ok = i >= H1 && t - ds.timestamps[i - H1] == static_cast<std::int64_t>(H1) * ds.period_s;
        if (!past_ok) {
            plan.skipped.push_back({t, "insufficient past data"});
            continue;
        }
        plan.rows.push_back(i);
    }
    return plan;
}

// Past-horizon window before `origin_row`, processed for operation. Only
// rows strictly before the origin are read.
inline AlignedDataset operation_window(const AlignedDataset& ds, const ShutdownMask& mask,
                                       std::size_t origin_row, HandlingStrategy strategy,
                                       const PowerCurve& oem, std::size_t past_horizon,
                                       const NightWindow& night = {}) {
    if (origin_row < past_horizon) throw ParameterError("not enough rows before the origin");
    std::vector<std::size_t> rows(past_horizon);
    for (std::size_t k = 0; k < past_horizon; ++k) rows[k] = origin_row - past_horizon + k;
    AlignedDataset window = ds.select(rows);
    window.mask.reset();
    window.explanatory.reset();
    ShutdownMask m{window.timestamps, {}, mask.source};
    for (auto r : rows) m.flags.push_back(mask.flags[r]);
    return apply_operation_strategy(window, m, strategy, oem, past_horizon, night);
}

// Clipped day-ahead forecast at one origin. Measurements at or after the
// origin are never read.
inline std::vector<double> forecast_origin(const Forecaster& f, const AlignedDataset& ds,
                                           const ShutdownMask& mask, std::size_t origin_row,
                                           HandlingStrategy strategy, const PowerCurve& oem,
                                           const HeightCorrectionModel& height, const BacktestConfig& cfg,
                                           const NightWindow& night = {}) {
    const auto H = static_cast<std::size_t>(cfg.horizon);
    const auto future = CovariateFrame::from(ds, origin_row, H);
    std::vector<double> raw;
    if (f.autoregressive()) {
        const auto window = operation_window(ds, mask, origin_row, strategy, oem,
                                             static_cast<std::size_t>(cfg.past_horizon), night);
        raw = f.forecast(&window, future);
    } else {
        raw = f.forecast(nullptr, future);
    }
    const auto v_eff = correct_forecast(future.v100_ms, height);
    return clip_forecast(raw, v_eff, {ds.peak_rating_kw, cfg.v_cut_out_ms});
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t run_seed(std::uint64_t seed, const std::string& model, HandlingStrategy s, int run) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(fnv1a(model)), static_cast<std::uint32_t>(s),
                      static_cast<std::uint32_t>(run)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (std::uint64_t{out[0]} << 32) | out[1];
}

inline double round_sig(double v, int digits = 9) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return std::strtod(buf, nullptr);
}

inline std::pair<double, double> mean_sample_std(const std::vector<double>& xs) {
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, jobs));
    if (threads == 1 || n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

// Rolling day-ahead evaluation. `ds` is the split dataset with raw
// measurements and `mask` the detected shutdown mask for all of its rows.
// Static curve models are trained with the drop strategy only; the
// autoregressive model runs once per requested strategy.
inline EvaluationReport backtest(const AlignedDataset& ds, const ShutdownMask& mask,
                                 const std::vector<NormalizedPowerCurve>& library, const PowerCurve& oem,
                                 const BacktestRequest& req) {
    require_aligned(mask, ds.timestamps);
    const auto& cfg = req.backtest;
    if (cfg.restarts < 1) throw ParameterError("restart count must be >= 1");
    if (req.models.empty()) throw ConfigError("no models selected");
    if (req.scenarios.empty()) throw ConfigError("no scenarios selected");
    for (const auto& m : req.models) require_known_model(m);

    const auto plan = plan_origins(ds, cfg);
    if (plan.rows.empty()) throw ParameterError("test period contains no complete forecast day");

    struct Cell {
        std::string model;
        HandlingStrategy strategy;
        int runs;
    };
    std::vector<Cell> cells;
    for (const auto& m : req.models) {
        if (is_static_model(m)) {
            cells.push_back({m, HandlingStrategy::Drop, is_stochastic_model(m) ? cfg.restarts : 1});
            continue;
        }
        if (req.strategies.empty()) throw ConfigError("no shutdown strategies selected for '" + m + "'");
        for (auto s : req.strategies) cells.push_back({m, s, is_stochastic_model(m) ? cfg.restarts : 1});
    }

    std::map<HandlingStrategy, AlignedDataset> training;
    for (const auto& c : cells)
        if (!training.contains(c.strategy))
            training.emplace(c.strategy, apply_training_strategy(ds, mask, c.strategy, oem, req.suite.night));

    struct Task {
        std::size_t cell;
        int run;
        std::vector<double> forecast;
        double seconds = 0;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (int r = 0; r < cells[c].runs; ++r) tasks.push_back({c, r, {}, 0});

    detail::parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
        auto& task = tasks[i];
        const auto& cell = cells[task.cell];
        const auto& train = training.at(cell.strategy);
        const auto start = std::chrono::steady_clock::now();
        const auto model = fit_forecaster(cell.model, train, library, oem, req.suite,
                                          detail::run_seed(cfg.seed, cell.model, cell.strategy, task.run));
        const auto height = fit_height(train, req.suite.autowp.alpha);
        task.forecast.reserve(plan.rows.size() * static_cast<std::size_t>(cfg.horizon));
        for (auto origin : plan.rows) {
            const auto y = forecast_origin(*model, ds, mask, origin, cell.strategy, oem, height, cfg,
                                           req.suite.night);
            task.forecast.insert(task.forecast.end(), y.begin(), y.end());
        }
        task.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    });

    std::vector<std::size_t> eval_rows;
    for (auto origin : plan.rows)
        for (std::size_t k = 0; k < static_cast<std::size_t>(cfg.horizon); ++k) eval_rows.push_back(origin + k);
    std::vector<double> measured;
    std::vector<MaskFlag> flags;
    for (auto r : eval_rows) {
        measured.push_back(ds.power_kw[r]);
        flags.push_back(mask.flags[r]);
    }

    EvaluationReport report;
    report.turbine_id = req.turbine_id;
    report.seed = cfg.seed;
    report.origins = plan.rows.size();
    report.skipped = plan.skipped;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        std::vector<const Task*> runs;
        for (const auto& t : tasks)
            if (t.cell == c) runs.push_back(&t);
        for (auto scenario : req.scenarios) {
            std::vector<double> mae, rmse, secs;
            std::size_t samples = 0;
            for (const auto* t : runs) {
                const auto m = evaluate_scenario(t->forecast, measured, flags, scenario);
                mae.push_back(m.nmae);
                rmse.push_back(m.nrmse);
                secs.push_back(t->seconds);
                samples = m.samples;
            }
            ReportRow row;
            row.turbine_id = req.turbine_id;
            row.model = cells[c].model;
            row.strategy = to_string(cells[c].strategy);
            row.scenario = to_string(scenario);
            std::tie(row.nmae_mean, row.nmae_std) = detail::mean_sample_std(mae);
            std::tie(row.nrmse_mean, row.nrmse_std) = detail::mean_sample_std(rmse);
            row.n_samples = samples;
            if (cfg.timing) row.runtime_s = detail::mean_sample_std(secs).first;
            report.rows.push_back(row);
        }
        const Task& first = *runs.front();
        for (std::size_t k = 0; k < eval_rows.size(); ++k)
            report.forecasts.push_back({ds.timestamps[eval_rows[k]], cells[c].model, to_string(cells[c].strategy),
                                        first.forecast[k], measured[k], is_flagged(flags[k])});
    }
    return report;
}

inline nlohmann::json to_json(const ReportRow& r) {
    using detail::round_sig;
    return {{"turbine_id", r.turbine_id},
            {"model", r.model},
            {"strategy", r.strategy},
            {"scenario", r.scenario},
            {"nmae_mean", round_sig(r.nmae_mean)},
            {"nmae_std", round_sig(r.nmae_std)},
            {"nrmse_mean", round_sig(r.nrmse_mean)},
            {"nrmse_std", round_sig(r.nrmse_std)},
            {"n_samples", r.n_samples},
            {"runtime_s", r.runtime_s ? nlohmann::json(round_sig(*r.runtime_s)) : nlohmann::json(nullptr)}};
}

inline nlohmann::json to_json(const EvaluationReport& rep) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows) rows.push_back(to_json(r));
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& s : rep.skipped) skipped.push_back({{"origin", format_iso8601(s.origin)}, {"reason", s.reason}});
    return {{"schema_version", 1},
            {"turbine_id", rep.turbine_id},
            {"seed", rep.seed},
            {"origins", rep.origins},
            {"skipped_origins", skipped},
            {"results", rows}};
}

// Checks the structure of a report document; returns a description of the
// first problem, or nothing when the document is valid.
inline std::optional<std::string> validate_report(const nlohmann::json& j) {
    if (!j.is_object()) return "report is not an object";
    if (!j.contains("results") || !j["results"].is_array() || j["results"].empty())
        return "report lacks a non-empty results array";
    for (const auto& r : j["results"]) {
        for (auto key : {"turbine_id", "model", "strategy", "scenario"})
            if (!r.contains(key) || !r[key].is_string()) return std::string("result field '") + key + "' must be a string";
        for (auto key : {"nmae_mean", "nmae_std", "nrmse_mean", "nrmse_std"})
            if (!r.contains(key) || !r[key].is_number() || r[key].get<double>() < 0)
                return std::string("result field '") + key + "' must be a non-negative number";
        if (!r.contains("n_samples") || !r["n_samples"].is_number_unsigned() || r["n_samples"].get<std::size_t>() == 0)
            return "result field 'n_samples' must be a positive integer";
        if (!r.contains("runtime_s") || !(r["runtime_s"].is_null() || r["runtime_s"].is_number()))
            return "result field 'runtime_s' must be a number or null";
        if (r["nrmse_mean"].get<double>() + 1e-9 < r["nmae_mean"].get<double>())
            return "nrmse_mean below nmae_mean";
    }
    return std::nullopt;
}

inline std::string render_forecasts(const std::vector<ForecastRecord>& recs) {
    std::string out = "timestamp,model,strategy,forecast_kw,measured_kw,flagged\n";
    for (const auto& r : recs) {
        out += format_iso8601(r.timestamp);
        out += ',' + r.model + ',' + r.strategy + ',' + csv::format_number(r.forecast_kw) + ',' +
               csv::format_number(r.measured_kw) + ',' + (r.flagged ? "1" : "0") + '\n';
    }
    return out;
}

}  // namespace windcurve
