#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "run_config.hpp"

namespace windcurve::cli {

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Mask from the configured file when present, otherwise detected afresh.
inline ShutdownMask load_or_detect_mask(const RunConfig& c, const AlignedDataset& ds) {
    if (!c.mask_csv.empty() && fs::exists(c.resolve(c.mask_csv))) {
        auto m = csv::read_mask(c.resolve(c.mask_csv));
        require_aligned(m, ds.timestamps);
        spdlog::info("using shutdown mask {}", c.resolve(c.mask_csv).string());
        return m;
    }
    return detect(ds, c.detection);
}

inline nlohmann::json curve_json(const PowerCurve& c) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : c.points()) pts.push_back({p.v_ms, p.p_kw});
    return {{"id", c.id()}, {"points", pts}};
}

inline PowerCurve curve_from_json(const nlohmann::json& j) {
    std::vector<CurvePoint> pts;
    for (const auto& p : j.at("points")) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return PowerCurve(j.at("id").get<std::string>(), pts);
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
    fs::path config;
    fs::path out;
    std::optional<std::uint64_t> seed;
};

inline std::string render_truth(const SynthDataset& s) {
    std::string out = "timestamp,shutdown,category\n";
    for (std::size_t i = 0; i < s.truth.size(); ++i) {
        out += format_iso8601(s.truth.timestamps[i]);
        out += s.truth.flagged(i) ? ",1," : ",0,";
        out += to_string(s.categories[i]);
        out += '\n';
    }
    return out;
}

inline std::string render_curve(const PowerCurve& c) {
    std::string out = "v_ms,p_kw\n";
    for (const auto& p : c.points()) out += csv::format_number(p.v_ms) + ',' + csv::format_number(p.p_kw) + '\n';
    return out;
}

inline int cmd_generate(const GenerateOptions& o) {
    const auto preset_path = fs::absolute(o.config);
    const auto preset = read_json(preset_path);
    if (!preset.contains("generator")) throw ConfigError("preset lacks a 'generator' section");
    auto gen = synth_config_from_json(preset.at("generator"));
    if (o.seed) gen.seed = *o.seed;

    std::optional<CurveLibrary> lib;
    std::vector<NormalizedPowerCurve> normalized;
    if (preset.contains("curve_library")) {
        auto p = fs::path(preset.at("curve_library").get<std::string>());
        if (!p.is_absolute()) p = preset_path.parent_path() / p;
        if (!fs::exists(p)) throw IoError("curve library '" + p.string() + "' does not exist");
        lib = parse_curve_library(p);
        normalized = normalize_library(*lib);
    }
    const auto synth = generate(gen, lib ? &normalized : nullptr);
    spdlog::info("generated {} rows ({} days) with seed {}", synth.data.size(), gen.days, gen.seed);

    const fs::path out = o.out;
    fs::create_directories(out);
    csv::write_atomic(out / "energy.csv", csv::render_two_columns(synth.energy.timestamps(), synth.energy.values(), "energy_kwh"));
    csv::write_atomic(out / "hub_wind.csv", csv::render_two_columns(synth.hub_wind.timestamps(), synth.hub_wind.values(), "wind_ms"));
    csv::write_atomic(out / "weather.csv", csv::render_weather(synth.weather));
    csv::write_atomic(out / "truth_mask.csv", render_truth(synth));
    csv::write_atomic(out / "truth_curve.csv", render_curve(synth.true_curve));
    std::vector<std::string> files = {"energy.csv", "hub_wind.csv", "weather.csv", "truth_mask.csv", "truth_curve.csv"};

    nlohmann::json run = preset.value("run", nlohmann::json::object());
    run["energy_csv"] = "energy.csv";
    run["hub_wind_csv"] = "hub_wind.csv";
    run["weather_csv"] = "weather.csv";
    run["mask_csv"] = "mask.csv";
    run["peak_rating_kw"] = gen.peak_rating_kw;
    run["utc_offset_minutes"] = gen.utc_offset_minutes;
    run["seed"] = gen.seed;
    if (!run.contains("output_dir")) run["output_dir"] = ".";
    if (lib) {
        std::string lib_csv = "id,v_ms,p_kw\n";
        for (const auto& c : lib->curves)
            for (const auto& p : c.points())
                lib_csv += c.id() + ',' + csv::format_number(p.v_ms) + ',' + csv::format_number(p.p_kw) + '\n';
        csv::write_atomic(out / "curve_library.csv", lib_csv);
        files.push_back("curve_library.csv");
        run["curve_library"] = "curve_library.csv";
    }
    csv::write_atomic(out / "run_config.json", dump(run));
    files.push_back("run_config.json");

    std::size_t shut = synth.truth.flagged_count(), transitions = 0, regular = 0;
    for (auto c : synth.categories) {
        transitions += c == TruthCategory::Transition;
        regular += c == TruthCategory::Regular;
    }
    const nlohmann::json manifest = {
        {"generator", "windcurve synthgen"},
        {"seed", gen.seed},
        {"rows", synth.data.size()},
        {"start", format_iso8601(synth.energy.timestamps().front())},
        {"end", format_iso8601(synth.energy.timestamps().back())},
        {"truth_shutdown_steps", shut},
        {"truth_regular_steps", regular},
        {"truth_transition_steps", transitions},
        {"truth_shutdown_share", detail::round_sig(static_cast<double>(shut) / static_cast<double>(synth.truth.size()))},
        {"hub_height_m", gen.hub_height_m},
        {"terrain_alpha", gen.terrain_alpha},
        {"files", files}};
    csv::write_atomic(out / "manifest.json", dump(manifest));
    std::printf("wrote %zu rows to %s (truth shutdown share %.4f)\n", synth.data.size(), out.string().c_str(),
                static_cast<double>(shut) / static_cast<double>(synth.truth.size()));
    return 0;
}

// ---------------------------------------------------------------- detect

struct DetectOptions {
    fs::path config;
    std::optional<fs::path> out;
    std::optional<std::string> mode;
};

inline int cmd_detect(const DetectOptions& o) {
    auto c = load_run_config(o.config);
    if (o.mode) c.detection.mode = detection_mode_from_string(*o.mode);
    const auto ds = load_dataset(c);
    if (ds.size() == 0) throw ParameterError("dataset is empty");
    const auto mask = detect(ds, c.detection);
    const fs::path path = o.out ? *o.out : c.resolve(c.output_dir) / (c.mask_csv.empty() ? fs::path("mask.csv") : c.mask_csv);
    csv::write_atomic(path, csv::render_mask(mask));
    const double share = static_cast<double>(mask.flagged_count()) / static_cast<double>(mask.size());
    std::printf("flagged %zu of %zu steps (share %.4f), source %s\n", mask.flagged_count(), mask.size(), share,
                mask.source.c_str());
    return 0;
}

// ---------------------------------------------------------------- fit

struct ModelOptions {
    fs::path config;
    std::optional<std::string> models;
    std::optional<std::string> strategies;
    std::optional<std::string> scenarios;
    std::optional<std::uint64_t> seed;
    std::optional<fs::path> out;
    int jobs = 1;
    bool timing = false;
};

inline void apply_overrides(RunConfig& c, const ModelOptions& o) {
    if (o.models) {
        c.models = split_list(*o.models);
        for (const auto& m : c.models) require_known_model(m);
    }
    if (o.strategies) c.strategies = parse_strategies(split_list(*o.strategies));
    if (o.scenarios) c.scenarios = parse_scenarios(split_list(*o.scenarios));
    if (o.seed) {
        c.seed = *o.seed;
        c.backtest.seed = *o.seed;
    }
    c.backtest.jobs = o.jobs;
    c.backtest.timing = o.timing;
}

inline int cmd_fit(const ModelOptions& o) {
    auto c = load_run_config(o.config);
    apply_overrides(c, o);
    const auto ds = load_dataset(c);
    const auto lib = load_library(c);
    const auto normalized = normalize_library(lib);
    const auto oem = oem_curve(c, lib);
    const auto mask = load_or_detect_mask(c, ds);
    const fs::path out = o.out ? *o.out : c.resolve(c.output_dir);

    nlohmann::json report = {{"turbine_id", c.turbine_id}, {"seed", c.seed}, {"models", nlohmann::json::array()}};
    auto persist = [&](const std::string& file, nlohmann::json doc, const AlignedDataset& train) {
        const auto h = fit_height(train, c.suite.autowp.alpha);
        doc["seed"] = c.seed;
        doc["postprocess"] = {{"p_max_kw", c.peak_rating_kw}, {"v_cut_out_ms", c.backtest.v_cut_out_ms},
                              {"alpha_h", h.alpha}, {"h_eff_m", h.effective_height_m}};
        csv::write_atomic(out / "models" / file, dump(doc));
    };

    for (const auto& model : c.models) {
        std::vector<HandlingStrategy> strategies =
            is_static_model(model) ? std::vector<HandlingStrategy>{HandlingStrategy::Drop} : c.strategies;
        if (strategies.empty()) throw ConfigError("no shutdown strategies selected for '" + model + "'");
        for (auto s : strategies) {
            const auto train = apply_training_strategy(ds, mask, s, oem, c.suite.night);
            const std::string file = is_static_model(model) ? model + ".json" : model + "_" + to_string(s) + ".json";
            nlohmann::json entry = {{"model", model}, {"strategy", to_string(s)}, {"file", "models/" + file}};
            if (model == "autowp") {
                const auto fit = fit_autowp(train, normalized, c.suite.autowp);
                double sum = 0;
                for (double w : fit.model.weights) sum += w;
                entry["pool_ids"] = fit.model.pool.ids();
                entry["weights"] = fit.model.weights;
                entry["weight_sum"] = sum;
                entry["mse_normalized"] = fit.report.mse;
                entry["uniform_fallback"] = fit.report.uniform_fallback;
                entry["rows"] = fit.report.rows;
                entry["h_eff_m"] = fit.model.height.effective_height_m;
                persist(file, windcurve::to_json(fit.model), train);
                if (fit.report.uniform_fallback) spdlog::warn("autowp: NNLS returned zero weights; using uniform weights");
                if (fit.model.mode == ConstraintMode::Simplex)
                    std::printf("autowp: simplex weight sum %.6f\n", sum);
                else
                    std::printf("autowp: relaxed weight sum %.6f kW\n", sum);
            } else if (model == "mlp") {
                MlpFitReport mr;
                const auto net = fit_mlp(train, c.suite.mlp, detail::run_seed(c.seed, model, s, 0), &mr);
                entry["best_holdout_loss"] = mr.best_holdout_loss;
                entry["epochs"] = mr.epochs;
                persist(file, MlpForecaster(net).to_json(), train);
                std::printf("mlp: hold-out loss %.6f after %d epochs\n", mr.best_holdout_loss, mr.epochs);
            } else if (model == "oem") {
                const OemCurveForecaster f(oem, fit_height(train, c.suite.autowp.alpha));
                entry["curve_id"] = oem.id();
                persist(file, f.to_json(), train);
                std::printf("oem: curve %s, effective hub height %.3f m\n", oem.id().c_str(), f.height.effective_height_m);
            } else {
                const auto arx = fit_arx(train, c.suite.arx, c.suite.night);
                auto doc = ArxForecaster(arx).to_json();
                doc["operation"] = {{"strategy", to_string(s)},
                                    {"past_horizon", c.backtest.past_horizon},
                                    {"v_cut_in_ms", c.detection.v_cut_in_ms},
                                    {"p_cut_in_kw", c.detection.cut_in_power(c.peak_rating_kw)},
                                    {"oem_curve", curve_json(oem)},
                                    {"utc_offset_minutes", c.utc_offset_minutes}};
                entry["lag_coefficients"] = arx.lag_coefficients;
                persist(file, doc, train);
                std::printf("arx[%s]: intercept %.6f\n", to_string(s), arx.intercept);
            }
            report["models"].push_back(entry);
        }
    }
    csv::write_atomic(out / "fit_report.json", dump(report));
    return 0;
}

// ---------------------------------------------------------------- forecast

struct ForecastOptions {
    fs::path model;
    fs::path weather;
    std::string origin;
    std::optional<fs::path> history;
    std::optional<fs::path> mask;
    std::optional<fs::path> out;
};

// History file: timestamp,power_kw,wind_ms (measured power and hub wind).
inline AlignedDataset read_history(const fs::path& path, std::int64_t period_s) {
    const auto t = csv::read(path);
    const auto origin = path.string();
    const int ct = t.require_column("timestamp", origin);
    const int cp = t.require_column("power_kw", origin);
    const int cw = t.require_column("wind_ms", origin);
    AlignedDataset ds;
    ds.period_s = period_s;
    for (const auto& r : t.rows) {
        ds.timestamps.push_back(csv::parse_time(r.cells[ct], r.line, origin));
        ds.power_kw.push_back(csv::parse_number(r.cells[cp], r.line, origin));
        ds.hub_wind_ms.push_back(csv::parse_number(r.cells[cw], r.line, origin));
    }
    validate_timeline(ds.timestamps, period_s);
    return ds;
}

inline int cmd_forecast(const ForecastOptions& o) {
    const auto doc = read_json(o.model);
    const auto model = forecaster_from_json(doc);
    if (!doc.contains("postprocess")) throw SchemaError("model document lacks the postprocess block");
    const auto& pp = doc.at("postprocess");
    const ClipConfig clip{pp.at("p_max_kw").get<double>(), pp.at("v_cut_out_ms").get<double>()};
    const HeightCorrectionModel height{pp.at("alpha_h").get<double>(), pp.at("h_eff_m").get<double>(), kForecastHeight};

    const auto weather = csv::read_weather(o.weather);
    const Timestamp origin = parse_iso8601(o.origin);
    constexpr std::size_t H = kStepsPerDay;
    const auto first = std::lower_bound(weather.timestamps.begin(), weather.timestamps.end(), origin);
    if (first == weather.timestamps.end() || *first != origin)
        throw ParameterError("weather forecast has no row at the origin " + format_iso8601(origin));
    const auto i0 = static_cast<std::size_t>(first - weather.timestamps.begin());
    if (i0 + H > weather.size() || weather.timestamps[i0 + H - 1] - origin != static_cast<std::int64_t>(H - 1) * weather.period_s)
        throw ParameterError("weather forecast does not cover 96 steps after the origin");
    int utc_offset = 0;
    if (doc.contains("operation")) utc_offset = doc.at("operation").value("utc_offset_minutes", 0);
    const auto future = CovariateFrame::from(weather, i0, H, CalendarConfig{utc_offset});

    std::vector<double> raw;
    if (model->autoregressive()) {
        const auto& op = doc.at("operation");
        const auto past = static_cast<std::size_t>(op.at("past_horizon").get<int>());
        if (!o.history)
            throw ParameterError("model '" + model->name() + "' needs --history with the " + std::to_string(past) +
                                 " measured steps before the origin");
        const auto hist = read_history(*o.history, weather.period_s);
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < hist.size(); ++i)
            if (hist.timestamps[i] < origin && origin - hist.timestamps[i] <= static_cast<std::int64_t>(past) * weather.period_s)
                rows.push_back(i);
        if (rows.size() != past)
            throw ParameterError("history must hold the " + std::to_string(past) + " steps before the origin, found " +
                                 std::to_string(rows.size()));
        AlignedDataset window = hist.select(rows);
        window.calendar_config = CalendarConfig{utc_offset};
        const std::size_t n = window.size();
        for (auto* col : {&window.v100_ms, &window.v10_ms, &window.direction_deg, &window.temperature_c, &window.pressure_hpa})
            col->assign(n, kMissing);
        window.roles.assign(n, Role::Test);
        for (auto t : window.timestamps) window.calendar.push_back(cyclic_features(t, window.calendar_config));

        ShutdownMask mask;
        if (o.mask) {
            const auto all = csv::read_mask(*o.mask);
            mask = ShutdownMask::empty(window.timestamps, all.source);
            for (std::size_t k = 0; k < n; ++k) {
                auto it = std::lower_bound(all.timestamps.begin(), all.timestamps.end(), window.timestamps[k]);
                if (it == all.timestamps.end() || *it != window.timestamps[k])
                    throw MisalignedError("mask has no entry for " + format_iso8601(window.timestamps[k]));
                mask.flags[k] = all.flags[static_cast<std::size_t>(it - all.timestamps.begin())];
            }
        } else {
            mask = rule_based_flags(window.timestamps, window.hub_wind_ms, window.power_kw,
                                    op.at("v_cut_in_ms").get<double>(), op.at("p_cut_in_kw").get<double>());
        }
        const auto strategy = strategy_from_string(op.at("strategy").get<std::string>());
        const auto oem = curve_from_json(op.at("oem_curve"));
        const auto& arx = static_cast<const ArxForecaster&>(*model).model();
        const auto processed = apply_operation_strategy(window, mask, strategy, oem, past, arx.night);
        raw = model->forecast(&processed, future);
    } else {
        raw = model->forecast(nullptr, future);
    }
    const auto y = clip_forecast(raw, correct_forecast(future.v100_ms, height), clip);
    const auto text = csv::render_two_columns(future.timestamps, y, "forecast_kw");
    if (o.out)
        csv::write_atomic(*o.out, text);
    else
        std::fwrite(text.data(), 1, text.size(), stdout);
    return 0;
}

// ---------------------------------------------------------------- backtest

inline int cmd_backtest(const ModelOptions& o) {
    auto c = load_run_config(o.config);
    apply_overrides(c, o);
    const auto ds = load_dataset(c);
    const auto lib = load_library(c);
    const auto normalized = normalize_library(lib);
    const auto oem = oem_curve(c, lib);
    const auto mask = load_or_detect_mask(c, ds);

    BacktestRequest req;
    req.turbine_id = c.turbine_id;
    req.models = c.models;
    req.strategies = c.strategies;
    req.scenarios = c.scenarios;
    req.suite = c.suite;
    req.backtest = c.backtest;
    const auto report = backtest(ds, mask, normalized, oem, req);
    for (const auto& s : report.skipped)
        spdlog::warn("skipped origin {}: {}", format_iso8601(s.origin), s.reason);

    const fs::path out = o.out ? *o.out : c.resolve(c.output_dir);
    const auto j = to_json(report);
    if (auto problem = validate_report(j)) throw SchemaError("report failed validation: " + *problem);
    csv::write_atomic(out / "report.json", dump(j));
    csv::write_atomic(out / "forecasts.csv", render_forecasts(report.forecasts));

    std::printf("%-8s %-16s %-10s %10s %10s %10s %10s\n", "model", "strategy", "scenario", "nMAE", "+-", "nRMSE", "+-");
    for (const auto& r : report.rows)
        std::printf("%-8s %-16s %-10s %10.4f %10.4f %10.4f %10.4f\n", r.model.c_str(), r.strategy.c_str(),
                    r.scenario.c_str(), r.nmae_mean, r.nmae_std, r.nrmse_mean, r.nrmse_std);
    return 0;
}

}  // namespace windcurve::cli
