#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "windcurve/windcurve.hpp"

namespace windcurve::cli {

namespace fs = std::filesystem;

struct RunConfig {
    fs::path base_dir;  // directory of the config file; relative paths resolve against it
    std::string turbine_id = "turbine";
    fs::path energy_csv;
    fs::path power_csv;
    fs::path hub_wind_csv;
    fs::path weather_csv;
    fs::path curve_library;
    fs::path mask_csv;
    std::string oem_curve_id;
    double peak_rating_kw = kMissing;
    Timestamp split_boundary;
    double holdout_fraction = 0.2;
    int utc_offset_minutes = 0;
    std::vector<std::string> models = {"autowp", "oem", "mlp", "arx"};
    std::vector<HandlingStrategy> strategies = {HandlingStrategy::None, HandlingStrategy::ExplanatoryVariables,
                                                HandlingStrategy::Drop, HandlingStrategy::Imputation,
                                                HandlingStrategy::DropImputation};
    std::vector<Scenario> scenarios = {Scenario::ConsiderShutdowns, Scenario::DisregardShutdowns};
    DetectionConfig detection;
    ModelSuiteConfig suite;
    BacktestConfig backtest;
    fs::path output_dir = ".";
    std::uint64_t seed = 0;

    fs::path resolve(const fs::path& p) const { return p.is_absolute() ? p : base_dir / p; }
};

inline nlohmann::json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

inline int parse_clock(const std::string& s) {
    if (s.size() != 5 || s[2] != ':') throw ConfigError("expected HH:MM, got '" + s + "'");
    const int h = std::stoi(s.substr(0, 2)), m = std::stoi(s.substr(3, 2));
    if (h < 0 || h > 23 || m < 0 || m > 59) throw ConfigError("invalid clock time '" + s + "'");
    return h * 60 + m;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::vector<HandlingStrategy> parse_strategies(const std::vector<std::string>& names) {
    std::vector<HandlingStrategy> out;
    for (const auto& n : names) out.push_back(strategy_from_string(n));
    return out;
}

inline std::vector<Scenario> parse_scenarios(const std::vector<std::string>& names) {
    std::vector<Scenario> out;
    for (const auto& n : names) out.push_back(scenario_from_string(n));
    return out;
}

inline DetectionMode detection_mode_from_string(const std::string& s) {
    if (s == "rule") return DetectionMode::Rule;
    if (s == "lof") return DetectionMode::Lof;
    if (s == "combined") return DetectionMode::Combined;
    throw ConfigError("unknown detection mode '" + s + "' (valid: rule, lof, combined)");
}

inline RunConfig parse_run_config(const nlohmann::json& j, const fs::path& base_dir) {
    RunConfig c;
    c.base_dir = base_dir;
    try {
        auto path = [&](const char* key, fs::path& dst) {
            if (j.contains(key)) dst = j.at(key).get<std::string>();
        };
        c.turbine_id = j.value("turbine_id", c.turbine_id);
        path("energy_csv", c.energy_csv);
        path("power_csv", c.power_csv);
        path("hub_wind_csv", c.hub_wind_csv);
        path("weather_csv", c.weather_csv);
        path("curve_library", c.curve_library);
        path("mask_csv", c.mask_csv);
        path("output_dir", c.output_dir);
        c.oem_curve_id = j.value("oem_curve_id", std::string{});
        c.peak_rating_kw = j.at("peak_rating_kw").get<double>();
        c.split_boundary = parse_iso8601(j.at("split_boundary").get<std::string>());
        c.holdout_fraction = j.value("holdout_fraction", c.holdout_fraction);
        c.utc_offset_minutes = j.value("utc_offset_minutes", c.utc_offset_minutes);
        c.seed = j.value("seed", c.seed);
        if (j.contains("models")) c.models = j.at("models").get<std::vector<std::string>>();
        if (j.contains("strategies")) c.strategies = parse_strategies(j.at("strategies").get<std::vector<std::string>>());
        if (j.contains("scenarios")) c.scenarios = parse_scenarios(j.at("scenarios").get<std::vector<std::string>>());
        if (j.contains("night_window")) {
            const auto w = j.at("night_window").get<std::vector<std::string>>();
            if (w.size() != 2) throw ConfigError("night_window must be [\"HH:MM\", \"HH:MM\"]");
            c.suite.night = {parse_clock(w[0]), parse_clock(w[1])};
        }
        if (j.contains("detection")) {
            const auto& d = j.at("detection");
            c.detection.v_cut_in_ms = d.value("v_cut_in_ms", c.detection.v_cut_in_ms);
            if (d.contains("p_cut_in_kw")) c.detection.p_cut_in_kw = d.at("p_cut_in_kw").get<double>();
            c.detection.lof_k = d.value("lof_k", c.detection.lof_k);
            c.detection.lof_threshold = d.value("lof_threshold", c.detection.lof_threshold);
            if (d.contains("mode")) c.detection.mode = detection_mode_from_string(d.at("mode").get<std::string>());
        }
        if (j.contains("autowp")) {
            const auto& a = j.at("autowp");
            c.suite.autowp.pool_size = a.value("pool_size", c.suite.autowp.pool_size);
            if (a.contains("mode")) c.suite.autowp.mode = constraint_mode_from_string(a.at("mode").get<std::string>());
            c.suite.autowp.alpha = a.value("alpha", c.suite.autowp.alpha);
            if (a.contains("fit_wind")) {
                const auto w = a.at("fit_wind").get<std::string>();
                if (w == "forecast") c.suite.autowp.fit_wind = FitWind::Forecast;
                else if (w == "hub") c.suite.autowp.fit_wind = FitWind::Hub;
                else throw ConfigError("autowp.fit_wind must be 'forecast' or 'hub'");
            }
        }
        if (j.contains("mlp")) {
            const auto& m = j.at("mlp");
            if (m.contains("hidden")) c.suite.mlp.hidden = m.at("hidden").get<std::vector<int>>();
            c.suite.mlp.learning_rate = m.value("learning_rate", c.suite.mlp.learning_rate);
            c.suite.mlp.batch_size = m.value("batch_size", c.suite.mlp.batch_size);
            c.suite.mlp.max_epochs = m.value("max_epochs", c.suite.mlp.max_epochs);
            c.suite.mlp.patience = m.value("patience", c.suite.mlp.patience);
            c.suite.mlp.restarts = m.value("restarts", c.suite.mlp.restarts);
        }
        if (j.contains("arx")) {
            const auto& a = j.at("arx");
            if (a.contains("lags")) c.suite.arx.lags = a.at("lags").get<std::vector<int>>();
            c.suite.arx.ridge = a.value("ridge", c.suite.arx.ridge);
            c.suite.arx.wind_degree = a.value("wind_degree", c.suite.arx.wind_degree);
            c.suite.arx.use_direction = a.value("use_direction", c.suite.arx.use_direction);
            c.suite.arx.use_temperature = a.value("use_temperature", c.suite.arx.use_temperature);
            c.suite.arx.use_pressure = a.value("use_pressure", c.suite.arx.use_pressure);
            c.suite.arx.use_cyclic = a.value("use_cyclic", c.suite.arx.use_cyclic);
        }
        if (j.contains("backtest")) {
            const auto& b = j.at("backtest");
            c.backtest.horizon = b.value("horizon", c.backtest.horizon);
            c.backtest.past_horizon = b.value("past_horizon", c.backtest.past_horizon);
            c.backtest.restarts = b.value("restarts", c.backtest.restarts);
        }
        if (j.contains("postprocess")) c.backtest.v_cut_out_ms = j.at("postprocess").value("v_cut_out_ms", c.backtest.v_cut_out_ms);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed run config: ") + e.what());
    }
    if (c.energy_csv.empty() == c.power_csv.empty()) throw ConfigError("run config needs exactly one of energy_csv / power_csv");
    if (c.hub_wind_csv.empty() || c.weather_csv.empty()) throw ConfigError("run config needs hub_wind_csv and weather_csv");
    if (!(c.peak_rating_kw > 0)) throw ConfigError("peak_rating_kw must be positive");
    for (const auto& m : c.models) require_known_model(m);
    c.backtest.seed = c.seed;
    return c;
}

inline RunConfig load_run_config(const fs::path& path) {
    const auto abs = fs::absolute(path);
    return parse_run_config(read_json(abs), abs.parent_path());
}

inline fs::path require_file(const RunConfig& c, const fs::path& p, const char* what) {
    if (p.empty()) throw ConfigError(std::string("run config does not name a ") + what);
    const auto r = c.resolve(p);
    if (!fs::exists(r)) throw IoError(std::string(what) + " '" + r.string() + "' does not exist");
    return r;
}

// Aligned and split dataset described by the run config.
inline AlignedDataset load_dataset(const RunConfig& c) {
    const auto cal = CalendarConfig{c.utc_offset_minutes};
    PowerSeries power = c.energy_csv.empty()
                            ? csv::read_power(require_file(c, c.power_csv, "power file"), c.peak_rating_kw)
                            : energy_to_power(csv::read_energy(require_file(c, c.energy_csv, "energy file")),
                                              c.peak_rating_kw);
    const auto hub = csv::read_hub_wind(require_file(c, c.hub_wind_csv, "hub wind file"));
    const auto weather = csv::read_weather(require_file(c, c.weather_csv, "weather file"));
    auto ds = align(power, hub, weather, cal);
    return split(std::move(ds), c.split_boundary, c.holdout_fraction);
}

inline CurveLibrary load_library(const RunConfig& c) {
    return parse_curve_library(require_file(c, c.curve_library, "curve library"));
}

inline PowerCurve oem_curve(const RunConfig& c, const CurveLibrary& lib) {
    if (c.oem_curve_id.empty()) throw ConfigError("run config does not name an oem_curve_id");
    return lib.find(c.oem_curve_id);
}

}  // namespace windcurve::cli
