#include <cstdio>
#include <cstdlib>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

void report_error(const std::string& kind, const std::string& message) {
    const nlohmann::json j = {{"kind", kind}, {"message", message}};
    std::fprintf(stderr, "error: %s\n", j.dump().c_str());
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("windcurve");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("WINDCURVE_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int main(int argc, char** argv) {
    using namespace windcurve::cli;
    setup_logging();

    CLI::App app{"Day-ahead wind-power forecasting for individual turbines"};
    app.require_subcommand(1);

    GenerateOptions gen;
    auto* g = app.add_subcommand("generate", "write a synthetic turbine bundle from a preset");
    g->add_option("--config", gen.config, "preset JSON")->required();
    g->add_option("--out", gen.out, "output directory")->required();
    g->add_option("--seed", gen.seed, "override the generator seed");

    DetectOptions det;
    auto* d = app.add_subcommand("detect", "detect shutdowns and write mask.csv");
    d->add_option("--config", det.config, "run config JSON")->required();
    d->add_option("--out", det.out, "mask CSV path");
    d->add_option("--mode", det.mode, "rule, lof or combined");

    ModelOptions fit;
    auto* f = app.add_subcommand("fit", "fit models and write model JSON files");
    ModelOptions bt;
    auto* b = app.add_subcommand("backtest", "rolling day-ahead evaluation");
    for (auto [sub, opts] : {std::pair{f, &fit}, std::pair{b, &bt}}) {
        sub->add_option("--config", opts->config, "run config JSON")->required();
        sub->add_option("--out", opts->out, "output directory");
        sub->add_option("--models", opts->models, "comma-separated: autowp,oem,mlp,arx");
        sub->add_option("--strategies", opts->strategies, "comma-separated shutdown strategies");
        sub->add_option("--scenarios", opts->scenarios, "comma-separated: consider,disregard");
        sub->add_option("--seed", opts->seed, "override the run seed");
        sub->add_option("--jobs", opts->jobs, "parallel workers")->check(CLI::PositiveNumber);
    }
    b->add_flag("--timing", bt.timing, "record wall-clock runtimes in the report");

    ForecastOptions fc;
    auto* p = app.add_subcommand("forecast", "96-step forecast from a fitted model");
    p->add_option("--model", fc.model, "model JSON written by fit")->required();
    p->add_option("--weather", fc.weather, "weather forecast CSV")->required();
    p->add_option("--origin", fc.origin, "forecast origin (ISO 8601)")->required();
    p->add_option("--history", fc.history, "CSV timestamp,power_kw,wind_ms before the origin");
    p->add_option("--mask", fc.mask, "shutdown mask CSV for the history");
    p->add_option("--out", fc.out, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what());
        return 64;
    }

    try {
        if (*g) return cmd_generate(gen);
        if (*d) return cmd_detect(det);
        if (*f) return cmd_fit(fit);
        if (*b) return cmd_backtest(bt);
        if (*p) return cmd_forecast(fc);
    } catch (const windcurve::Error& e) {
        report_error(e.kind(), e.what());
        return 2;
    } catch (const std::exception& e) {
        report_error("internal", e.what());
        return 1;
    }
    return 0;
}
