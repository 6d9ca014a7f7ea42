// Fits an AutoWP curve on a synthetic turbine and scores one test day.
//
//   quickstart [path/to/curve_library.csv]

#include <cstdio>
#include <string>

#include "windcurve/windcurve.hpp"

int main(int argc, char** argv) {
    using namespace windcurve;
    const std::string library_path = argc > 1 ? argv[1] : "data/curve_library.csv";
    try {
        const auto library = normalize_library(parse_curve_library(library_path));

        SynthConfig cfg;
        cfg.days = 120;
        cfg.hub_height_m = 120;
        cfg.noise_kw = 25;
        cfg.forecast_error = {1.0, 0.0, 0.9};
        cfg.irregular = {0.2, 24.0, 0.5};
        cfg.curve.weights = {{library[3].id, 0.6}, {library[9].id, 0.4}};
        const auto synth = generate(cfg, &library);

        const auto data = split(synth.data, from_civil(2019, 4, 1), 0.2);
        const auto mask = detect(data, DetectionConfig{});
        std::printf("flagged %zu of %zu steps as shutdowns\n", mask.flagged_count(), mask.size());

        const auto oem = PowerCurve("oem", {{3, 0}, {12, 1500}, {25, 1500}});
        const auto train = apply_training_strategy(data, mask, HandlingStrategy::Drop, oem);
        const auto fit = fit_autowp(train, library, AutoWpConfig{});
        std::printf("effective hub height %.1f m\n", fit.model.height.effective_height_m);
        for (std::size_t i = 0; i < fit.model.weights.size(); ++i)
            if (fit.model.weights[i] > 1e-3)
                std::printf("  %-14s %.3f\n", fit.model.pool.curves[i].id.c_str(), fit.model.weights[i]);

        const AutoWpForecaster forecaster(fit.model);
        const auto origin = *data.find(from_civil(2019, 4, 10));
        const auto forecast = forecast_origin(forecaster, data, mask, origin, HandlingStrategy::Drop, oem,
                                              fit.model.height, BacktestConfig{});
        std::vector<double> measured(data.power_kw.begin() + static_cast<std::ptrdiff_t>(origin),
                                     data.power_kw.begin() + static_cast<std::ptrdiff_t>(origin + forecast.size()));
        std::printf("2019-04-10 day-ahead nMAE %.3f, nRMSE %.3f\n", nmae(forecast, measured), nrmse(forecast, measured));
    } catch (const Error& e) {
        std::fprintf(stderr, "%s: %s\n", e.kind().c_str(), e.what());
        return 2;
    }
    return 0;
}
