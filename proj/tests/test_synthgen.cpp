#include "catch_amalgamated.hpp"
#include "support.hpp"

using namespace windcurve;
using namespace testsupport;

namespace {

double shutdown_share(const SynthDataset& s) {
    return static_cast<double>(s.truth.flagged_count()) / static_cast<double>(s.truth.size());
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
    auto cfg = small_synth(42, 20);
    cfg.noise_kw = 15;
    cfg.forecast_error.sigma_ms = 1.0;
    cfg.irregular = {1.0, 10.0, 0.5};
    const auto a = generate(cfg), b = generate(cfg);
    CHECK(a.data.power_kw == b.data.power_kw);
    CHECK(a.data.v100_ms == b.data.v100_ms);
    CHECK(a.truth.flags == b.truth.flags);
    CHECK(a.categories == b.categories);
    CHECK(a.data.size() == 20u * 96u);

    cfg.seed = 43;
    const auto c = generate(cfg);
    CHECK(c.data.power_kw != a.data.power_kw);
    CHECK(c.data.hub_wind_ms != a.data.hub_wind_ms);
}

TEST_CASE("shutdown share grows with the event rate") {
    double last = -1;
    for (double rate : {0.5, 2.0, 6.0}) {
        auto cfg = small_synth(7, 120);
        cfg.irregular = {rate, 16.0, 0.0};
        const double share = shutdown_share(generate(cfg));
        CHECK(share > last);
        last = share;
    }
    auto cfg = small_synth(7, 120);
    CHECK(shutdown_share(generate(cfg)) == 0.0);
}

TEST_CASE("regular shutdowns follow the night window") {
    auto cfg = small_synth(3, 14);
    cfg.regular.enabled = true;
    cfg.regular.window = {1320, 360};
    const auto s = generate(cfg);
    for (std::size_t i = 0; i < s.data.size(); ++i) {
        const bool night = night_indicator(s.data.timestamps[i], cfg.regular.window, s.data.calendar_config);
        REQUIRE(s.truth.flagged(i) == night);
        if (night) {
            REQUIRE(s.data.power_kw[i] == 0.0);
            REQUIRE(s.categories[i] == TruthCategory::Regular);
        }
    }
    CHECK(shutdown_share(s) == Catch::Approx(8.0 / 24.0));

    cfg.regular.active_days = {{5, 6}};
    const auto partial = generate(cfg);
    CHECK(partial.truth.flagged_count() == 2u * 32u);
}

TEST_CASE("noise-free generation follows the true curve exactly") {
    auto cfg = small_synth(11, 30);
    const auto s = generate(cfg);
    for (std::size_t i = 0; i < s.data.size(); ++i) {
        REQUIRE(std::abs(s.data.power_kw[i] - s.true_curve(s.data.hub_wind_ms[i])) <= 1e-9);
        REQUIRE(s.data.power_kw[i] >= 0.0);
        REQUIRE(s.data.power_kw[i] <= cfg.peak_rating_kw);
    }
    const auto rule = rule_based_flags(s.data, DetectionConfig{});
    CHECK(rule.flagged_count() == 0);
}

TEST_CASE("AutoWP recovers the library weights of a synthetic turbine") {
    const auto& lib = fixture_library();
    SynthConfig cfg;
    cfg.seed = 5;
    cfg.days = 90;
    cfg.curve.weights = {{lib[2].id, 0.3}, {lib[12].id, 0.7}};
    const auto s = generate(cfg, &lib);
    CurvePool pool;
    pool.curves = {lib[2], lib[12]};
    const auto fit = fit_autowp(pool, s.data.hub_wind_ms, s.data.power_kw, cfg.peak_rating_kw);
    CHECK(fit.model.weights[0] == Catch::Approx(0.3).margin(1e-6));
    CHECK(fit.model.weights[1] == Catch::Approx(0.7).margin(1e-6));
}

TEST_CASE("hub wind and the 100 m forecast are related by the terrain exponent") {
    auto cfg = small_synth(13, 10);
    cfg.hub_height_m = 140;
    const auto s = generate(cfg);
    const double f = std::pow(100.0 / 140.0, cfg.terrain_alpha);
    for (std::size_t i = 0; i < s.data.size(); ++i)
        REQUIRE(s.data.v100_ms[i] == Catch::Approx(s.data.hub_wind_ms[i] * f));
}

TEST_CASE("transitions reduce power without entering the truth mask") {
    auto cfg = small_synth(17, 120);
    cfg.irregular = {2.0, 12.0, 1.0};
    const auto s = generate(cfg);
    std::size_t transitions = 0;
    for (std::size_t i = 0; i < s.data.size(); ++i) {
        if (s.categories[i] != TruthCategory::Transition) continue;
        ++transitions;
        REQUIRE_FALSE(s.truth.flagged(i));
        const double full = s.true_curve(s.data.hub_wind_ms[i]);
        REQUIRE(s.data.power_kw[i] >= 0.1 * full - 1e-9);
        REQUIRE(s.data.power_kw[i] <= 0.9 * full + 1e-9);
    }
    CHECK(transitions > 50);
}

TEST_CASE("generator configuration") {
    const auto j = nlohmann::json::parse(R"({
        "seed": 9, "days": 3, "start": "2020-02-01T00:00:00Z", "peak_rating_kw": 2000,
        "true_curve": {"points": [[3, 0], [12, 2000], [35, 2000]]},
        "wind": {"weibull_scale": 8.5},
        "regular_shutdowns": {"window": ["23:00", "05:00"], "active_days": [[1, 366]]},
        "irregular_shutdowns": {"rate_per_day": 0.3, "mean_duration_steps": 8}
    })");
    const auto cfg = synth_config_from_json(j);
    CHECK(cfg.seed == 9);
    CHECK(cfg.days == 3);
    CHECK(cfg.start == from_civil(2020, 2, 1));
    CHECK(cfg.wind.weibull_scale == 8.5);
    CHECK(cfg.regular.enabled);
    CHECK(cfg.regular.window.start_minute == 1380);
    CHECK(cfg.regular.window.end_minute == 300);
    CHECK(cfg.irregular.mean_duration_steps == 8);
    CHECK(generate(cfg).data.peak_rating_kw == 2000);

    auto bad = j;
    bad["days"] = 0;
    CHECK_THROWS_AS(synth_config_from_json(bad), ConfigError);
    bad = j;
    bad["regular_shutdowns"]["window"] = {"23h", "05:00"};
    CHECK_THROWS_AS(synth_config_from_json(bad), ConfigError);
    bad = j;
    bad["wind"]["persistence"] = 1.0;
    CHECK_THROWS_AS(synth_config_from_json(bad), ConfigError);
    bad = j;
    bad["true_curve"] = {{"weights", {{"a", 0.5}}}};
    CHECK_THROWS_AS(synth_config_from_json(bad), ConfigError);
    bad = j;
    bad["seed"] = "x";
    CHECK_THROWS_AS(synth_config_from_json(bad), ConfigError);

    SynthConfig weights_only;
    weights_only.curve.weights = {{"missing", 1.0}};
    CHECK_THROWS_AS(generate(weights_only), ConfigError);
    CHECK_THROWS_AS(generate(weights_only, &fixture_library()), ConfigError);
}
