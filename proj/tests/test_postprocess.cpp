#include <random>

#include "catch_amalgamated.hpp"
#include "windcurve/postprocess.hpp"

using namespace windcurve;

TEST_CASE("clipping rules") {
    const ClipConfig cfg{1500.0, 25.0};
    CHECK(clip_value(-5, 10, cfg) == 0.0);
    CHECK(clip_value(1600, 10, cfg) == 1500.0);
    CHECK(clip_value(800, 26, cfg) == 0.0);
    CHECK(clip_value(800, 25, cfg) == 0.0);
    CHECK(clip_value(800, 24.99, cfg) == 800.0);
    CHECK(clip_value(1500, 10, cfg) == 1500.0);
    CHECK(clip_value(0, 10, cfg) == 0.0);
    CHECK(clip_value(std::nan(""), 10, cfg) == 0.0);
    CHECK(clip_value(700, std::nan(""), cfg) == 0.0);
}

TEST_CASE("clipping is idempotent and bounded") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> y(-2000, 4000), v(0, 40);
    const ClipConfig cfg{1500.0, 25.0};
    std::vector<double> yh(10000), vh(10000);
    for (std::size_t k = 0; k < yh.size(); ++k) {
        yh[k] = y(rng);
        vh[k] = v(rng);
    }
    yh[0] = -1e9;
    yh[1] = 1500.0;
    vh[2] = 25.0;
    const auto once = clip_forecast(yh, vh, cfg);
    const auto twice = clip_forecast(once, vh, cfg);
    CHECK(once == twice);
    for (std::size_t k = 0; k < once.size(); ++k) {
        REQUIRE(once[k] >= 0.0);
        REQUIRE(once[k] <= 1500.0);
        if (yh[k] > 0 && yh[k] <= 1500 && vh[k] < 25) REQUIRE(once[k] == yh[k]);
        if (vh[k] >= 25) REQUIRE(once[k] == 0.0);
    }
}

TEST_CASE("clip input validation") {
    const std::vector<double> a{1, 2}, b{1};
    CHECK_THROWS_AS(clip_forecast(a, b, {1500.0}), MisalignedError);
    CHECK_THROWS_AS(clip_forecast(a, a, {0.0}), ParameterError);
}
