#include <random>

#include "catch_amalgamated.hpp"
#include "windcurve/height.hpp"

using namespace windcurve;
using Catch::Approx;

TEST_CASE("power-law scaling") {
    CHECK(power_law_scale(7.3, 100, 100, kAlphaOnshore) == 7.3);
    CHECK(power_law_scale(10, 100, 200, 1.0 / 7.0) == Approx(11.040895).epsilon(1e-7));
    CHECK(power_law_scale(0, 100, 50, 0.2) == 0.0);
    CHECK(kAlphaOffshore == Approx(1.0 / 9.0));
    CHECK_THROWS_AS(power_law_scale(5, 0, 100, 0.14), DomainError);
    CHECK_THROWS_AS(power_law_scale(5, 100, -3, 0.14), DomainError);
    CHECK_THROWS_AS(power_law_scale(5, 100, 80, 0), DomainError);
}

TEST_CASE("power-law round trip and monotonicity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> v(0, 30), h(10, 200), a(0.05, 0.4);
    for (int i = 0; i < 1000; ++i) {
        const double vb = v(rng), h1 = h(rng), h2 = h(rng), al = a(rng);
        const double back = power_law_scale(power_law_scale(vb, h1, h2, al), h2, h1, al);
        REQUIRE(std::abs(back - vb) <= 1e-12 * std::max(1.0, vb));
        REQUIRE(power_law_scale(vb + 0.1, h1, h2, al) > power_law_scale(vb, h1, h2, al));
        REQUIRE(power_law_scale(vb + 0.1, h1, h2 + 1, al) > power_law_scale(vb + 0.1, h1, h2, al));
    }
}

TEST_CASE("effective hub height estimation") {
    CHECK(estimate_effective_hub_height(6, 6, 1.0 / 7) == Approx(100.0));
    const double h = estimate_effective_hub_height(5, 5.5, 1.0 / 7);
    CHECK(h == Approx(100 * std::pow(5 / 5.5, 7)).epsilon(1e-12));
    CHECK(h == Approx(51.3).margin(0.05));
    CHECK_THROWS_AS(estimate_effective_hub_height(0, 5, 1.0 / 7), EstimationError);
    CHECK_THROWS_AS(estimate_effective_hub_height(5, -1, 1.0 / 7), EstimationError);
}

TEST_CASE("forecast correction") {
    const HeightCorrectionModel identity{1.0 / 7, 100, 100};
    CHECK(correct_forecast(8.25, identity) == 8.25);
    const HeightCorrectionModel m{1.0 / 7, estimate_effective_hub_height(5, 5.5, 1.0 / 7), 100};
    CHECK(correct_forecast(5.5, m) == Approx(5.0).epsilon(1e-12));
    CHECK(correct_forecast(0.0, m) == 0.0);
    const std::vector<double> v{0, 5.5, 11};
    const auto out = correct_forecast(std::span<const double>(v), m);
    CHECK(out[1] == Approx(5.0).epsilon(1e-12));
    CHECK(out[2] == Approx(10.0).epsilon(1e-12));
}

TEST_CASE("fitted model reproduces the measured mean") {
    std::mt19937_64 rng(11);
    std::weibull_distribution<double> wb(2.0, 7.0);
    std::normal_distribution<double> err(0.0, 1.0);
    for (double alpha : {1.0 / 7, 1.0 / 9, 0.25}) {
        std::vector<double> hub(5000), fc(5000);
        for (std::size_t i = 0; i < hub.size(); ++i) {
            hub[i] = wb(rng);
            fc[i] = std::max(0.0, hub[i] * 1.12 + err(rng));
        }
        hub[10] = kMissing;
        fc[20] = kMissing;
        const auto m = fit_height_model(hub, fc, alpha);
        double sh = 0, sc = 0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < hub.size(); ++i) {
            if (is_missing(hub[i]) || is_missing(fc[i])) continue;
            sh += hub[i];
            sc += m.correct(fc[i]);
            ++n;
        }
        CHECK(std::abs(sc / n - sh / n) <= 1e-9);
    }
}

TEST_CASE("height fit exclusions and errors") {
    const std::vector<double> hub{5, 100, 5}, fc{5, 1, 5};
    const bool ex[3] = {false, true, false};
    const auto m = fit_height_model(hub, fc, 1.0 / 7, std::span<const bool>(ex, 3));
    CHECK(m.effective_height_m == Approx(100.0));
    const std::vector<double> missing{kMissing};
    CHECK_THROWS_AS(fit_height_model(missing, missing, 1.0 / 7), EstimationError);
    CHECK_THROWS_AS(fit_height_model(hub, missing, 1.0 / 7), MisalignedError);
}
