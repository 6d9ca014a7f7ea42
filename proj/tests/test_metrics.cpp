#include <random>

#include "catch_amalgamated.hpp"
#include "windcurve/metrics.hpp"

using namespace windcurve;

TEST_CASE("metric hand values") {
    const std::vector<double> y{2, 2}, f{1, 3};
    CHECK(std::abs(nmae(f, y) - 0.5) <= 1e-12);
    CHECK(std::abs(nrmse(f, y) - 0.5) <= 1e-12);
    CHECK(std::abs(nrmse(std::vector<double>{2}, std::vector<double>{4}) - 0.5) <= 1e-12);
    CHECK(nmae(y, y) == 0.0);
    CHECK(nrmse(y, y) == 0.0);
}

TEST_CASE("metrics are undefined without generation") {
    const std::vector<double> zero{0, 0}, f{1, 1};
    CHECK_THROWS_AS(nmae(f, zero), UndefinedMetricError);
    CHECK_THROWS_AS(nrmse(f, zero), UndefinedMetricError);
    CHECK_THROWS_AS(nrmse(std::vector<double>{}, std::vector<double>{}), UndefinedMetricError);
    CHECK_THROWS_AS(nmae(f, std::vector<double>{1}), MisalignedError);
}

TEST_CASE("nRMSE dominates nMAE and metrics are scale invariant") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1500);
    std::uniform_int_distribution<int> len(1, 300);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto n = static_cast<std::size_t>(len(rng));
        std::vector<double> y(n), f(n);
        for (std::size_t k = 0; k < n; ++k) {
            y[k] = u(rng);
            f[k] = u(rng);
        }
        const double a = nmae(f, y), r = nrmse(f, y);
        REQUIRE(r >= a * (1 - 1e-12));
        if (trial % 50 == 0) {
            for (auto& x : y) x *= 3.7;
            for (auto& x : f) x *= 3.7;
            REQUIRE(std::abs(nmae(f, y) - a) <= 1e-12 * std::max(1.0, a));
            REQUIRE(std::abs(nrmse(f, y) - r) <= 1e-12 * std::max(1.0, r));
        }
    }
}

TEST_CASE("evaluation scenarios") {
    const std::vector<double> y{100, 0, 300, 0, 500};
    std::vector<double> f{110, 50, 280, 40, 450};
    std::vector<MaskFlag> flags(5, MaskFlag::Normal);

    SECTION("empty mask gives identical scenarios") {
        const auto c = evaluate_scenario(f, y, flags, Scenario::ConsiderShutdowns);
        const auto d = evaluate_scenario(f, y, flags, Scenario::DisregardShutdowns);
        CHECK(c.nmae == d.nmae);
        CHECK(c.nrmse == d.nrmse);
        CHECK(c.samples == 5);
    }
    SECTION("all rows flagged") {
        std::vector<MaskFlag> all(5, MaskFlag::RuleShutdown);
        CHECK_THROWS_AS(evaluate_scenario(f, y, all, Scenario::DisregardShutdowns), UndefinedMetricError);
        CHECK_NOTHROW(evaluate_scenario(f, y, all, Scenario::ConsiderShutdowns));
    }
    SECTION("perturbing flagged rows only moves the consider metrics") {
        flags[1] = MaskFlag::RuleShutdown;
        flags[3] = MaskFlag::LofOutlier;
        const auto c0 = evaluate_scenario(f, y, flags, Scenario::ConsiderShutdowns);
        const auto d0 = evaluate_scenario(f, y, flags, Scenario::DisregardShutdowns);
        CHECK(d0.samples == 3);
        auto g = f;
        g[1] += 700;
        g[3] -= 300;
        const auto c1 = evaluate_scenario(g, y, flags, Scenario::ConsiderShutdowns);
        const auto d1 = evaluate_scenario(g, y, flags, Scenario::DisregardShutdowns);
        CHECK(c1.nmae != c0.nmae);
        CHECK(d1.nmae == d0.nmae);
        CHECK(d1.nrmse == d0.nrmse);
    }
    SECTION("mask alignment is required for disregard") {
        CHECK_THROWS_AS(evaluate_scenario(f, y, std::vector<MaskFlag>{}, Scenario::DisregardShutdowns), MisalignedError);
    }
    CHECK(scenario_from_string("disregard") == Scenario::DisregardShutdowns);
    CHECK_THROWS_AS(scenario_from_string("ignore"), ConfigError);
}
