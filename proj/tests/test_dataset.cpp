#include "catch_amalgamated.hpp"
#include "support.hpp"

using namespace windcurve;
using namespace testsupport;

TEST_CASE("align with identical timestamps keeps every row") {
    const auto ts = quarter_hours(from_civil(2020, 1, 1), 10);
    const std::vector<double> p(10, 100.0), w(10, 6.0);
    const auto ds = make_dataset(ts, p, w, w);
    CHECK(ds.size() == 10);
    CHECK(ds.dropped_rows == 0);
    CHECK(ds.timestamps == ts);
    CHECK_NOTHROW(ds.validate());
}

TEST_CASE("align is an inner join") {
    const auto power_ts = quarter_hours(from_civil(2019, 1, 1), 2 * 366 * 96);
    const auto weather_ts = quarter_hours(from_civil(2020, 1, 1), 366 * 96);
    const PowerSeries power(power_ts, std::vector<double>(power_ts.size(), 50.0), 1500);
    const HubWindSeries hub(power_ts, std::vector<double>(power_ts.size(), 5.0));
    const auto weather = weather_frame(weather_ts, std::vector<double>(weather_ts.size(), 5.5));
    const auto ds = align(power, hub, weather);
    REQUIRE(ds.size() == weather_ts.size());
    CHECK(ds.timestamps.front() == from_civil(2020, 1, 1));
    CHECK(ds.timestamps.back() == weather_ts.back());
}

TEST_CASE("align drops rows missing mandatory columns and counts them") {
    const auto ts = quarter_hours(from_civil(2020, 1, 1), 6);
    std::vector<double> p{1, kMissing, 3, 4, 5, 6};
    std::vector<double> hub{5, 5, kMissing, 5, 5, 5};
    std::vector<double> v100{5, 5, 5, kMissing, 5, 5};
    const auto ds = make_dataset(ts, p, hub, v100);
    CHECK(ds.size() == 4);
    CHECK(ds.dropped_rows == 2);
    CHECK(is_missing(ds.hub_wind_ms[1]));  // hub wind is optional
}

TEST_CASE("align rejects disjoint ranges") {
    const auto a = quarter_hours(from_civil(2019, 1, 1), 96);
    const auto b = quarter_hours(from_civil(2020, 1, 1), 96);
    const PowerSeries power(a, std::vector<double>(96, 1.0));
    const HubWindSeries hub(a, std::vector<double>(96, 1.0));
    CHECK_THROWS_AS(align(power, hub, weather_frame(b, std::vector<double>(96, 1.0))), AlignmentError);
}

TEST_CASE("split tags train, hold-out and test rows") {
    const auto ts = quarter_hours(from_civil(2020, 1, 1), 500);
    const std::vector<double> x(500, 1.0);
    const auto base = make_dataset(ts, x, x, x);
    const Timestamp boundary = ts[400];

    SECTION("20 % hold-out is the chronological tail of training") {
        const auto ds = split(base, boundary, 0.2);
        CHECK(ds.rows_with({Role::Train}).size() == 320);
        CHECK(ds.rows_with({Role::Holdout}).size() == 80);
        CHECK(ds.rows_with({Role::Test}).size() == 100);
        for (std::size_t i = 0; i < 320; ++i) REQUIRE(ds.roles[i] == Role::Train);
        for (std::size_t i = 320; i < 400; ++i) REQUIRE(ds.roles[i] == Role::Holdout);
        for (std::size_t i = 400; i < 500; ++i) REQUIRE(ds.roles[i] == Role::Test);
    }
    SECTION("no hold-out") {
        const auto ds = split(base, boundary, 0.0);
        CHECK(ds.rows_with({Role::Holdout}).empty());
        CHECK(ds.rows_with({Role::Train}).size() == 400);
    }
    SECTION("boundary outside the range") {
        CHECK_THROWS_AS(split(base, ts.front() - kQuarterHour, 0.2), SplitError);
        CHECK_THROWS_AS(split(base, ts.front(), 0.2), SplitError);
        CHECK_THROWS_AS(split(base, ts.back() + kQuarterHour, 0.2), SplitError);
        CHECK_THROWS_AS(split(base, boundary, 1.0), SplitError);
    }
}

TEST_CASE("select copies rows and the optional columns") {
    const auto ts = quarter_hours(from_civil(2020, 1, 1), 5);
    const std::vector<double> x{1, 2, 3, 4, 5};
    auto ds = make_dataset(ts, x, x, x);
    ds.mask = ShutdownMask::empty(ts, "rule");
    ds.mask->flags[3] = MaskFlag::RuleShutdown;
    const std::vector<std::size_t> rows{1, 3};
    const auto sub = ds.select(rows);
    CHECK(sub.size() == 2);
    CHECK(sub.power_kw == std::vector<double>{2, 4});
    REQUIRE(sub.mask);
    CHECK(sub.mask->flags == std::vector<MaskFlag>{MaskFlag::Normal, MaskFlag::RuleShutdown});
    CHECK(sub.find(ts[3]) == std::optional<std::size_t>{1});
    CHECK_FALSE(sub.find(ts[2]).has_value());
}
