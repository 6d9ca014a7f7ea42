#include <cmath>
#include <numbers>

#include "catch_amalgamated.hpp"
#include "windcurve/time.hpp"

using namespace windcurve;
using Catch::Approx;

TEST_CASE("ISO-8601 parsing and formatting round-trip") {
    const auto t = parse_iso8601("2020-02-29T23:45:00Z");
    CHECK(t == from_civil(2020, 2, 29, 23, 45));
    CHECK(format_iso8601(t) == "2020-02-29T23:45:00Z");
    CHECK(parse_iso8601("2020-03-01 00:15") == from_civil(2020, 3, 1, 0, 15));
    CHECK(parse_iso8601("2020-03-01T01:00:00+01:00") == from_civil(2020, 3, 1, 0, 0));
    CHECK(parse_iso8601("2020-03-01T00:00:00.250Z") == from_civil(2020, 3, 1));
    CHECK(format_iso8601(Timestamp{-900}) == "1969-12-31T23:45:00Z");
}

TEST_CASE("malformed timestamps are rejected") {
    CHECK_THROWS_AS(parse_iso8601("2020-02-30T00:00"), InvalidSeriesError);
    CHECK_THROWS_AS(parse_iso8601("2020/02/01T00:00"), InvalidSeriesError);
    CHECK_THROWS_AS(parse_iso8601("2020-02-01T24:00"), InvalidSeriesError);
    CHECK_THROWS_AS(parse_iso8601("2020-02-01T00:00Q"), InvalidSeriesError);
}

TEST_CASE("calendar position is 1-based and honours the UTC offset") {
    CHECK(calendar_position(from_civil(2019, 1, 1)).day_of_year == 1);
    CHECK(calendar_position(from_civil(2020, 12, 31, 12)).day_of_year == 366);
    CHECK(calendar_position(from_civil(2019, 12, 31, 12)).day_of_year == 365);
    const auto p = calendar_position(from_civil(2019, 12, 31, 23, 30), CalendarConfig{60});
    CHECK(p.day_of_year == 1);
    CHECK(p.minute_of_day == 30);
    CHECK(calendar_position(from_civil(2019, 1, 1), CalendarConfig{-60}).day_of_year == 365);
}

TEST_CASE("cyclic features") {
    SECTION("half a day") {
        const auto c = cyclic_features(10, 720);
        CHECK(std::abs(c.sin_day) < 1e-12);
        CHECK(c.cos_day == Approx(-1.0).margin(1e-12));
    }
    SECTION("full year") {
        const auto c = cyclic_features(365, 0);
        CHECK(std::abs(c.sin_year) < 1e-12);
        CHECK(std::abs(c.cos_year - 1.0) < 1e-12);
    }
    SECTION("first day") {
        CHECK(cyclic_features(1, 0).sin_year == Approx(std::sin(2 * std::numbers::pi / 365)).epsilon(1e-15));
        CHECK(cyclic_features(1, 0).sin_year == Approx(0.017213).margin(5e-7));
    }
    SECTION("leap day keeps the 365 denominator") {
        const auto c = cyclic_features(from_civil(2020, 12, 31));
        CHECK(c.sin_year == Approx(std::sin(2 * std::numbers::pi * 366 / 365.0)).margin(1e-15));
    }
    SECTION("unit circle for every quarter hour of a leap year") {
        for (std::int64_t s = 0; s < 366 * kSecondsPerDay; s += kQuarterHour) {
            const auto c = cyclic_features(from_civil(2020, 1, 1) + s);
            REQUIRE(std::abs(c.sin_year * c.sin_year + c.cos_year * c.cos_year - 1) <= 1e-12);
            REQUIRE(std::abs(c.sin_day * c.sin_day + c.cos_day * c.cos_day - 1) <= 1e-12);
        }
    }
}

TEST_CASE("night indicator") {
    const NightWindow w{1320, 360};
    CHECK(night_indicator(60, w) == 1);
    CHECK(night_indicator(720, w) == 0);
    CHECK(night_indicator(1320, w) == 1);
    CHECK(night_indicator(360, w) == 0);
    CHECK(night_indicator(359, w) == 1);
    for (int m = 0; m < 1440; m += 15) CHECK(night_indicator(m, NightWindow{0, 0}) == 0);
    CHECK(night_indicator(600, NightWindow{540, 1020}) == 1);
    CHECK(night_indicator(1020, NightWindow{540, 1020}) == 0);
    CHECK(night_indicator(from_civil(2020, 6, 1, 21, 30), w, CalendarConfig{60}) == 1);
    CHECK_THROWS_AS(night_indicator(0, NightWindow{1440, 0}), ParameterError);
}
