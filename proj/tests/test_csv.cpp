#include <sstream>

#include "catch_amalgamated.hpp"
#include "support.hpp"

using namespace windcurve;
using namespace testsupport;

TEST_CASE("two-column series round-trip through CSV") {
    TempDir dir("csv");
    const auto ts = quarter_hours(from_civil(2020, 1, 1), 4);
    const std::vector<double> vals{0.0, 12.5, kMissing, 1.0 / 3.0};
    csv::write_atomic(dir.path / "energy.csv", csv::render_two_columns(ts, vals, "energy_kwh"));
    const auto e = csv::read_energy(dir.path / "energy.csv");
    REQUIRE(e.size() == 4);
    CHECK(e.timestamps() == ts);
    CHECK(e[1] == 12.5);
    CHECK(is_missing(e[2]));
    CHECK(e[3] == Catch::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK_FALSE(std::filesystem::exists(dir.path / "energy.csv.tmp"));
}

TEST_CASE("weather CSV round-trip, v10 optional") {
    TempDir dir("csvw");
    const auto ts = quarter_hours(from_civil(2020, 1, 1), 3);
    auto w = weather_frame(ts, {4.0, 5.0, 6.0});
    csv::write_atomic(dir.path / "w.csv", csv::render_weather(w));
    const auto back = csv::read_weather(dir.path / "w.csv");
    CHECK(back.v100 == w.v100);
    CHECK(back.direction_deg == w.direction_deg);
    CHECK(is_missing(back.v10[0]));

    write_file(dir.path / "w2.csv",
               "timestamp,v100_ms,dir_deg,temp_c,pressure_hpa\n2020-01-01T00:00:00Z,5,10,3,1000\n");
    const auto no_v10 = csv::read_weather(dir.path / "w2.csv");
    CHECK(no_v10.size() == 1);
    CHECK(is_missing(no_v10.v10[0]));
}

TEST_CASE("parse errors carry line numbers") {
    std::istringstream bad_count("timestamp,power_kw\n2020-01-01T00:00Z,1\n2020-01-01T00:15Z,1,2\n");
    try {
        csv::parse(bad_count, "x.csv");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    TempDir dir("csverr");
    write_file(dir.path / "p.csv", "timestamp,power_kw\n2020-01-01T00:00Z,1\n2020-01-01T00:15Z,abc\n");
    try {
        csv::read_power(dir.path / "p.csv", 1500);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("abc") != std::string::npos);
    }
    write_file(dir.path / "q.csv", "time,power_kw\n2020-01-01T00:00Z,1\n");
    CHECK_THROWS_AS(csv::read_power(dir.path / "q.csv", 1500), ParseError);
    CHECK_THROWS_AS(csv::read_power(dir.path / "missing.csv", 1500), IoError);
}

TEST_CASE("numbers render with nine significant digits") {
    CHECK(csv::format_number(0.0) == "0");
    CHECK(csv::format_number(-0.0) == "0");
    CHECK(csv::format_number(1500.0) == "1500");
    CHECK(csv::format_number(1.0 / 3.0) == "0.333333333");
    CHECK(csv::format_number(kMissing).empty());
}

TEST_CASE("mask CSV round-trip") {
    TempDir dir("mask");
    const auto ts = quarter_hours(from_civil(2020, 1, 1), 4);
    auto m = ShutdownMask::empty(ts, "rule+lof");
    m.flags = {MaskFlag::Normal, MaskFlag::RuleShutdown, MaskFlag::LofOutlier, MaskFlag::Combined};
    csv::write_atomic(dir.path / "mask.csv", csv::render_mask(m));
    const auto back = csv::read_mask(dir.path / "mask.csv");
    CHECK(back.timestamps == m.timestamps);
    CHECK(back.flags == m.flags);
    CHECK(back.source == "rule+lof");

    write_file(dir.path / "bad.csv", "timestamp,flag,source\n2020-01-01T00:00Z,weird,rule\n");
    CHECK_THROWS_AS(csv::read_mask(dir.path / "bad.csv"), ParseError);
}
