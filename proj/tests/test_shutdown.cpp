#include "catch_amalgamated.hpp"
#include "support.hpp"

using namespace windcurve;
using namespace testsupport;

namespace {

const PowerCurve& oem() {
    static const PowerCurve c("oem", {{3, 0}, {10, 1500}, {25, 1500}});
    return c;
}

AlignedDataset small_dataset(std::size_t n = 200) {
    const auto ts = quarter_hours(from_civil(2020, 1, 1), n);
    std::vector<double> p(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = 4.0 + static_cast<double>(i % 9);
        p[i] = oem()(w[i]);
    }
    auto ds = make_dataset(ts, p, w, w);
    return split(ds, ts[n / 2], 0.2);
}

ShutdownMask mask_with(const AlignedDataset& ds, std::initializer_list<std::size_t> rows) {
    auto m = ShutdownMask::empty(ds.timestamps, "rule");
    for (auto r : rows) m.flags[r] = MaskFlag::RuleShutdown;
    return m;
}

}  // namespace

TEST_CASE("rule-based detection") {
    const auto ts = quarter_hours(from_civil(2020, 1, 1), 3);
    const std::vector<double> v{5.0, 1.0, 5.0}, y{0.0, 0.0, 200.0};
    const auto m = rule_based_flags(ts, v, y, 2.5, 15.0);
    CHECK(m.flags == std::vector<MaskFlag>{MaskFlag::RuleShutdown, MaskFlag::Normal, MaskFlag::Normal});
    CHECK(m.source == "rule");
    CHECK_THROWS_AS(rule_based_flags(ts, v, std::vector<double>{1.0}, 2.5, 15.0), MisalignedError);

    const HubWindSeries hub(ts, v);
    const PowerSeries power(quarter_hours(from_civil(2020, 1, 2), 3), y);
    CHECK_THROWS_AS(rule_based_flags(hub, power, 2.5, 15.0), MisalignedError);

    DetectionConfig cfg;
    CHECK(cfg.cut_in_power(1500) == Catch::Approx(7.5));
    cfg.p_cut_in_kw = 15;
    CHECK(cfg.cut_in_power(1500) == 15);
}

TEST_CASE("mask union") {
    const auto ds = small_dataset(10);
    const auto a = mask_with(ds, {1, 2});
    auto b = mask_with(ds, {5, 6, 7});
    b.source = "lof";
    const auto u = combine(a, b);
    CHECK(u.flagged_count() == 5);
    CHECK(u.source == "rule+lof");
    CHECK(combine(a, a).flags == a.flags);
    CHECK(combine(a, a).source == "rule");
    const auto empty = ShutdownMask::empty(ds.timestamps);
    CHECK(combine(empty, a).flags == a.flags);
    CHECK(combine(empty, a).source == "rule");
    auto both = mask_with(ds, {1});
    both.source = "lof";
    for (auto& f : both.flags) f = f == MaskFlag::RuleShutdown ? MaskFlag::LofOutlier : f;
    CHECK(combine(a, both).flags[1] == MaskFlag::Combined);
    const auto other = ShutdownMask::empty(quarter_hours(from_civil(2021, 1, 1), 10));
    CHECK_THROWS_AS(combine(a, other), MisalignedError);
}

TEST_CASE("combined detection contains the rule flags and is deterministic") {
    auto cfg = small_synth(4, 30);
    cfg.irregular = {1.0, 10.0, 0.5};
    cfg.noise_kw = 10;
    const auto s = generate(cfg);
    DetectionConfig det;
    det.mode = DetectionMode::Rule;
    const auto rule = detect(s.data, det);
    det.mode = DetectionMode::Combined;
    const auto comb = detect(s.data, det);
    for (std::size_t i = 0; i < rule.size(); ++i)
        if (rule.flagged(i)) REQUIRE(comb.flagged(i));
    CHECK(detect(s.data, det).flags == comb.flags);
    CHECK(comb.flagged_count() >= rule.flagged_count());
    CHECK_THROWS_AS(detect(AlignedDataset{}, det), ParameterError);
}

TEST_CASE("rule detection recovers injected shutdowns on noise-free data") {
    auto cfg = small_synth(77, 120);
    cfg.irregular = {1.5, 20.0, 0.0};
    cfg.regular.enabled = true;
    cfg.regular.active_days = {{30, 90}};
    const auto s = generate(cfg);
    const auto m = rule_based_flags(s.data, DetectionConfig{});
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < s.data.size(); ++i) {
        if (!(s.data.hub_wind_ms[i] > kDefaultCutIn)) continue;
        const bool truth = s.truth.flagged(i), got = m.flagged(i);
        tp += truth && got;
        fp += !truth && got;
        fn += truth && !got;
    }
    REQUIRE(tp > 500);
    CHECK(fp == 0);
    CHECK(fn == 0);
}

TEST_CASE("training strategies") {
    const auto ds = small_dataset();
    const auto mask = mask_with(ds, {3, 10, 11, 12, 13, 14, 15, 16, 17, 18, 150});

    SECTION("none is the identity") {
        const auto out = apply_training_strategy(ds, mask, HandlingStrategy::None, oem());
        CHECK(out.power_kw == ds.power_kw);
        CHECK(out.timestamps == ds.timestamps);
        CHECK_FALSE(out.explanatory.has_value());
    }
    SECTION("drop removes flagged training rows only") {
        const auto out = apply_training_strategy(ds, mask, HandlingStrategy::Drop, oem());
        CHECK(out.size() == ds.size() - 10);
        CHECK(out.find(ds.timestamps[150]).has_value());
        CHECK_FALSE(out.find(ds.timestamps[10]).has_value());
        const auto di = apply_training_strategy(ds, mask, HandlingStrategy::DropImputation, oem());
        CHECK(di.timestamps == out.timestamps);
    }
    SECTION("imputation uses the OEM curve at measured hub wind") {
        auto shut = ds;
        for (std::size_t r : {3, 10, 150}) shut.power_kw[r] = 0.0;
        shut.hub_wind_ms[3] = 8.0;
        const auto out = apply_training_strategy(shut, mask, HandlingStrategy::Imputation, oem());
        CHECK(out.power_kw[3] == Catch::Approx(oem()(8.0)));
        CHECK(out.power_kw[10] == oem()(shut.hub_wind_ms[10]));
        CHECK(out.power_kw[150] == 0.0);  // test rows untouched
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (!mask.flagged(i)) REQUIRE(out.power_kw[i] == shut.power_kw[i]);
    }
    SECTION("imputation needs hub wind") {
        auto broken = ds;
        broken.hub_wind_ms[3] = kMissing;
        CHECK_THROWS_AS(apply_training_strategy(broken, mask, HandlingStrategy::Imputation, oem()), ImputationError);
    }
    SECTION("explanatory variables are appended") {
        const auto out = apply_training_strategy(ds, mask, HandlingStrategy::ExplanatoryVariables, oem(), NightWindow{1320, 360});
        REQUIRE(out.explanatory);
        CHECK(out.power_kw == ds.power_kw);
        CHECK(out.explanatory->shutdown_label[3] == 1.0);
        CHECK(out.explanatory->shutdown_label[4] == 0.0);
        CHECK(out.explanatory->theoretical_power_kw[5] == oem()(ds.hub_wind_ms[5]));
        CHECK(out.explanatory->night[0] == 1.0);   // 00:00
        CHECK(out.explanatory->night[60] == 0.0);  // 15:00
    }
    SECTION("mask must be aligned") {
        const auto other = ShutdownMask::empty(quarter_hours(from_civil(2021, 1, 1), ds.size()));
        CHECK_THROWS_AS(apply_training_strategy(ds, other, HandlingStrategy::Drop, oem()), MisalignedError);
    }
    CHECK(strategy_from_string("drop_imputation") == HandlingStrategy::DropImputation);
    CHECK_THROWS_AS(strategy_from_string("ignore"), ConfigError);
}

TEST_CASE("operation strategies on the past window") {
    const auto ts = quarter_hours(from_civil(2020, 3, 1), 96);
    std::vector<double> w(96, 9.0), p(96, 0.0);
    const auto window = make_dataset(ts, p, w, w);
    const auto none = ShutdownMask::empty(ts, "rule");
    auto all = none;
    for (auto& f : all.flags) f = MaskFlag::RuleShutdown;

    CHECK(apply_operation_strategy(window, none, HandlingStrategy::Imputation, oem()).power_kw == p);
    const auto imputed = apply_operation_strategy(window, all, HandlingStrategy::Imputation, oem());
    for (double v : imputed.power_kw) CHECK(v == oem()(9.0));
    const auto di = apply_operation_strategy(window, all, HandlingStrategy::DropImputation, oem());
    CHECK(di.power_kw == imputed.power_kw);
    CHECK(apply_operation_strategy(window, all, HandlingStrategy::Drop, oem()).power_kw == p);
    CHECK(apply_operation_strategy(window, all, HandlingStrategy::Drop, oem()).size() == 96);
    CHECK(apply_operation_strategy(window, all, HandlingStrategy::None, oem()).power_kw == p);
    const auto ex = apply_operation_strategy(window, all, HandlingStrategy::ExplanatoryVariables, oem());
    REQUIRE(ex.explanatory);
    CHECK(ex.power_kw == p);
    CHECK(ex.explanatory->shutdown_label[0] == 1.0);

    std::vector<std::size_t> idx(95);
    for (std::size_t i = 0; i < 95; ++i) idx[i] = i;
    const auto short_window = window.select(idx);
    auto short_mask = ShutdownMask::empty(short_window.timestamps);
    CHECK_THROWS_AS(apply_operation_strategy(short_window, short_mask, HandlingStrategy::None, oem()), ParameterError);
}
