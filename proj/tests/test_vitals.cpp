#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "plethwave/signal.hpp"
#include "plethwave/vitals.hpp"

using namespace plethwave;
using Catch::Matchers::WithinAbs;

namespace {

PlethConfig config(double hr, double ac, double dc, double dur = 10.0) {
    PlethConfig c;
    c.heart_rate_bpm = hr;
    c.ac_amplitude = ac;
    c.dc_level = dc;
    c.duration_s = dur;
    return c;
}

}  // namespace

TEST_CASE("heart rate from peak intervals", "[vitals]") {
    FiducialSet f;
    f.peaks = {100, 200, 300};
    CHECK(heart_rate(f, 100.0) == 60.0);
    f.peaks = {0, 150, 300, 800, 950};  // one long gap, median still 1.5 s
    CHECK_THAT(heart_rate(f, 100.0), WithinAbs(60.0 / 1.5, 1e-12));
    f.peaks = {100};
    CHECK_THROWS_AS(heart_rate(f, 100.0), InsufficientFiducialsError);
}

TEST_CASE("heart rate of clean pleth", "[vitals]") {
    for (double hr : {45.0, 90.0, 170.0}) {
        const auto w = generate_pleth(config(hr, 1.0, 2.0, 30.0));
        CHECK_THAT(heart_rate(detect_fiducials(w), w.fs()), WithinAbs(hr, 2.0));
    }
}

TEST_CASE("ratio of ratios", "[vitals]") {
    CHECK(ratio_of_ratios({0.5, 1.0}, {1.0, 2.0}) == 1.0);
    CHECK_THAT(ratio_of_ratios({0.02, 1.0}, {0.04, 1.0}), WithinAbs(0.5, 1e-15));
    CHECK_THROWS_AS(ratio_of_ratios({0.0, 1.0}, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(ratio_of_ratios({0.5, 1.0}, {1.0, -2.0}), DomainError);
}

TEST_CASE("spo2 calibration", "[vitals]") {
    CHECK(spo2_from_r(0.4) == 100.0);  // 100 exactly, clamp is a no-op
    CHECK(spo2_from_r(1.0) == 85.0);
    CHECK(spo2_from_r(2.4) == 50.0);
    CHECK(spo2_from_r(0.1) == 100.0);
    CHECK(spo2_from_r(10.0) == 0.0);
    CHECK_THROWS_AS(spo2_from_r(0.0), DomainError);
    double prev = 101.0;
    for (double r = 0.05; r < 5.0; r += 0.05) {
        const double s = spo2_from_r(r);
        CHECK(s <= prev);
        CHECK(s >= 0.0);
        CHECK(s <= 100.0);
        prev = s;
    }
}

TEST_CASE("quality check", "[vitals]") {
    const auto clean = generate_pleth(config(90, 1.0, 2.0));
    const auto f = detect_fiducials(clean);
    CHECK(assess_quality(clean, f, extract_baseline(clean)) == Quality::ok);

    SECTION("a baseline step of five pulse heights is motion") {
        const auto moved = add_drift(clean, {DriftKind::step, 5.0, 0.0, 5.0});
        const auto g = detect_fiducials(moved);
        CHECK(assess_quality(moved, g, extract_baseline(moved)) == Quality::motion);
    }
    SECTION("too few peaks is motion") {
        FiducialSet one = f;
        one.peaks.resize(1);
        CHECK(assess_quality(clean, one, extract_baseline(clean)) == Quality::motion);
    }
    SECTION("irregular intervals are motion") {
        FiducialSet odd = f;
        odd.peaks = {100, 110, 300, 320, 600};
        CHECK(assess_quality(clean, odd, extract_baseline(clean)) == Quality::motion);
    }
}

TEST_CASE("update_vitals on a matched pair", "[vitals]") {
    const auto ir = generate_pleth(config(90, 1.0, 2.0));
    auto rc = config(90, 0.5, 1.0);
    rc.label = Channel::red;
    const auto red = generate_pleth(rc);
    auto [state, report] = update_vitals({}, ir, red);
    REQUIRE(report.has_values());
    CHECK_FALSE(report.held);
    CHECK_THAT(*report.r_value, WithinAbs(1.0, 0.02));
    CHECK_THAT(*report.spo2_percent, WithinAbs(85.0, 0.5));
    CHECK_THAT(*report.heart_rate_bpm, WithinAbs(90.0, 1.0));
    CHECK(state.last_good.has_value());
    CHECK(state.consecutive_holds == 0);
    CHECK(report.window_end_s == Catch::Approx(10.0));
}

TEST_CASE("update_vitals holds through motion", "[vitals]") {
    const auto ir = generate_pleth(config(90, 1.0, 2.0));
    auto rc = config(90, 0.5, 1.0);
    rc.label = Channel::red;
    const auto red = generate_pleth(rc);
    const auto [s1, good] = update_vitals({}, ir, red);

    const auto ir_moved = add_drift(ir, {DriftKind::step, 5.0, 0.0, 5.0});
    const auto red_moved = add_drift(red, {DriftKind::step, 2.5, 0.0, 5.0});
    const auto [s2, held] = update_vitals(s1, ir_moved, red_moved, {}, 10.0);
    CHECK(held.held);
    CHECK(held.heart_rate_bpm == good.heart_rate_bpm);
    CHECK(held.spo2_percent == good.spo2_percent);
    CHECK(held.r_value == good.r_value);
    CHECK(held.window_start_s == 10.0);
    CHECK(s2.consecutive_holds == 1);

    const auto [s3, again] = update_vitals(s2, ir_moved, red_moved, {}, 20.0);
    CHECK(again.held);
    CHECK(s3.consecutive_holds == 2);

    const auto [s4, back] = update_vitals(s3, ir, red, {}, 30.0);
    CHECK_FALSE(back.held);
    CHECK(s4.consecutive_holds == 0);
}

TEST_CASE("first window in motion reports nothing", "[vitals]") {
    const auto ir = add_drift(generate_pleth(config(90, 1.0, 2.0)), {DriftKind::step, 5.0, 0.0, 5.0});
    const auto red = add_drift(generate_pleth(config(90, 0.5, 1.0)), {DriftKind::step, 2.5, 0.0, 5.0});
    const auto [state, report] = update_vitals({}, ir, red);
    CHECK(report.held);
    CHECK_FALSE(report.heart_rate_bpm.has_value());
    CHECK_FALSE(report.spo2_percent.has_value());
    CHECK_FALSE(report.r_value.has_value());
    CHECK_FALSE(state.last_good.has_value());

    const Waveform flat(std::vector<double>(1000, 1.0), 100.0);
    const auto [s2, r2] = update_vitals({}, flat, flat);
    CHECK(r2.held);
    CHECK_FALSE(r2.has_values());
}

TEST_CASE("update_vitals rejects misaligned channels", "[vitals][errors]") {
    const auto ir = generate_pleth(config(90, 1.0, 2.0, 10.0));
    const auto red = generate_pleth(config(90, 0.5, 1.0, 9.0));
    CHECK_THROWS_AS(update_vitals({}, ir, red), ShapeError);
}
