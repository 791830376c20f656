// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "plethwave/csv.hpp"
#include "plethwave/harness.hpp"
#include "plethwave/vitals.hpp"
#include "run_cli.hpp"

using namespace plethwave;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome dwt_reconstruction() {
    const std::size_t lengths[] = {1000, 1023, 1024, 4096};
    double worst = 0.0;
    const auto t0 = Clock::now();
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto x = oracle::random_signal(lengths[i % 4], 5000 + i, -10, 10);
        for (int levels = 1; levels <= 8; ++levels) {
            worst = std::max(worst, oracle::max_abs_diff(synthesize(decompose(x, levels)), x));
        }
    }
    const double dt = seconds_since(t0);
    return {worst < 1e-9 && dt < 1.0, fmt("max error %.3g", worst) + fmt(", %.3f s", dt)};
}

Outcome cwt_oracle() {
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        const std::size_t n = 200 + (i * 977) % 3897;  // up to 4096
        const double scale = 3.0 + static_cast<double>(i % 7);
        const auto x = oracle::random_signal(n, 6000 + i);
        const auto fast = cwt(Waveform(x, 100.0), scale);
        const auto slow = oracle::naive_cwt(x, scale);
        worst = std::max(worst, oracle::max_abs_diff(fast.coeffs, slow) / oracle::max_abs(slow));
    }
    return {worst < 1e-9, fmt("max relative error %.3g", worst)};
}

Outcome delineator_oracle() {
    std::size_t missed = 0, extra = 0, beats = 0;
    for (double hr : {40.0, 60.0, 90.0, 120.0, 180.0}) {
        PlethConfig cfg;
        cfg.heart_rate_bpm = hr;
        const auto w = generate_pleth(cfg);
        const auto f = detect_fiducials(w, 6.0);
        std::vector<std::size_t> interior;
        for (std::size_t m : oracle::local_maxima(w.values(), cfg.dc_level)) {
            if (m >= f.boundary_margin && m + f.boundary_margin < w.size()) interior.push_back(m);
        }
        beats += interior.size();
        auto matched = [](std::size_t a, const std::vector<std::size_t>& set) {
            for (std::size_t b : set) {
                if ((a > b ? a - b : b - a) <= 2) return true;
            }
            return false;
        };
        for (std::size_t m : interior) missed += matched(m, f.peaks) ? 0 : 1;
        for (std::size_t p : f.peaks) extra += matched(p, interior) ? 0 : 1;
    }
    return {missed == 0 && extra == 0,
            std::to_string(beats) + " beats, " + std::to_string(missed) + " missed, " + std::to_string(extra) + " extra"};
}

double fraction_within(double snr) {
    const auto cfg = study_fixture();
    const auto hrs = run_trials(generate_pleth(cfg), cfg.heart_rate_bpm, 6, snr, StudyOptions{});
    return pass_fraction(hrs, cfg.heart_rate_bpm, default_hr_tolerance_bpm);
}

Outcome operating_point() {
    const double f = fraction_within(10.0);
    return {f >= 0.9, fmt("%.0f%% of 50 seeds within 2 bpm at 10 dB", 100.0 * f)};
}

Outcome failure_at_5db() {
    const double f = fraction_within(5.0);
    return {1.0 - f > 0.5, fmt("%.0f%% of 50 seeds off by more than 2 bpm at 5 dB (needs > 50%%)", 100.0 * (1.0 - f))};
}

Outcome scale_trend() {
    const auto t0 = Clock::now();
    const auto res = run_scale_sweep({4, 5, 6}, study_fixture(), StudyOptions{});
    const double dt = seconds_since(t0);
    const double s4 = res.rows[0].min_snr_db, s5 = res.rows[1].min_snr_db, s6 = res.rows[2].min_snr_db;
    const bool ok = s4 > s5 && s5 > s6 && s4 - s6 >= 5.0 && dt < 300.0;
    return {ok, fmt("min_snr 4/5/6 = %g", s4) + fmt("/%g", s5) + fmt("/%g dB", s6) + fmt(", %.1f s", dt)};
}

Outcome baseline_extraction() {
    PlethConfig cfg;
    cfg.duration_s = 60.0;
    cfg.dc_level = 5.0;
    const DriftSpec drift{DriftKind::sinusoidal, 2.0, 0.05};
    const auto clean = generate_pleth(cfg);
    const auto w = add_drift(clean, drift);
    const auto traj = drift_trajectory(drift, w.size(), w.fs());
    const auto b = extract_baseline(w, 8);
    std::vector<double> err(w.size()), detrended(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        err[i] = b[i] - (cfg.dc_level + traj[i]);
        detrended[i] = w[i] - b[i];
    }
    const double rms = oracle::rms(err);

    const auto f = detect_fiducials(w);
    const auto beats = measure_ac(detrended, f);
    double worst_ac = 0.0;
    for (double h : beats.heights) worst_ac = std::max(worst_ac, std::abs(h - 1.0));

    // Same composite at SNR 5; median beat height per seed.
    double worst_noisy = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto noisy = add_drift(add_noise(clean, 5.0, seed), drift);
        const auto bn = extract_baseline(noisy, 8);
        std::vector<double> dn(noisy.size());
        for (std::size_t i = 0; i < noisy.size(); ++i) dn[i] = noisy[i] - bn[i];
        const auto hn = measure_ac(dn, detect_fiducials(noisy));
        worst_noisy = std::max(worst_noisy, std::abs(stats::median(hn.heights) - 1.0));
    }
    const bool ok = rms < 0.2 && !beats.heights.empty() && worst_ac <= 0.05 && worst_noisy <= 0.3;
    return {ok, fmt("drift RMS error %.4f", rms) + fmt(", clean AC error %.4f", worst_ac) +
                    fmt(", SNR 5 median AC error %.3f", worst_noisy)};
}

Outcome invariance_suite() {
    std::size_t failures = 0, checks = 0;
    auto expect = [&](bool c) {
        ++checks;
        failures += c ? 0 : 1;
    };
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> hr_d(45.0, 170.0), gain_d(0.01, 100.0), off_d(-50.0, 50.0),
        snr_d(0.0, 30.0), pos_d(0.01, 10.0);

    for (int trial = 0; trial < 30; ++trial) {
        PlethConfig cfg;
        cfg.heart_rate_bpm = hr_d(rng);
        cfg.duration_s = 20.0;
        const auto w = add_noise(generate_pleth(cfg), snr_d(rng), static_cast<std::uint64_t>(trial));
        const auto f = detect_fiducials(w);
        const double gain = gain_d(rng), offset = off_d(rng);
        std::vector<double> scaled(w.values()), shifted(w.values());
        for (double& v : scaled) v *= gain;
        for (double& v : shifted) v += offset;
        const auto fs = detect_fiducials(w.with_samples(scaled));
        const auto fo = detect_fiducials(w.with_samples(shifted));
        expect(fs.peaks == f.peaks && fs.valleys == f.valleys);
        expect(fo.peaks == f.peaks && fo.valleys == f.valleys);

        const auto all = f.ordered();
        for (std::size_t i = 1; i < all.size(); ++i) expect(all[i].index > all[i - 1].index && all[i].kind != all[i - 1].kind);
    }
    for (int trial = 0; trial < 200; ++trial) {
        const ChannelMeasures red{pos_d(rng), pos_d(rng)}, ir{pos_d(rng), pos_d(rng)};
        const double k = gain_d(rng);
        const double r = ratio_of_ratios(red, ir);
        expect(std::abs(ratio_of_ratios({k * red.ac, k * red.dc}, ir) - r) <= 1e-12 * r);
        expect(std::abs(ratio_of_ratios(red, {k * ir.ac, k * ir.dc}) - r) <= 1e-12 * r);
        const double r2 = r + pos_d(rng);
        expect(spo2_from_r(r2) <= spo2_from_r(r));
    }
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = oracle::random_signal(500 + 100 * seed, 7000 + seed);
        const auto all = detect_fiducials(Waveform(x, 100.0), 2.0 + static_cast<double>(seed % 8)).ordered();
        for (std::size_t i = 1; i < all.size(); ++i) expect(all[i].index > all[i - 1].index && all[i].kind != all[i - 1].kind);
    }
    return {failures == 0, std::to_string(checks) + " checks, " + std::to_string(failures) + " violations"};
}

Outcome cli_end_to_end() {
    const std::string gen = "generate --hr 90 --dur 30 --fs 100 --snr 10 --seed 7 -o ";
    if (run_cli(gen + "acc_pair.csv").exit_code != 0 || run_cli(gen + "acc_pair2.csv").exit_code != 0) {
        return {false, "generate failed"};
    }
    const auto d1 = run_cli("delineate acc_pair.csv --scale 6");
    const auto d2 = run_cli("delineate acc_pair2.csv --scale 6");
    const auto v1 = run_cli("vitals acc_pair.csv");
    const auto v2 = run_cli("vitals acc_pair2.csv");
    if (d1.exit_code != 0 || v1.exit_code != 0) return {false, "delineate or vitals failed"};
    const bool identical = slurp("acc_pair.csv") == slurp("acc_pair2.csv") && d1.out == d2.out && v1.out == v2.out;

    std::size_t peaks = 0;
    std::istringstream din(d1.out);
    std::string line;
    std::vector<double> peak_t;
    std::getline(din, line);
    while (std::getline(din, line)) {
        if (line.ends_with(",peak")) {
            ++peaks;
            peak_t.push_back(std::stod(line.substr(line.find(',') + 1)));
        }
    }
    std::vector<double> gaps;
    for (std::size_t i = 1; i < peak_t.size(); ++i) gaps.push_back(peak_t[i] - peak_t[i - 1]);
    const double delineated_hr = gaps.empty() ? 0.0 : 60.0 / stats::median(gaps);

    double worst_spo2 = 0.0, worst_hr = 0.0;
    int reports = 0;
    std::istringstream vin(v1.out);
    while (std::getline(vin, line)) {
        const auto j = nlohmann::json::parse(line);
        if (!j.contains("held")) continue;
        ++reports;
        if (j["held"].get<bool>() || j["spo2"].is_null()) return {false, "held window in a clean recording"};
        worst_spo2 = std::max(worst_spo2, std::abs(j["spo2"].get<double>() - 85.0));
        worst_hr = std::max(worst_hr, std::abs(j["hr_bpm"].get<double>() - 90.0));
    }
    const bool ok = identical && reports > 0 && worst_spo2 <= 1.0 && worst_hr <= 2.0 &&
                    std::abs(delineated_hr - 90.0) <= 2.0;
    return {ok, std::to_string(peaks) + " peaks" + fmt(" (HR %.2f)", delineated_hr) + ", " + std::to_string(reports) +
                    " windows" + fmt(", max |SpO2-85| %.3f", worst_spo2) + fmt(", max |HR-90| %.3f", worst_hr) +
                    (identical ? ", reruns identical" : ", reruns differ")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"DWT perfect reconstruction", dwt_reconstruction},
        {"CWT oracle equivalence", cwt_oracle},
        {"delineator oracle equivalence", delineator_oracle},
        {"scale 6 at 10 dB", operating_point},
        {"scale 6 fails at 5 dB", failure_at_5db},
        {"scale trend 4 > 5 > 6", scale_trend},
        {"baseline extraction", baseline_extraction},
        {"invariance suite", invariance_suite},
        {"CLI end to end", cli_end_to_end},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
