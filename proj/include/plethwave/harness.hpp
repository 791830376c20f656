#pragma once

// Scale-versus-noise studies: the minimum SNR at which a delineation scale
// still yields an accurate heart rate, a sweep of that over scales, and a
// fixed-scale noise ladder.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "delineate.hpp"
#include "errors.hpp"
#include "signal.hpp"
#include "vitals.hpp"

namespace plethwave {

inline constexpr double default_hr_tolerance_bpm = 2.0;
inline constexpr double required_pass_fraction = 0.90;
// Bisection bounds for the minimum-SNR search, 1 dB steps. The floor sits
// below 0 dB because on white noise the usable scales keep working there.
inline constexpr int snr_search_min_db = -20;
inline constexpr int snr_search_max_db = 40;

/// Fixture used by the scale studies: 90 bpm, 30 s at 100 Hz.
inline PlethConfig study_fixture() {
    PlethConfig cfg;
    cfg.heart_rate_bpm = 90.0;
    cfg.duration_s = 30.0;
    cfg.fs = 100.0;
    return cfg;
}

struct StudyOptions {
    int seeds = 50;
    double hr_tol_bpm = default_hr_tolerance_bpm;
    std::uint64_t seed_base = 1;
    int snr_min_db = snr_search_min_db;
    int snr_max_db = snr_search_max_db;
};

struct TrialRecord {
    int scale = 0;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> hr_bpm;
    bool within_tolerance = false;
    double delineate_us = 0.0;
};

using TrialLog = std::function<void(const TrialRecord&)>;

/// Runs one noisy trial per seed at a fixed (scale, SNR) and returns the
/// detected heart rates (absent where delineation failed).
inline std::vector<std::optional<double>> run_trials(const Waveform& clean, double true_hr, int scale, double snr_db,
                                                     const StudyOptions& opt, const TrialLog& log = {}) {
    std::vector<std::optional<double>> out;
    out.reserve(static_cast<std::size_t>(opt.seeds));
    for (int i = 0; i < opt.seeds; ++i) {
        const std::uint64_t seed = opt.seed_base + static_cast<std::uint64_t>(i);
        const Waveform noisy = add_noise(clean, snr_db, seed);
        TrialRecord rec{scale, snr_db, seed, std::nullopt, false, 0.0};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto f = detect_fiducials(noisy, static_cast<double>(scale));
            rec.delineate_us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
            rec.hr_bpm = heart_rate(f, noisy.fs());
        } catch (const Error&) {
            rec.delineate_us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
        }
        rec.within_tolerance = rec.hr_bpm && std::abs(*rec.hr_bpm - true_hr) <= opt.hr_tol_bpm;
        if (log) log(rec);
        out.push_back(rec.hr_bpm);
    }
    return out;
}

inline double pass_fraction(const std::vector<std::optional<double>>& hrs, double true_hr, double tol) {
    if (hrs.empty()) return 0.0;
    int ok = 0;
    for (const auto& hr : hrs) ok += (hr && std::abs(*hr - true_hr) <= tol) ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(hrs.size());
}

inline void validate_study(int scale, const StudyOptions& opt) {
    if (scale < 1 || scale > 16) throw ConfigError("study scale must lie in 1..16");
    if (opt.seeds < 10) throw ConfigError("studies need at least 10 seeds");
    if (!(opt.hr_tol_bpm > 0.0)) throw ConfigError("heart-rate tolerance must be > 0");
    if (opt.snr_min_db >= opt.snr_max_db) throw ConfigError("SNR search range is empty");
}

/// Smallest integer SNR in [snr_min_db, snr_max_db] at which at least 90% of
/// seeds give a heart rate within tolerance; +inf if the scale fails even
/// noise-free or at the top of the range. Bisection assumes success is
/// monotone in SNR.
inline double min_snr_for_scale(int scale, const PlethConfig& cfg, const StudyOptions& opt = {},
                                const TrialLog& log = {}) {
    validate_study(scale, opt);
    const Waveform clean = generate_pleth(cfg);
    std::map<int, bool> memo;
    auto passes = [&](double snr) {
        const auto hrs = run_trials(clean, cfg.heart_rate_bpm, scale, snr, opt, log);
        return pass_fraction(hrs, cfg.heart_rate_bpm, opt.hr_tol_bpm) >= required_pass_fraction;
    };
    auto passes_at = [&](int snr) {
        auto it = memo.find(snr);
        if (it != memo.end()) return it->second;
        return memo[snr] = passes(static_cast<double>(snr));
    };

    if (!passes(snr_infinite)) return snr_infinite;
    if (!passes_at(opt.snr_max_db)) return snr_infinite;
    if (passes_at(opt.snr_min_db)) return opt.snr_min_db;
    int lo = opt.snr_min_db;  // fails
    int hi = opt.snr_max_db;  // passes
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (passes_at(mid) ? hi : lo) = mid;
    }
    return hi;
}

struct SweepRow {
    int scale = 0;
    double min_snr_db = snr_infinite;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    int trials_per_point = 0;
    std::string success_criterion;

    /// Smallest scale whose min_snr equals the sweep minimum; nullopt when no
    /// scale ever succeeds.
    std::optional<int> optimal_scale() const {
        std::optional<int> best;
        double best_snr = snr_infinite;
        for (const auto& r : rows) {
            if (r.min_snr_db < best_snr) {
                best_snr = r.min_snr_db;
                best = r.scale;
            }
        }
        return best;
    }
};

inline std::string describe_criterion(const StudyOptions& opt) {
    return "|HR - true| <= " + std::to_string(opt.hr_tol_bpm) + " bpm for >= 90% of " +
           std::to_string(opt.seeds) + " seeds";
}

inline SweepResult run_scale_sweep(std::vector<int> scales, const PlethConfig& cfg, const StudyOptions& opt = {},
                                   const TrialLog& log = {}) {
    if (scales.empty()) throw ConfigError("scale sweep needs at least one scale");
    std::sort(scales.begin(), scales.end());
    SweepResult result;
    result.trials_per_point = opt.seeds;
    result.success_criterion = describe_criterion(opt);
    for (int s : scales) result.rows.push_back({s, min_snr_for_scale(s, cfg, opt, log)});
    return result;
}

struct LadderRow {
    double snr_db = 0.0;
    std::vector<std::optional<double>> hr_bpm;  // one per seed
    double pass_fraction = 0.0;
    double median_hr_bpm = 0.0;
    bool pass = false;
};

struct LadderReport {
    int scale = 0;
    double true_hr_bpm = 0.0;
    std::vector<LadderRow> rows;
    std::string success_criterion;
};

inline const std::vector<double>& default_ladder_snrs() {
    static const std::vector<double> snrs{30.0, 20.0, 10.0, 5.0};
    return snrs;
}

/// Heart-rate distribution across seeds at each SNR for one scale.
inline LadderReport run_noise_ladder(int scale, const std::vector<double>& snrs, const PlethConfig& cfg,
                                     const StudyOptions& opt = {}, const TrialLog& log = {}) {
    validate_study(scale, opt);
    const Waveform clean = generate_pleth(cfg);
    LadderReport rep;
    rep.scale = scale;
    rep.true_hr_bpm = cfg.heart_rate_bpm;
    rep.success_criterion = describe_criterion(opt);
    for (double snr : snrs) {
        LadderRow row;
        row.snr_db = snr;
        row.hr_bpm = run_trials(clean, cfg.heart_rate_bpm, scale, snr, opt, log);
        row.pass_fraction = pass_fraction(row.hr_bpm, cfg.heart_rate_bpm, opt.hr_tol_bpm);
        std::vector<double> got;
        for (const auto& h : row.hr_bpm) {
            if (h) got.push_back(*h);
        }
        row.median_hr_bpm = got.empty() ? std::nan("") : stats::median(std::move(got));
        row.pass = row.pass_fraction >= required_pass_fraction;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

}  // namespace plethwave
