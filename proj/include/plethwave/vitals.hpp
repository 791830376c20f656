#pragma once

// Heart rate, per-channel AC/DC, ratio of ratios, SpO2 mapping, and the
// motion-hold state machine for windowed monitoring.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "delineate.hpp"
#include "dwt.hpp"
#include "errors.hpp"
#include "waveform.hpp"

namespace plethwave {

/// 60 / median inter-peak interval (seconds).
inline double heart_rate(const FiducialSet& f, double fs) {
    if (f.peaks.size() < 2) throw InsufficientFiducialsError("heart_rate needs at least two peaks");
    if (!(fs > 0.0)) throw ConfigError("heart_rate: fs must be > 0");
    std::vector<double> intervals;
    intervals.reserve(f.peaks.size() - 1);
    for (std::size_t i = 1; i < f.peaks.size(); ++i) {
        intervals.push_back(static_cast<double>(f.peaks[i] - f.peaks[i - 1]) / fs);
    }
    return 60.0 / stats::median(std::move(intervals));
}

struct ChannelMeasures {
    double ac = 0.0;
    double dc = 0.0;
    Channel label = Channel::unspecified;
};

inline double ratio_of_ratios(const ChannelMeasures& red, const ChannelMeasures& ir) {
    for (double v : {red.ac, red.dc, ir.ac, ir.dc}) {
        if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("ratio_of_ratios needs positive AC and DC on both channels");
    }
    return (red.ac / red.dc) / (ir.ac / ir.dc);
}

/// Linear R-to-SpO2 calibration, SpO2 = intercept - slope * R, clamped to [0, 100].
struct SpO2Calibration {
    double intercept = 110.0;
    double slope = 25.0;
};

inline double spo2_from_r(double r, const SpO2Calibration& cal = {}) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("spo2_from_r: R must be > 0");
    return std::clamp(cal.intercept - cal.slope * r, 0.0, 100.0);
}

enum class Quality { ok, motion };

struct QualityLimits {
    /// Baseline slope limit as a fraction of the median beat AC, per second.
    double slope_fraction_of_ac = 0.5;
    /// Coefficient of variation of inter-peak intervals.
    double interval_cv = 0.25;
};

/// Motion when the baseline moves faster than the slope limit, when beat
/// timing is irregular, or when the window is too degenerate to tell.
inline Quality assess_quality(const Waveform& ir, const FiducialSet& f, const Baseline& b,
                              const QualityLimits& limits = {}) {
    if (f.peaks.size() < 2 || f.valleys.empty() || b.size() != ir.size() || ir.size() < 2) {
        return Quality::motion;
    }
    std::vector<double> detrended(ir.size());
    for (std::size_t i = 0; i < ir.size(); ++i) detrended[i] = ir[i] - b[i];
    const auto beats = measure_ac(detrended, f);
    if (beats.size() == 0) return Quality::motion;
    const double ac = stats::median(beats.heights);

    double max_slope = 0.0;
    for (std::size_t i = 1; i < b.size(); ++i) {
        max_slope = std::max(max_slope, std::abs(b[i] - b[i - 1]) * ir.fs());
    }
    if (max_slope > limits.slope_fraction_of_ac * ac) return Quality::motion;

    std::vector<double> intervals;
    for (std::size_t i = 1; i < f.peaks.size(); ++i) {
        intervals.push_back(static_cast<double>(f.peaks[i] - f.peaks[i - 1]));
    }
    const double mu = stats::mean(intervals);
    if (!(mu > 0.0) || stats::stddev(intervals) / mu > limits.interval_cv) return Quality::motion;
    return Quality::ok;
}

struct VitalsReport {
    std::optional<double> heart_rate_bpm;
    std::optional<double> r_value;
    std::optional<double> spo2_percent;
    bool held = false;
    double window_start_s = 0.0;
    double window_end_s = 0.0;

    bool has_values() const noexcept { return heart_rate_bpm.has_value(); }
};

struct MonitorState {
    std::optional<VitalsReport> last_good;
    int consecutive_holds = 0;
};

struct VitalsOptions {
    double scale = default_scale;
    double fraction = default_threshold_fraction;
    int levels = 8;
    BaselineMethod baseline = BaselineMethod::shift_averaged;
    SpO2Calibration calibration{};
    QualityLimits quality{};
};

/// Per-channel measures at the IR fiducials: AC is the median foot-to-peak
/// height of the baseline-removed channel, DC the median baseline value at
/// the peaks.
inline ChannelMeasures channel_measures(const Waveform& x, const Baseline& b, const FiducialSet& f) {
    std::vector<double> detrended(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) detrended[i] = x[i] - b[i];
    const auto beats = measure_ac(detrended, f);
    if (beats.size() == 0) throw InsufficientFiducialsError("no measurable beats");
    std::vector<double> dc;
    dc.reserve(f.peaks.size());
    for (std::size_t p : f.peaks) dc.push_back(b[p]);
    ChannelMeasures m{stats::median(beats.heights), stats::median(std::move(dc)), x.label()};
    if (!(m.dc > 0.0) || !(m.ac < m.dc)) throw DomainError("channel AC/DC outside (0, 1)");
    return m;
}

/// One monitoring step over an aligned IR/red window. On motion (or any
/// window the pipeline cannot measure) the previous good vitals are re-issued
/// with held = true; with no previous good report the vitals are absent.
inline std::pair<MonitorState, VitalsReport> update_vitals(MonitorState state, const Waveform& ir,
                                                           const Waveform& red, const VitalsOptions& opt = {},
                                                           double window_start_s = 0.0) {
    if (ir.size() != red.size() || std::abs(ir.fs() - red.fs()) > 1e-9 * ir.fs()) {
        throw ShapeError("update_vitals: IR and red channels are not aligned");
    }
    require_nonempty(ir, "update_vitals");

    VitalsReport report;
    report.window_start_s = window_start_s;
    report.window_end_s = window_start_s + ir.duration_s();

    std::optional<VitalsReport> fresh;
    try {
        const auto f = detect_fiducials(ir, opt.scale, opt.fraction);
        const auto b_ir = extract_baseline(ir, opt.levels, opt.baseline);
        if (assess_quality(ir, f, b_ir, opt.quality) == Quality::ok) {
            const auto b_red = extract_baseline(red, opt.levels, opt.baseline);
            const auto m_ir = channel_measures(ir, b_ir, f);
            const auto m_red = channel_measures(red, b_red, f);
            const double r = ratio_of_ratios(m_red, m_ir);
            VitalsReport v = report;
            v.heart_rate_bpm = heart_rate(f, ir.fs());
            v.r_value = r;
            v.spo2_percent = spo2_from_r(r, opt.calibration);
            fresh = v;
        }
    } catch (const DegenerateSignalError&) {
    } catch (const InsufficientFiducialsError&) {
    } catch (const DomainError&) {
    }

    if (fresh) {
        state.last_good = *fresh;
        state.consecutive_holds = 0;
        return {std::move(state), *fresh};
    }
    report.held = true;
    if (state.last_good) {
        report.heart_rate_bpm = state.last_good->heart_rate_bpm;
        report.r_value = state.last_good->r_value;
        report.spo2_percent = state.last_good->spo2_percent;
    }
    ++state.consecutive_holds;
    return {std::move(state), report};
}

inline std::pair<MonitorState, VitalsReport> update_vitals(MonitorState state, const Waveform& ir,
                                                           const Waveform& red, double scale) {
    VitalsOptions opt;
    opt.scale = scale;
    return update_vitals(std::move(state), ir, red, opt);
}

}  // namespace plethwave
