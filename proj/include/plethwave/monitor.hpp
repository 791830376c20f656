#pragma once

// Sliding-window vitals over a sample stream, plus threshold alerts. Alert
// delivery (calls, radio links, audible alarms) is left to the consumer of
// the emitted AlertEvents.

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "vitals.hpp"
#include "waveform.hpp"

namespace plethwave {

struct AlertRule {
    double spo2_low = 90.0;
    double hr_low = 40.0;
    double hr_high = 180.0;
    int hold_limit = 3;
};

inline void validate(const AlertRule& r) {
    if (!(r.spo2_low > 0.0 && r.spo2_low <= 100.0)) throw ConfigError("spo2_low must lie in (0, 100]");
    if (!(r.hr_low < r.hr_high)) throw ConfigError("hr_low must be below hr_high");
    if (r.hold_limit < 1) throw ConfigError("hold_limit must be >= 1");
}

enum class AlertKind { spo2_low, hr_low, hr_high, sensor_fault };

inline const char* to_string(AlertKind k) {
    switch (k) {
        case AlertKind::spo2_low: return "spo2_low";
        case AlertKind::hr_low: return "hr_low";
        case AlertKind::hr_high: return "hr_high";
        case AlertKind::sensor_fault: return "sensor_fault";
    }
    return "unknown";
}

struct AlertEvent {
    AlertKind kind = AlertKind::spo2_low;
    double window_start_s = 0.0;
    double value = 0.0;
    double rule = 0.0;
};

/// Threshold checks apply to freshly measured reports only; held reports can
/// raise a single sensor_fault once the hold streak reaches the limit.
inline std::vector<AlertEvent> evaluate_alerts(const VitalsReport& report, const MonitorState& state,
                                               const AlertRule& rule) {
    std::vector<AlertEvent> events;
    if (report.held) {
        if (state.consecutive_holds == rule.hold_limit) {
            events.push_back({AlertKind::sensor_fault, report.window_start_s,
                              static_cast<double>(state.consecutive_holds), static_cast<double>(rule.hold_limit)});
        }
        return events;
    }
    if (report.spo2_percent && *report.spo2_percent < rule.spo2_low) {
        events.push_back({AlertKind::spo2_low, report.window_start_s, *report.spo2_percent, rule.spo2_low});
    }
    if (report.heart_rate_bpm && *report.heart_rate_bpm < rule.hr_low) {
        events.push_back({AlertKind::hr_low, report.window_start_s, *report.heart_rate_bpm, rule.hr_low});
    }
    if (report.heart_rate_bpm && *report.heart_rate_bpm > rule.hr_high) {
        events.push_back({AlertKind::hr_high, report.window_start_s, *report.heart_rate_bpm, rule.hr_high});
    }
    return events;
}

struct WindowConfig {
    double window_s = 10.0;
    /// Fraction of the window shared with the next one, in [0, 1).
    double overlap = 0.5;
};

/// Buffers samples and runs update_vitals every hop. At most one window of
/// samples is retained; a trailing partial window never produces output.
class StreamingMonitor {
public:
    using ReportSink = std::function<void(const VitalsReport&, const std::vector<AlertEvent>&)>;

    StreamingMonitor(double fs, double t0, WindowConfig windows, VitalsOptions vitals, AlertRule rule)
        : fs_(fs), t0_(t0), vitals_(vitals), rule_(rule) {
        if (!(fs > 0.0)) throw ConfigError("stream sampling rate must be > 0");
        if (!(windows.window_s > 0.0)) throw ConfigError("window must be > 0 s");
        if (!(windows.overlap >= 0.0 && windows.overlap < 1.0)) throw ConfigError("overlap must lie in [0, 1)");
        validate(rule_);
        window_len_ = static_cast<std::size_t>(std::llround(windows.window_s * fs));
        hop_ = static_cast<std::size_t>(std::llround(windows.window_s * (1.0 - windows.overlap) * fs));
        if (window_len_ < 2) throw ConfigError("window shorter than two samples");
        if (hop_ == 0) throw ConfigError("overlap leaves a zero-sample hop");
        if (hop_ > window_len_) hop_ = window_len_;
    }

    void push(double ir, double red, const ReportSink& sink) {
        ir_.push_back(ir);
        red_.push_back(red);
        if (ir_.size() < window_len_) return;

        const double start = t0_ + static_cast<double>(consumed_) / fs_;
        Waveform w_ir(std::vector<double>(ir_.begin(), ir_.end()), fs_, Channel::infrared);
        Waveform w_red(std::vector<double>(red_.begin(), red_.end()), fs_, Channel::red);
        auto [next, report] = update_vitals(state_, w_ir, w_red, vitals_, start);
        state_ = std::move(next);
        sink(report, evaluate_alerts(report, state_, rule_));

        for (std::size_t i = 0; i < hop_; ++i) {
            ir_.pop_front();
            red_.pop_front();
        }
        consumed_ += hop_;
    }

    std::size_t buffered() const noexcept { return ir_.size(); }
    std::size_t window_samples() const noexcept { return window_len_; }
    std::size_t hop_samples() const noexcept { return hop_; }
    const MonitorState& state() const noexcept { return state_; }

private:
    double fs_;
    double t0_;
    VitalsOptions vitals_;
    AlertRule rule_;
    std::size_t window_len_ = 0;
    std::size_t hop_ = 0;
    std::size_t consumed_ = 0;
    std::deque<double> ir_;
    std::deque<double> red_;
    MonitorState state_;
};

}  // namespace plethwave
