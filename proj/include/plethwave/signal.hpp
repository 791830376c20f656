#pragma once

// Synthetic two-channel plethysmograph substrate: pulse-train generation,
// calibrated white-noise injection, baseline drift, and SNR measurement.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "waveform.hpp"

namespace plethwave {

/// Returned by measure_snr for a zero residual, and accepted by add_noise as
/// "no noise".
inline constexpr double snr_infinite = std::numeric_limits<double>::infinity();

struct PlethConfig {
    double heart_rate_bpm = 90.0;
    double duration_s = 30.0;
    double fs = 100.0;
    double ac_amplitude = 1.0;
    double dc_level = 2.0;
    /// Gaussian pulse sigma as a fraction of the beat period.
    double pulse_width_factor = 0.15;
    bool dicrotic = false;
    /// Secondary bump delay (fraction of the beat period) and height
    /// (fraction of ac_amplitude); only used when `dicrotic` is set.
    double dicrotic_delay = 0.35;
    double dicrotic_height = 0.3;
    Channel label = Channel::infrared;

    std::size_t sample_count() const {
        return static_cast<std::size_t>(std::llround(duration_s * fs));
    }
    double beat_period_s() const { return 60.0 / heart_rate_bpm; }
};

inline void validate(const PlethConfig& c) {
    if (!(c.fs > 0.0) || !std::isfinite(c.fs)) throw ConfigError("fs must be > 0");
    if (!(c.heart_rate_bpm > 0.0)) throw ConfigError("heart_rate_bpm must be > 0");
    if (!(c.duration_s > 0.0)) throw ConfigError("duration_s must be > 0");
    if (c.duration_s * c.fs < 2.0) throw ConfigError("duration_s * fs must cover at least 2 samples");
    if (!(c.heart_rate_bpm / 60.0 < c.fs / 2.0)) {
        throw ConfigError("beat fundamental heart_rate_bpm/60 must be below fs/2");
    }
    if (!(c.ac_amplitude >= 0.0) || !std::isfinite(c.ac_amplitude)) {
        throw ConfigError("ac_amplitude must be >= 0");
    }
    if (!std::isfinite(c.dc_level)) throw ConfigError("dc_level must be finite");
    if (!(c.pulse_width_factor > 0.0 && c.pulse_width_factor < 1.0)) {
        throw ConfigError("pulse_width_factor must lie in (0, 1)");
    }
    if (c.dicrotic) {
        if (!(c.dicrotic_delay > 0.0 && c.dicrotic_delay < 1.0)) {
            throw ConfigError("dicrotic_delay must lie in (0, 1)");
        }
        if (!(c.dicrotic_height >= 0.0 && c.dicrotic_height < 1.0)) {
            throw ConfigError("dicrotic_height must lie in [0, 1)");
        }
    }
}

/// Deterministic pulse train: one Gaussian bump of height `ac_amplitude` per
/// beat, centred at (k + 1/2) beat periods, riding on `dc_level`.
///
/// The train's period-average is subtracted so that `dc_level` is the mean
/// level of the waveform; the bump height (foot-to-peak) is unaffected.
inline Waveform generate_pleth(const PlethConfig& cfg) {
    validate(cfg);
    const std::size_t n = cfg.sample_count();
    std::vector<double> out(n, cfg.dc_level);
    if (cfg.ac_amplitude == 0.0) return Waveform(std::move(out), cfg.fs, cfg.label);

    const double period = cfg.beat_period_s() * cfg.fs;  // samples
    const double sigma = cfg.pulse_width_factor * period;
    const double reach = 8.0 * sigma;
    const double h2 = cfg.dicrotic ? cfg.dicrotic_height : 0.0;
    const double mean_offset =
        cfg.ac_amplitude * std::sqrt(2.0 * std::numbers::pi) * cfg.pulse_width_factor * (1.0 + h2);

    auto add_bump = [&](double centre, double height) {
        const auto lo = static_cast<long long>(std::ceil(centre - reach));
        const auto hi = static_cast<long long>(std::floor(centre + reach));
        for (long long i = std::max(0LL, lo); i <= hi && i < static_cast<long long>(n); ++i) {
            const double u = (static_cast<double>(i) - centre) / sigma;
            out[static_cast<std::size_t>(i)] += height * std::exp(-0.5 * u * u);
        }
    };

    const long long last_beat = static_cast<long long>(std::ceil(static_cast<double>(n) / period)) + 1;
    for (long long k = -2; k <= last_beat; ++k) {
        const double centre = (static_cast<double>(k) + 0.5) * period;
        add_bump(centre, cfg.ac_amplitude);
        if (cfg.dicrotic) add_bump(centre + cfg.dicrotic_delay * period, h2 * cfg.ac_amplitude);
    }
    for (double& v : out) v -= mean_offset;
    return Waveform(std::move(out), cfg.fs, cfg.label);
}

/// Adds zero-mean white Gaussian noise whose realised power is exactly
/// P_ac(w) / 10^(snr_db/10), so measure_snr(w, result) == snr_db up to
/// rounding. `snr_db == +inf` returns `w` unchanged.
inline Waveform add_noise(const Waveform& w, double snr_db, std::uint64_t seed) {
    require_nonempty(w, "add_noise");
    if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
        throw ConfigError("snr_db must be a number or +inf");
    }
    const double p_ac = stats::ac_power(w.samples());
    if (!(p_ac > 0.0)) throw DegenerateSignalError("add_noise: waveform has zero AC power");
    if (snr_db == snr_infinite) return w;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> noise(w.size());
    for (double& v : noise) v = normal(rng);
    const double m = stats::mean(noise);
    for (double& v : noise) v -= m;
    const double realised = stats::power(noise);
    if (!(realised > 0.0)) throw DegenerateSignalError("add_noise: noise realisation has zero power");

    const double target = p_ac / std::pow(10.0, snr_db / 10.0);
    const double gain = std::sqrt(target / realised);
    std::vector<double> out(w.values());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += gain * noise[i];
    return w.with_samples(std::move(out));
}

/// 10 log10(P_ac(clean) / P(noisy - clean)) in dB; +inf for a zero residual.
inline double measure_snr(const Waveform& clean, const Waveform& noisy) {
    require_nonempty(clean, "measure_snr");
    if (clean.size() != noisy.size()) throw ShapeError("measure_snr: length mismatch");
    if (std::abs(clean.fs() - noisy.fs()) > 1e-9 * clean.fs()) {
        throw ShapeError("measure_snr: sampling rate mismatch");
    }
    std::vector<double> residual(clean.size());
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = noisy[i] - clean[i];
    const double p_noise = stats::power(residual);
    if (p_noise == 0.0) return snr_infinite;
    return 10.0 * std::log10(stats::ac_power(clean.samples()) / p_noise);
}

enum class DriftKind { linear, sinusoidal, step };

struct DriftSpec {
    DriftKind kind = DriftKind::linear;
    /// linear: total rise over the record; sinusoidal: peak amplitude;
    /// step: height of the step.
    double amplitude = 0.0;
    double frequency_hz = 0.0;
    double onset_s = 0.0;
};

/// The additive trajectory add_drift would apply to an n-sample record.
inline std::vector<double> drift_trajectory(const DriftSpec& spec, std::size_t n, double fs) {
    if (!std::isfinite(spec.amplitude)) throw ConfigError("drift amplitude must be finite");
    if (spec.kind == DriftKind::sinusoidal) {
        if (!(spec.frequency_hz >= 0.0)) throw ConfigError("drift frequency must be >= 0");
        if (!(spec.frequency_hz < fs / 2.0)) throw ConfigError("drift frequency must be below Nyquist");
    }
    std::vector<double> d(n, 0.0);
    const double t_end = n > 1 ? static_cast<double>(n - 1) / fs : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        switch (spec.kind) {
            case DriftKind::linear:
                d[i] = spec.amplitude * t / t_end;
                break;
            case DriftKind::sinusoidal:
                d[i] = spec.amplitude * std::sin(2.0 * std::numbers::pi * spec.frequency_hz * t);
                break;
            case DriftKind::step:
                d[i] = t >= spec.onset_s ? spec.amplitude : 0.0;
                break;
        }
    }
    return d;
}

inline Waveform add_drift(const Waveform& w, const DriftSpec& spec) {
    const auto d = drift_trajectory(spec, w.size(), w.fs());
    std::vector<double> out(w.values());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
    return w.with_samples(std::move(out));
}

}  // namespace plethwave
