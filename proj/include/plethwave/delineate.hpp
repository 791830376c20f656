#pragma once

// Peak and valley delineation on the raw signal from zero crossings of a
// single-scale CWT, gated by a +/- fraction-of-max threshold array.
//
// Sign convention: the wavelet responds positively to rising edges, so a peak
// sits where coefficients go from the +1 band to the -1 band, and a valley
// where they go from -1 to +1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cwt.hpp"
#include "errors.hpp"
#include "waveform.hpp"

namespace plethwave {

inline constexpr double default_threshold_fraction = 0.30;
inline constexpr double default_scale = 6.0;
inline constexpr double min_scale = 1.0;
inline constexpr double max_scale = 16.0;

struct ThresholdArray {
    std::vector<std::int8_t> values;
    double threshold_mag = 0.0;

    std::size_t size() const noexcept { return values.size(); }
};

inline ThresholdArray build_threshold_array(const std::vector<double>& coeffs,
                                            double fraction = default_threshold_fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("threshold fraction must lie in (0, 1)");
    if (coeffs.empty()) throw ShapeError("build_threshold_array: empty coefficients");
    double peak = 0.0;
    for (double c : coeffs) peak = std::max(peak, std::abs(c));
    if (!(peak > 0.0)) throw DegenerateSignalError("wavelet coefficients are all zero");

    ThresholdArray t;
    t.threshold_mag = fraction * peak;
    t.values.resize(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double c = coeffs[i];
        t.values[i] = c > t.threshold_mag ? 1 : (c < -t.threshold_mag ? -1 : 0);
    }
    return t;
}

inline ThresholdArray build_threshold_array(const CwtResult& c, double fraction = default_threshold_fraction) {
    return build_threshold_array(c.coeffs, fraction);
}

enum class FiducialKind { peak, valley };

inline const char* to_string(FiducialKind k) { return k == FiducialKind::peak ? "peak" : "valley"; }

struct Fiducial {
    std::size_t index = 0;
    FiducialKind kind = FiducialKind::peak;
    friend bool operator==(const Fiducial&, const Fiducial&) = default;
};

struct FiducialSet {
    std::vector<std::size_t> peaks;
    std::vector<std::size_t> valleys;
    double scale_used = 0.0;
    std::size_t boundary_margin = 0;

    /// Peaks and valleys merged in index order.
    std::vector<Fiducial> ordered() const {
        std::vector<Fiducial> all;
        all.reserve(peaks.size() + valleys.size());
        for (auto i : peaks) all.push_back({i, FiducialKind::peak});
        for (auto i : valleys) all.push_back({i, FiducialKind::valley});
        std::sort(all.begin(), all.end(), [](const Fiducial& a, const Fiducial& b) { return a.index < b.index; });
        return all;
    }
};

struct DelineationOptions {
    double scale = default_scale;
    double fraction = default_threshold_fraction;
};

/// Intermediate products of one delineation, kept for debug dumps.
struct Delineation {
    CwtResult transform;
    ThresholdArray threshold;
    FiducialSet fiducials;
};

namespace detail {

struct Run {
    int sign = 0;
    std::size_t first = 0;
    std::size_t last = 0;
};

/// Maximal nonzero runs, with consecutive same-sign runs fused (no sign
/// transition happens between them).
inline std::vector<Run> signed_runs(const std::vector<std::int8_t>& v) {
    std::vector<Run> runs;
    for (std::size_t i = 0; i < v.size();) {
        if (v[i] == 0) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
        if (!runs.empty() && runs.back().sign == v[i]) {
            runs.back().last = j;
        } else {
            runs.push_back({v[i], i, j});
        }
        i = j + 1;
    }
    return runs;
}

/// Zero crossings of c inside [lo, hi], each localised by linear
/// interpolation and rounded to the nearest index.
inline std::vector<std::size_t> zero_crossings(const std::vector<double>& c, std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> out;
    for (std::size_t i = lo; i < hi; ++i) {
        const double a = c[i];
        const double b = c[i + 1];
        if (a == 0.0) {
            out.push_back(i);
        } else if ((a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0)) {
            const double frac = a / (a - b);
            out.push_back(frac < 0.5 ? i : i + 1);
        }
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool more_extreme(FiducialKind kind, double candidate, double incumbent) {
    return kind == FiducialKind::peak ? candidate > incumbent : candidate < incumbent;
}

}  // namespace detail

/// Full delineation, returning the transform and threshold array alongside
/// the fiducials.
inline Delineation delineate(const Waveform& x, const DelineationOptions& opt = {}) {
    require_nonempty(x, "detect_fiducials");
    if (!(opt.scale >= min_scale && opt.scale <= max_scale)) {
        throw ConfigError("delineation scale must lie in [1, 16]");
    }
    const WaveletKernel kernel = sample_wavelet(opt.scale);
    Delineation d;
    d.transform = cwt(x.samples(), kernel);
    // Coefficients of a constant only cancel to rounding error; treat anything
    // at that level as no transform at all.
    double level = 0.0, peak = 0.0, taps = 0.0;
    for (double v : x.samples()) level = std::max(level, std::abs(v));
    for (double c : d.transform.coeffs) peak = std::max(peak, std::abs(c));
    for (double t : kernel.taps) taps += std::abs(t);
    if (peak <= 1e-9 * level * taps) throw DegenerateSignalError("waveform has no variation at this scale");
    d.threshold = build_threshold_array(d.transform, opt.fraction);

    const auto& c = d.transform.coeffs;
    const auto s = x.samples();
    const std::size_t n = c.size();
    const std::size_t margin = d.transform.boundary_margin;
    const auto runs = detail::signed_runs(d.threshold.values);

    std::vector<Fiducial> found;
    for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
        const auto& from = runs[r];
        const auto& to = runs[r + 1];
        // A zero band as wide as the kernel separates unrelated lobes.
        if (to.first - from.last - 1 >= kernel.length()) continue;
        const auto kind = from.sign > 0 ? FiducialKind::peak : FiducialKind::valley;
        const auto crossings = detail::zero_crossings(c, from.last, to.first);
        if (crossings.empty()) continue;
        std::size_t best = crossings.front();
        for (std::size_t idx : crossings) {
            if (detail::more_extreme(kind, s[idx], s[best])) best = idx;
        }
        if (best < margin || best + margin >= n) continue;
        found.push_back({best, kind});
    }

    // Enforce strict ordering and alternation: a repeated kind keeps the more
    // extreme sample.
    std::vector<Fiducial> clean;
    for (const auto& f : found) {
        if (!clean.empty() && f.index <= clean.back().index) continue;
        if (!clean.empty() && clean.back().kind == f.kind) {
            if (detail::more_extreme(f.kind, s[f.index], s[clean.back().index])) clean.back() = f;
            continue;
        }
        clean.push_back(f);
    }

    d.fiducials.scale_used = opt.scale;
    d.fiducials.boundary_margin = margin;
    for (const auto& f : clean) {
        (f.kind == FiducialKind::peak ? d.fiducials.peaks : d.fiducials.valleys).push_back(f.index);
    }
    return d;
}

inline FiducialSet detect_fiducials(const Waveform& x, double scale = default_scale,
                                    double fraction = default_threshold_fraction) {
    return delineate(x, DelineationOptions{scale, fraction}).fiducials;
}

struct BeatAmplitudes {
    std::vector<double> heights;
    std::vector<std::size_t> peak_indices;
    std::vector<std::size_t> valley_indices;

    std::size_t size() const noexcept { return heights.size(); }
};

/// Foot-to-peak heights: each peak pairs with the nearest valley before it.
/// Peaks with no earlier valley, or with a non-positive height, are skipped.
inline BeatAmplitudes measure_ac(std::span<const double> x, const FiducialSet& f) {
    if (f.peaks.empty() || f.valleys.empty()) {
        throw InsufficientFiducialsError("measure_ac needs at least one peak and one valley");
    }
    BeatAmplitudes out;
    for (std::size_t p : f.peaks) {
        if (p >= x.size()) throw ShapeError("measure_ac: fiducial index outside the signal");
        auto it = std::lower_bound(f.valleys.begin(), f.valleys.end(), p);
        if (it == f.valleys.begin()) continue;
        const std::size_t v = *std::prev(it);
        const double h = x[p] - x[v];
        if (!(h > 0.0)) continue;
        out.heights.push_back(h);
        out.peak_indices.push_back(p);
        out.valley_indices.push_back(v);
    }
    return out;
}

inline BeatAmplitudes measure_ac(const Waveform& x, const FiducialSet& f) { return measure_ac(x.samples(), f); }

}  // namespace plethwave
