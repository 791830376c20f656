#pragma once

// Orthonormal Haar analysis/synthesis, multilevel decomposition, and
// approximation-only baseline reconstruction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "waveform.hpp"

namespace plethwave {

struct HaarStep {
    std::vector<double> approx;
    std::vector<double> detail;
    /// Input had odd length and was extended by repeating its last sample.
    bool odd = false;
};

inline HaarStep haar_analyze(std::span<const double> x) {
    if (x.empty()) throw ShapeError("haar_analyze: empty input");
    constexpr double s = std::numbers::sqrt2 / 2.0;
    HaarStep out;
    out.odd = x.size() % 2 == 1;
    const std::size_t half = (x.size() + 1) / 2;
    out.approx.resize(half);
    out.detail.resize(half);
    for (std::size_t k = 0; k < half; ++k) {
        const double a = x[2 * k];
        const double b = 2 * k + 1 < x.size() ? x[2 * k + 1] : x.back();
        out.approx[k] = (a + b) * s;
        out.detail[k] = (a - b) * s;
    }
    return out;
}

inline std::vector<double> haar_synthesize(std::span<const double> approx, std::span<const double> detail,
                                           bool odd) {
    if (approx.size() != detail.size()) throw ShapeError("haar_synthesize: approx/detail length mismatch");
    if (odd && approx.empty()) throw ShapeError("haar_synthesize: odd flag on empty input");
    constexpr double s = std::numbers::sqrt2 / 2.0;
    std::vector<double> out(2 * approx.size());
    for (std::size_t k = 0; k < approx.size(); ++k) {
        out[2 * k] = (approx[k] + detail[k]) * s;
        out[2 * k + 1] = (approx[k] - detail[k]) * s;
    }
    if (odd) out.pop_back();
    return out;
}

inline std::vector<double> haar_synthesize(const HaarStep& step) {
    return haar_synthesize(step.approx, step.detail, step.odd);
}

struct DwtDecomposition {
    std::vector<std::vector<double>> details;  // details[0] is level 1 (finest)
    std::vector<double> approx;
    std::vector<bool> odd;  // odd[k]: the level-(k+1) input had odd length
    int levels = 0;
    std::size_t original_len = 0;
};

/// Repeated Haar analysis of the running approximation. Stops early once the
/// approximation is down to a single sample; `levels` records the depth
/// actually reached.
inline DwtDecomposition decompose(std::span<const double> x, int levels) {
    if (levels < 1) throw ConfigError("decompose: levels must be >= 1");
    if (x.empty()) throw ShapeError("decompose: empty input");
    DwtDecomposition d;
    d.original_len = x.size();
    d.approx.assign(x.begin(), x.end());
    for (int level = 0; level < levels && d.approx.size() >= 2; ++level) {
        HaarStep step = haar_analyze(d.approx);
        d.details.push_back(std::move(step.detail));
        d.odd.push_back(step.odd);
        d.approx = std::move(step.approx);
        ++d.levels;
    }
    return d;
}

inline DwtDecomposition decompose(const Waveform& x, int levels) {
    require_nonempty(x, "decompose");
    return decompose(x.samples(), levels);
}

inline std::vector<double> synthesize(const DwtDecomposition& d) {
    std::vector<double> cur = d.approx;
    for (int level = d.levels - 1; level >= 0; --level) {
        const auto k = static_cast<std::size_t>(level);
        cur = haar_synthesize(cur, d.details[k], d.odd[k]);
    }
    return cur;
}

enum class BaselineMethod {
    /// Single decimated decomposition; the result is block-constant over
    /// 2^levels samples.
    decimated,
    /// Average of the decimated reconstruction over every alignment of the
    /// 2^levels block grid (cycle spinning). Removes the staircase.
    shift_averaged,
};

struct Baseline {
    std::vector<double> samples;
    int levels_used = 0;

    std::size_t size() const noexcept { return samples.size(); }
    double operator[](std::size_t i) const { return samples[i]; }
};

namespace detail {

inline std::vector<double> approximation_only(std::span<const double> x, int levels, int* used) {
    DwtDecomposition d = decompose(x, levels);
    for (auto& det : d.details) std::fill(det.begin(), det.end(), 0.0);
    if (used) *used = d.levels;
    return synthesize(d);
}

/// Least-squares line through x[first], ..., x[first + count - 1], as
/// (value at index 0 of that run, slope per sample).
inline std::pair<double, double> fit_line(std::span<const double> x, std::size_t first, std::size_t count) {
    if (count < 2) return {x[first], 0.0};
    const double m = static_cast<double>(count);
    const double tbar = (m - 1.0) / 2.0;
    double ybar = 0.0;
    for (std::size_t i = 0; i < count; ++i) ybar += x[first + i];
    ybar /= m;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double dt = static_cast<double>(i) - tbar;
        num += dt * (x[first + i] - ybar);
        den += dt * dt;
    }
    const double slope = num / den;
    return {ybar - slope * tbar, slope};
}

/// Index j of an n-sample signal folded back into range by half-sample
/// reflection (repeats with period 2n).
inline std::size_t fold(long long j, std::size_t n) {
    const long long p = 2 * static_cast<long long>(n);
    j %= p;
    if (j < 0) j += p;
    return static_cast<std::size_t>(j < static_cast<long long>(n) ? j : p - 1 - j);
}

/// x extended by `left` samples before and `right` after. Outside the signal
/// the residual about an end-fitted line is mirrored while the line itself
/// carries on, so linear trends pass through the edges unbent.
inline std::vector<double> extend_trend(std::span<const double> x, std::size_t left, std::size_t right,
                                        std::size_t fit_len) {
    const std::size_t n = x.size();
    const std::size_t m = std::min(fit_len, n);
    const auto [a0, b0] = fit_line(x, 0, m);
    const auto [a1, b1] = fit_line(x, n - m, m);
    auto head = [&, a0 = a0, b0 = b0](long long t) { return a0 + b0 * static_cast<double>(t); };
    auto tail = [&, a1 = a1, b1 = b1](long long t) {
        return a1 + b1 * static_cast<double>(t - static_cast<long long>(n - m));
    };
    std::vector<double> out;
    out.reserve(left + n + right);
    for (std::size_t k = left; k > 0; --k) {
        const long long t = -static_cast<long long>(k);
        const std::size_t src = fold(t, n);
        out.push_back(head(t) + x[src] - head(static_cast<long long>(src)));
    }
    out.insert(out.end(), x.begin(), x.end());
    for (std::size_t k = 0; k < right; ++k) {
        const long long t = static_cast<long long>(n + k);
        const std::size_t src = fold(t, n);
        out.push_back(tail(t) + x[src] - tail(static_cast<long long>(src)));
    }
    return out;
}

}  // namespace detail

/// Low-pass baseline: decompose to `levels`, zero all detail coefficients,
/// reconstruct. Linear in x; a constant maps to itself.
inline Baseline extract_baseline(std::span<const double> x, int levels = 8,
                                 BaselineMethod method = BaselineMethod::shift_averaged) {
    if (x.empty()) throw ShapeError("extract_baseline: empty input");
    Baseline out;
    out.samples = detail::approximation_only(x, levels, &out.levels_used);
    if (method == BaselineMethod::decimated || out.levels_used == 0) return out;

    const std::size_t n = x.size();
    const std::size_t block = std::size_t{1} << out.levels_used;
    const std::size_t shifts = std::min(block, n);
    std::fill(out.samples.begin(), out.samples.end(), 0.0);
    for (std::size_t s = 0; s < shifts; ++s) {
        const std::size_t right = (block - (n + s) % block) % block;
        const auto padded = detail::extend_trend(x, s, right, block);
        const auto rec = detail::approximation_only(padded, out.levels_used, nullptr);
        for (std::size_t i = 0; i < n; ++i) out.samples[i] += rec[i + s];
    }
    const double inv = 1.0 / static_cast<double>(shifts);
    for (double& v : out.samples) v *= inv;
    return out;
}

inline Baseline extract_baseline(const Waveform& x, int levels = 8,
                                 BaselineMethod method = BaselineMethod::shift_averaged) {
    require_nonempty(x, "extract_baseline");
    return extract_baseline(x.samples(), levels, method);
}

}  // namespace plethwave
