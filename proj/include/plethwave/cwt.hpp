#pragma once

// Single-scale continuous wavelet transform with the first-order Gaussian
// derivative wavelet, evaluated by direct correlation at integer shifts.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "errors.hpp"
#include "waveform.hpp"

namespace plethwave {

/// Half-width of the sampled kernel in units of the scale.
inline constexpr double default_truncation_radius = 5.0;

/// Mother wavelet: t * exp(-t^2 / 2), the negated derivative of the unit
/// Gaussian. Correlating a rising edge against it gives a positive response.
inline double gaussian_derivative_wavelet(double t) { return t * std::exp(-0.5 * t * t); }

struct WaveletKernel {
    std::vector<double> taps;  // taps[i] is the child wavelet at n = i - support_radius
    double scale = 0.0;
    std::size_t support_radius = 0;

    std::size_t length() const noexcept { return taps.size(); }
    double at(long long n) const { return taps[static_cast<std::size_t>(n + static_cast<long long>(support_radius))]; }
};

/// Samples psi_a[n] = psi(n / a) / sqrt(a) on n in [-R, R], R = ceil(radius * a).
/// The negative half is mirrored from the positive half so the taps are
/// exactly antisymmetric and sum to zero.
inline WaveletKernel sample_wavelet(double scale, double truncation_radius = default_truncation_radius) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("wavelet scale must be > 0");
    if (!(truncation_radius > 0.0)) throw ConfigError("truncation radius must be > 0");
    WaveletKernel k;
    k.scale = scale;
    k.support_radius = static_cast<std::size_t>(std::ceil(truncation_radius * scale));
    const std::size_t r = k.support_radius;
    k.taps.assign(2 * r + 1, 0.0);
    const double norm = 1.0 / std::sqrt(scale);
    for (std::size_t n = 1; n <= r; ++n) {
        const double v = norm * gaussian_derivative_wavelet(static_cast<double>(n) / scale);
        k.taps[r + n] = v;
        k.taps[r - n] = -v;
    }
    return k;
}

struct CwtResult {
    std::vector<double> coeffs;
    double scale = 0.0;
    std::size_t boundary_margin = 0;

    std::size_t size() const noexcept { return coeffs.size(); }
};

namespace detail {

/// Half-sample symmetric reflection: ... x1 x0 | x0 x1 ... x_{n-1} | x_{n-1} x_{n-2} ...
/// Valid for offsets up to n samples beyond either end.
inline std::size_t reflect_index(long long i, std::size_t n) {
    const auto len = static_cast<long long>(n);
    if (i < 0) return static_cast<std::size_t>(-i - 1);
    if (i >= len) return static_cast<std::size_t>(2 * len - i - 1);
    return static_cast<std::size_t>(i);
}

}  // namespace detail

/// coeffs[b] = sum_n x[n] * psi_a[n - b], with symmetric reflection beyond the
/// ends. The first and last `boundary_margin` coefficients see padded data.
inline CwtResult cwt(std::span<const double> x, const WaveletKernel& kernel) {
    if (x.empty()) throw ShapeError("cwt: empty signal");
    if (kernel.length() > x.size()) {
        throw ShapeError("cwt: signal shorter than the kernel support");
    }
    const std::size_t n = x.size();
    const std::size_t r = kernel.support_radius;
    const auto rr = static_cast<long long>(r);
    CwtResult out;
    out.scale = kernel.scale;
    out.boundary_margin = r;
    out.coeffs.assign(n, 0.0);

    const double* taps = kernel.taps.data();
    // Interior: straight dot product, no index mapping.
    for (std::size_t b = r; b + r < n; ++b) {
        const double* xs = x.data() + (b - r);
        double acc = 0.0;
        for (std::size_t j = 0; j < kernel.length(); ++j) acc += xs[j] * taps[j];
        out.coeffs[b] = acc;
    }
    auto edge = [&](std::size_t b) {
        double acc = 0.0;
        for (long long m = -rr; m <= rr; ++m) {
            acc += x[detail::reflect_index(static_cast<long long>(b) + m, n)] * taps[m + rr];
        }
        out.coeffs[b] = acc;
    };
    for (std::size_t b = 0; b < std::min(r, n); ++b) edge(b);
    for (std::size_t b = std::max(r, n > r ? n - r : 0); b < n; ++b) edge(b);
    return out;
}

inline CwtResult cwt(const Waveform& x, double scale) {
    require_nonempty(x, "cwt");
    return cwt(x.samples(), sample_wavelet(scale));
}

}  // namespace plethwave
