#pragma once

// Test-only reference computations. Nothing here calls into the code paths it
// is used to check.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

/// Strict local maxima (x[i-1] < x[i] > x[i+1]) with value above `level`.
inline std::vector<std::size_t> local_maxima(const std::vector<double>& x, double level) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] > x[i - 1] && x[i] > x[i + 1] && x[i] > level) out.push_back(i);
    }
    return out;
}

/// Strict local minima with value below `level`.
inline std::vector<std::size_t> local_minima(const std::vector<double>& x, double level) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        if (x[i] < x[i - 1] && x[i] < x[i + 1] && x[i] < level) out.push_back(i);
    }
    return out;
}

/// Direct evaluation of sum_n x[n] psi((n - b) / a) / sqrt(a) with
/// psi(t) = t exp(-t^2/2), half-sample reflection at the ends, and support
/// |n - b| <= ceil(5a). O(N * K).
inline std::vector<double> naive_cwt(const std::vector<double>& x, double a) {
    const long long n = static_cast<long long>(x.size());
    const long long r = static_cast<long long>(std::ceil(5.0 * a));
    std::vector<double> out(x.size(), 0.0);
    for (long long b = 0; b < n; ++b) {
        double acc = 0.0;
        for (long long m = b - r; m <= b + r; ++m) {
            long long j = m;
            if (j < 0) j = -j - 1;
            if (j >= n) j = 2 * n - j - 1;
            const double t = static_cast<double>(m - b) / a;
            acc += x[static_cast<std::size_t>(j)] * t * std::exp(-0.5 * t * t) / std::sqrt(a);
        }
        out[static_cast<std::size_t>(b)] = acc;
    }
    return out;
}

inline std::vector<double> random_signal(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> x(n);
    for (double& v : x) v = u(rng);
    return x;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline double rms(const std::vector<double>& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return a.empty() ? 0.0 : std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace oracle
