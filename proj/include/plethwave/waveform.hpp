#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace plethwave {

enum class Channel { infrared, red, unspecified };

inline const char* to_string(Channel c) {
    switch (c) {
        case Channel::infrared: return "infrared";
        case Channel::red: return "red";
        case Channel::unspecified: return "unspecified";
    }
    return "unspecified";
}

/// Uniformly sampled single-channel signal.
///
/// Construction validates fs > 0 and that every sample is finite, so any
/// Waveform that exists satisfies those invariants. Emptiness is allowed at
/// construction and rejected by the operations that consume samples.
class Waveform {
public:
    Waveform() = default;

    Waveform(std::vector<double> samples, double fs, Channel label = Channel::unspecified)
        : samples_(std::move(samples)), fs_(fs), label_(label) {
        if (!(fs_ > 0.0) || !std::isfinite(fs_)) {
            throw ConfigError("sampling rate must be positive and finite");
        }
        for (double v : samples_) {
            if (!std::isfinite(v)) throw InputError("waveform contains a non-finite sample");
        }
    }

    std::span<const double> samples() const noexcept { return samples_; }
    const std::vector<double>& values() const noexcept { return samples_; }
    double fs() const noexcept { return fs_; }
    Channel label() const noexcept { return label_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    double operator[](std::size_t i) const { return samples_[i]; }

    double duration_s() const noexcept { return static_cast<double>(samples_.size()) / fs_; }
    double time_at(std::size_t i) const noexcept { return static_cast<double>(i) / fs_; }

    Waveform with_samples(std::vector<double> samples) const {
        return Waveform(std::move(samples), fs_, label_);
    }

    friend bool operator==(const Waveform&, const Waveform&) = default;

private:
    std::vector<double> samples_;
    double fs_ = 1.0;
    Channel label_ = Channel::unspecified;
};

inline void require_nonempty(const Waveform& w, const char* what) {
    if (w.empty()) throw ShapeError(std::string(what) + ": waveform is empty");
}

namespace stats {

inline double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Mean of squares.
inline double power(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc / static_cast<double>(x.size());
}

/// Power of the mean-removed signal.
inline double ac_power(std::span<const double> x) {
    if (x.empty()) return 0.0;
    const double m = mean(x);
    double acc = 0.0;
    for (double v : x) acc += (v - m) * (v - m);
    return acc / static_cast<double>(x.size());
}

inline double rms(std::span<const double> x) { return std::sqrt(power(x)); }

/// Median; even-length inputs average the two middle values. Empty input
/// yields NaN.
inline double median(std::vector<double> x) {
    if (x.empty()) return std::nan("");
    const auto mid = x.begin() + static_cast<std::ptrdiff_t>(x.size() / 2);
    std::nth_element(x.begin(), mid, x.end());
    double hi = *mid;
    if (x.size() % 2 == 1) return hi;
    double lo = *std::max_element(x.begin(), mid);
    return 0.5 * (lo + hi);
}

inline double stddev(std::span<const double> x) {
    return std::sqrt(ac_power(x));
}

}  // namespace stats

}  // namespace plethwave
