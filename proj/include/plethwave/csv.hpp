#pragma once

// Waveform CSV: header `t,ir,red` (two-channel) or `t,value` (single
// channel), one row per sample. The sampling rate is inferred from the first
// two timestamps and every later timestamp must sit on that grid within
// 1e-6 s.

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "errors.hpp"
#include "waveform.hpp"

namespace plethwave::csv {

inline constexpr double timestamp_tolerance_s = 1e-6;

/// Shortest decimal that round-trips to the same double.
inline std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw InputError("number formatting failed");
    return std::string(buf, end);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n')) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double parse_number(std::string_view field, std::size_t line_no) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw InputError("line " + std::to_string(line_no) + ": malformed number '" + std::string(field) + "'");
    }
    return v;
}

enum class Layout { two_channel, single_channel };

/// One parsed row: timestamp plus one or two amplitudes.
struct Row {
    double t = 0.0;
    double first = 0.0;
    double second = 0.0;
};

/// Incremental reader; holds nothing beyond the current line, so it can sit
/// on an unbounded stream.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {
        std::string header;
        if (!std::getline(in_, header)) throw InputError("missing CSV header");
        ++line_no_;
        const auto cols = split(trim(header));
        if (cols.size() == 3 && cols[0] == "t" && cols[1] == "ir" && cols[2] == "red") {
            layout_ = Layout::two_channel;
        } else if (cols.size() == 2 && cols[0] == "t" && cols[1] == "value") {
            layout_ = Layout::single_channel;
        } else {
            throw InputError("unrecognised CSV header '" + std::string(trim(header)) + "' (expected t,ir,red or t,value)");
        }
    }

    Layout layout() const noexcept { return layout_; }

    /// Sampling rate; known once two rows have been read.
    std::optional<double> fs() const noexcept { return fs_; }
    std::optional<double> start_time() const noexcept { return t0_; }

    std::optional<Row> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            const auto body = trim(line);
            if (body.empty()) continue;
            const auto cols = split(body);
            const std::size_t want = layout_ == Layout::two_channel ? 3 : 2;
            if (cols.size() != want) {
                throw InputError("line " + std::to_string(line_no_) + ": expected " + std::to_string(want) + " fields");
            }
            Row r;
            r.t = parse_number(cols[0], line_no_);
            r.first = parse_number(cols[1], line_no_);
            if (want == 3) r.second = parse_number(cols[2], line_no_);
            check_time(r.t);
            ++rows_;
            return r;
        }
        return std::nullopt;
    }

private:
    void check_time(double t) {
        if (rows_ == 0) {
            t0_ = t;
            return;
        }
        if (rows_ == 1) {
            const double dt = t - *t0_;
            if (!(dt > 0.0)) throw InputError("line " + std::to_string(line_no_) + ": timestamps must increase");
            dt_ = dt;
            double fs = 1.0 / dt;
            // Timestamps like 0.01 are not exact in binary; snap near-integral rates.
            if (std::abs(fs - std::round(fs)) < 1e-6 * fs) fs = std::round(fs);
            fs_ = fs;
            return;
        }
        const double expected = *t0_ + static_cast<double>(rows_) * dt_;
        if (std::abs(t - expected) > timestamp_tolerance_s) {
            throw InputError("line " + std::to_string(line_no_) + ": non-uniform sampling (t=" + format_number(t) +
                             ", expected " + format_number(expected) + ")");
        }
    }

    std::istream& in_;
    Layout layout_ = Layout::two_channel;
    std::size_t line_no_ = 0;
    std::size_t rows_ = 0;
    std::optional<double> t0_;
    std::optional<double> fs_;
    double dt_ = 0.0;
};

/// A whole file in memory. For single-channel files `red` is empty.
struct Recording {
    Layout layout = Layout::two_channel;
    double fs = 0.0;
    double t0 = 0.0;
    std::vector<double> ir;   // or `value` for single-channel files
    std::vector<double> red;

    Waveform first_channel() const {
        return Waveform(ir, fs, layout == Layout::two_channel ? Channel::infrared : Channel::unspecified);
    }
    Waveform red_channel() const {
        if (layout != Layout::two_channel) throw InputError("file has no red channel");
        return Waveform(red, fs, Channel::red);
    }
};

inline Recording read(std::istream& in) {
    Reader reader(in);
    Recording rec;
    rec.layout = reader.layout();
    while (auto row = reader.next()) {
        rec.ir.push_back(row->first);
        if (rec.layout == Layout::two_channel) rec.red.push_back(row->second);
    }
    if (!reader.fs()) throw InputError("need at least two samples to infer the sampling rate");
    rec.fs = *reader.fs();
    rec.t0 = *reader.start_time();
    return rec;
}

inline void write_two_channel(std::ostream& out, const Waveform& ir, const Waveform& red) {
    if (ir.size() != red.size() || ir.fs() != red.fs()) throw ShapeError("channels are not aligned");
    out << "t,ir,red\n";
    for (std::size_t i = 0; i < ir.size(); ++i) {
        out << format_number(ir.time_at(i)) << ',' << format_number(ir[i]) << ',' << format_number(red[i]) << '\n';
    }
}

inline void write_single(std::ostream& out, const Waveform& w) {
    out << "t,value\n";
    for (std::size_t i = 0; i < w.size(); ++i) {
        out << format_number(w.time_at(i)) << ',' << format_number(w[i]) << '\n';
    }
}

}  // namespace plethwave::csv
