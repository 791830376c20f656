// plethwave: command-line front end for fixture generation, delineation,
// windowed vitals with alerts, and the scale/noise studies.
//
// Exit codes: 0 success, 2 usage, 3 input, 4 degenerate signal, 1 other.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "plethwave/csv.hpp"
#include "plethwave/delineate.hpp"
#include "plethwave/dwt.hpp"
#include "plethwave/harness.hpp"
#include "plethwave/monitor.hpp"
#include "plethwave/signal.hpp"
#include "plethwave/vitals.hpp"

namespace {

using namespace plethwave;
using ordered_json = nlohmann::ordered_json;

constexpr int exit_ok = 0;
constexpr int exit_other = 1;
constexpr int exit_usage = 2;
constexpr int exit_input = 3;
constexpr int exit_degenerate = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Output target: a file when a path is given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw InputError("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

csv::Recording read_recording(const std::string& path) {
    if (path == "-") return csv::read(std::cin);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    return csv::read(in);
}

ordered_json number_or_null(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json number_or_string(double v) {
    if (std::isfinite(v)) return v;
    return csv::format_number(v);
}

ordered_json to_json(const VitalsReport& r) {
    ordered_json j;
    j["window_start_s"] = r.window_start_s;
    j["window_end_s"] = r.window_end_s;
    j["hr_bpm"] = number_or_null(r.heart_rate_bpm);
    j["r"] = number_or_null(r.r_value);
    j["spo2"] = number_or_null(r.spo2_percent);
    j["held"] = r.held;
    return j;
}

ordered_json to_json(const AlertEvent& e) {
    ordered_json j;
    j["kind"] = to_string(e.kind);
    j["window_start_s"] = e.window_start_s;
    j["value"] = e.value;
    j["rule"] = e.rule;
    return j;
}

/// Parses "a:b" (inclusive range) or "a,b,c".
std::vector<int> parse_scales(const std::string& spec) {
    std::vector<int> out;
    try {
        const auto colon = spec.find(':');
        if (colon != std::string::npos) {
            const int lo = std::stoi(spec.substr(0, colon));
            const int hi = std::stoi(spec.substr(colon + 1));
            if (hi < lo) throw UsageError("scale range '" + spec + "' is empty");
            for (int s = lo; s <= hi; ++s) out.push_back(s);
        } else {
            std::stringstream ss(spec);
            std::string item;
            while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
        }
    } catch (const std::logic_error&) {
        throw UsageError("cannot parse scale list '" + spec + "'");
    }
    if (out.empty()) throw UsageError("scale list is empty");
    return out;
}

/// Reads `key=value` lines (blank lines and `#` comments ignored) and turns
/// them into `--key value` arguments that precede the command-line ones, so
/// explicit flags win.
std::vector<std::string> config_arguments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::vector<std::string> args;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = csv::trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw InputError(path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key(csv::trim(body.substr(0, eq)));
        const std::string value(csv::trim(body.substr(eq + 1)));
        if (key.empty()) throw InputError(path + ":" + std::to_string(line_no) + ": empty key");
        const std::string flag = key.size() == 1 ? "-" + key : "--" + key;
        if (value == "true") {
            args.push_back(flag);
        } else if (value != "false") {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

/// Splices config-file arguments in right after the subcommand name.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            const auto extra = config_arguments(args[i + 1]);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            const std::size_t at = args.size() > 1 ? 2 : 1;
            args.insert(args.begin() + static_cast<std::ptrdiff_t>(std::min(at, args.size())), extra.begin(), extra.end());
            break;
        }
    }
    return args;
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
    PlethConfig pleth;
    double red_ac = 0.5;
    double red_dc = 1.0;
    double snr = snr_infinite;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> red_seed;
    std::string drift = "none";
    double drift_amp = 0.0;
    double drift_freq = 0.0;
    double drift_onset = 0.0;
    bool single = false;
    std::string out;
};

void add_generate(CLI::App& app, GenerateArgs& a) {
    auto* cmd = app.add_subcommand("generate", "Write a synthetic plethysmograph CSV");
    cmd->add_option("--hr", a.pleth.heart_rate_bpm, "Heart rate (bpm)")->capture_default_str();
    cmd->add_option("--dur", a.pleth.duration_s, "Duration (s)")->capture_default_str();
    cmd->add_option("--fs", a.pleth.fs, "Sampling rate (Hz)")->capture_default_str();
    cmd->add_option("--ac", a.pleth.ac_amplitude, "IR pulse height")->capture_default_str();
    cmd->add_option("--dc", a.pleth.dc_level, "IR DC level")->capture_default_str();
    cmd->add_option("--red-ac", a.red_ac, "Red pulse height")->capture_default_str();
    cmd->add_option("--red-dc", a.red_dc, "Red DC level")->capture_default_str();
    cmd->add_option("--width", a.pleth.pulse_width_factor, "Pulse sigma / beat period")->capture_default_str();
    cmd->add_flag("--dicrotic", a.pleth.dicrotic, "Add a secondary (dicrotic) bump");
    cmd->add_option("--snr", a.snr, "Noise SNR in dB (omit for a clean signal)");
    cmd->add_option("--seed", a.seed, "Noise seed")->capture_default_str();
    cmd->add_option("--red-seed", a.red_seed, "Red-channel noise seed (default: --seed)");
    cmd->add_option("--drift", a.drift, "Drift kind")
        ->check(CLI::IsMember({"none", "linear", "sinusoidal", "step"}))
        ->capture_default_str();
    cmd->add_option("--drift-amp", a.drift_amp, "Drift amplitude on the IR channel")->capture_default_str();
    cmd->add_option("--drift-freq", a.drift_freq, "Sinusoidal drift frequency (Hz)")->capture_default_str();
    cmd->add_option("--drift-onset", a.drift_onset, "Step drift onset (s)")->capture_default_str();
    cmd->add_flag("--single", a.single, "Write only the IR channel as t,value");
    cmd->add_option("-o,--output", a.out, "Output file (default stdout)");
}

std::optional<DriftSpec> drift_spec(const GenerateArgs& a, double gain) {
    if (a.drift == "none") return std::nullopt;
    DriftSpec spec;
    spec.kind = a.drift == "linear" ? DriftKind::linear
                : a.drift == "sinusoidal" ? DriftKind::sinusoidal
                                          : DriftKind::step;
    spec.amplitude = a.drift_amp * gain;
    spec.frequency_hz = a.drift_freq;
    spec.onset_s = a.drift_onset;
    return spec;
}

/// Clean channel, then noise (SNR refers to the pulsatile part), then drift.
Waveform synthesize_channel(const PlethConfig& cfg, double snr, std::uint64_t seed,
                            const std::optional<DriftSpec>& drift) {
    Waveform w = generate_pleth(cfg);
    if (snr != snr_infinite) w = add_noise(w, snr, seed);
    if (drift) w = add_drift(w, *drift);
    return w;
}

int run_generate(const GenerateArgs& a) {
    PlethConfig ir_cfg = a.pleth;
    ir_cfg.label = Channel::infrared;
    PlethConfig red_cfg = a.pleth;
    red_cfg.label = Channel::red;
    red_cfg.ac_amplitude = a.red_ac;
    red_cfg.dc_level = a.red_dc;
    validate(ir_cfg);
    validate(red_cfg);

    const Waveform ir = synthesize_channel(ir_cfg, a.snr, a.seed, drift_spec(a, 1.0));
    if (a.single) {
        Output out(a.out);
        csv::write_single(out.stream(), ir);
        return exit_ok;
    }
    // Drift scales with each channel's DC level (intensity changes are multiplicative).
    const double red_gain = a.pleth.dc_level != 0.0 ? a.red_dc / a.pleth.dc_level : 1.0;
    const Waveform red = synthesize_channel(red_cfg, a.snr, a.red_seed.value_or(a.seed), drift_spec(a, red_gain));
    Output out(a.out);
    csv::write_two_channel(out.stream(), ir, red);
    return exit_ok;
}

// --- delineate --------------------------------------------------------------

struct DelineateArgs {
    std::string input = "-";
    double scale = default_scale;
    double fraction = default_threshold_fraction;
    int levels = 8;
    std::string channel = "ir";
    std::string debug;
    std::string out;
};

void add_delineate(CLI::App& app, DelineateArgs& a) {
    auto* cmd = app.add_subcommand("delineate", "Detect peaks and valleys in a waveform CSV");
    cmd->add_option("input", a.input, "Input CSV ('-' for stdin)")->capture_default_str();
    cmd->add_option("--scale", a.scale, "Wavelet scale")->check(CLI::Range(min_scale, max_scale))->capture_default_str();
    cmd->add_option("--fraction", a.fraction, "Threshold fraction of max |coeff|")->capture_default_str();
    cmd->add_option("--levels", a.levels, "Haar levels for the debug baseline")->capture_default_str();
    cmd->add_option("--channel", a.channel, "Channel of a two-channel file")
        ->check(CLI::IsMember({"ir", "red"}))
        ->capture_default_str();
    cmd->add_option("--debug", a.debug, "Write per-sample t,value,coeff,thresh_state,baseline CSV here");
    cmd->add_option("-o,--output", a.out, "Output file (default stdout)");
}

int run_delineate(const DelineateArgs& a) {
    const auto rec = read_recording(a.input);
    const Waveform x = a.channel == "red" ? rec.red_channel() : rec.first_channel();
    const auto d = delineate(x, DelineationOptions{a.scale, a.fraction});

    Output out(a.out);
    auto& os = out.stream();
    os << "index,t,kind\n";
    for (const auto& f : d.fiducials.ordered()) {
        os << f.index << ',' << csv::format_number(rec.t0 + x.time_at(f.index)) << ',' << to_string(f.kind) << '\n';
    }

    if (!a.debug.empty()) {
        const auto baseline = extract_baseline(x, a.levels);
        Output dbg(a.debug);
        auto& ds = dbg.stream();
        ds << "t,value,coeff,thresh_state,baseline\n";
        for (std::size_t i = 0; i < x.size(); ++i) {
            ds << csv::format_number(rec.t0 + x.time_at(i)) << ',' << csv::format_number(x[i]) << ','
               << csv::format_number(d.transform.coeffs[i]) << ',' << static_cast<int>(d.threshold.values[i]) << ','
               << csv::format_number(baseline[i]) << '\n';
        }
    }
    return exit_ok;
}

// --- vitals -----------------------------------------------------------------

struct VitalsArgs {
    std::string input = "-";
    WindowConfig windows;
    VitalsOptions vitals;
    AlertRule rule;
    std::string out;
};

void add_vitals(CLI::App& app, VitalsArgs& a) {
    auto* cmd = app.add_subcommand("vitals", "Windowed heart rate / SpO2 with alert events (JSON lines)");
    cmd->add_option("input", a.input, "Two-channel CSV ('-' streams stdin)")->capture_default_str();
    cmd->add_option("--window", a.windows.window_s, "Window length (s)")->capture_default_str();
    cmd->add_option("--overlap", a.windows.overlap, "Window overlap fraction")->capture_default_str();
    cmd->add_option("--scale", a.vitals.scale, "Wavelet scale")
        ->check(CLI::Range(min_scale, max_scale))
        ->capture_default_str();
    cmd->add_option("--fraction", a.vitals.fraction, "Threshold fraction")->capture_default_str();
    cmd->add_option("--levels", a.vitals.levels, "Haar levels for the baseline")->capture_default_str();
    cmd->add_option("--spo2-low", a.rule.spo2_low, "SpO2 alert threshold (%)")->capture_default_str();
    cmd->add_option("--hr-low", a.rule.hr_low, "Low heart-rate alert (bpm)")->capture_default_str();
    cmd->add_option("--hr-high", a.rule.hr_high, "High heart-rate alert (bpm)")->capture_default_str();
    cmd->add_option("--hold-limit", a.rule.hold_limit, "Held windows before sensor_fault")->capture_default_str();
    cmd->add_option("-o,--output", a.out, "Output file (default stdout)");
}

int run_vitals(const VitalsArgs& a) {
    std::ifstream file;
    std::istream* in = &std::cin;
    if (a.input != "-") {
        file.open(a.input, std::ios::binary);
        if (!file) throw InputError("cannot open '" + a.input + "'");
        in = &file;
    }
    csv::Reader reader(*in);
    if (reader.layout() != csv::Layout::two_channel) throw InputError("vitals needs a t,ir,red file");

    Output out(a.out);
    auto& os = out.stream();
    auto sink = [&](const VitalsReport& r, const std::vector<AlertEvent>& events) {
        os << to_json(r).dump() << '\n';
        for (const auto& e : events) os << to_json(e).dump() << '\n';
        os.flush();
    };

    // The sampling rate is only known after two rows; hold the first one back.
    std::optional<csv::Row> first;
    std::optional<StreamingMonitor> monitor;
    while (auto row = reader.next()) {
        if (!monitor) {
            if (!first) {
                first = row;
                continue;
            }
            monitor.emplace(*reader.fs(), *reader.start_time(), a.windows, a.vitals, a.rule);
            monitor->push(first->first, first->second, sink);
        }
        monitor->push(row->first, row->second, sink);
    }
    return exit_ok;
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
    std::string scales = "4:9";
    StudyOptions study;
    PlethConfig fixture = study_fixture();
    bool ladder = false;
    int scale = 6;
    std::vector<double> snrs = default_ladder_snrs();
    std::string log;
    std::string out;
};

void add_sweep(CLI::App& app, SweepArgs& a) {
    auto* cmd = app.add_subcommand("sweep", "Minimum-SNR scale sweep, or a noise ladder at one scale");
    cmd->add_option("--scales", a.scales, "Scales as lo:hi or a,b,c")->capture_default_str();
    cmd->add_option("--seeds", a.study.seeds, "Noise seeds per point")->capture_default_str();
    cmd->add_option("--seed", a.study.seed_base, "First seed")->capture_default_str();
    cmd->add_option("--hr-tol", a.study.hr_tol_bpm, "Heart-rate tolerance (bpm)")->capture_default_str();
    cmd->add_option("--snr-min", a.study.snr_min_db, "Lowest SNR searched (dB)")->capture_default_str();
    cmd->add_option("--snr-max", a.study.snr_max_db, "Highest SNR searched (dB)")->capture_default_str();
    cmd->add_option("--hr", a.fixture.heart_rate_bpm, "Fixture heart rate (bpm)")->capture_default_str();
    cmd->add_option("--dur", a.fixture.duration_s, "Fixture duration (s)")->capture_default_str();
    cmd->add_option("--fs", a.fixture.fs, "Fixture sampling rate (Hz)")->capture_default_str();
    cmd->add_flag("--dicrotic", a.fixture.dicrotic, "Use a dicrotic fixture");
    cmd->add_flag("--ladder", a.ladder, "Run the fixed-scale noise ladder instead");
    cmd->add_option("--scale", a.scale, "Ladder scale")->check(CLI::Range(1, 16))->capture_default_str();
    cmd->add_option("--snrs", a.snrs, "Ladder SNRs (dB)")->delimiter(',')->capture_default_str();
    cmd->add_option("--log", a.log, "Write a JSON-lines trial log here");
    cmd->add_option("-o,--output", a.out, "Output file (default stdout)");
}

int run_sweep(const SweepArgs& a) {
    std::unique_ptr<Output> log_out;
    TrialLog log;
    if (!a.log.empty()) {
        log_out = std::make_unique<Output>(a.log);
        log = [&os = log_out->stream()](const TrialRecord& t) {
            ordered_json j;
            j["scale"] = t.scale;
            j["snr_db"] = number_or_string(t.snr_db);
            j["seed"] = t.seed;
            j["hr_bpm"] = number_or_null(t.hr_bpm);
            j["within_tolerance"] = t.within_tolerance;
            j["delineate_us"] = t.delineate_us;
            os << j.dump() << '\n';
        };
    }

    Output out(a.out);
    auto& os = out.stream();
    if (a.ladder) {
        const auto rep = run_noise_ladder(a.scale, a.snrs, a.fixture, a.study, log);
        os << "snr_db,pass_fraction,median_hr_bpm,pass\n";
        for (const auto& r : rep.rows) {
            os << csv::format_number(r.snr_db) << ',' << csv::format_number(r.pass_fraction) << ','
               << csv::format_number(r.median_hr_bpm) << ',' << (r.pass ? "pass" : "fail") << '\n';
        }
        return exit_ok;
    }
    const auto result = run_scale_sweep(parse_scales(a.scales), a.fixture, a.study, log);
    os << "scale,min_snr_db\n";
    for (const auto& r : result.rows) os << r.scale << ',' << csv::format_number(r.min_snr_db) << '\n';
    return exit_ok;
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::degenerate_signal:
        case ErrorKind::insufficient_fiducials:
            return exit_degenerate;
        case ErrorKind::config:
            return exit_usage;
        case ErrorKind::input:
        case ErrorKind::shape:
        case ErrorKind::domain:
            return exit_input;
    }
    return exit_other;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wavelet delineation of raw plethysmograph signals"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_help_all_flag("--help-all");

    GenerateArgs gen;
    DelineateArgs del;
    VitalsArgs vit;
    SweepArgs swp;
    add_generate(app, gen);
    add_delineate(app, del);
    add_vitals(app, vit);
    add_sweep(app, swp);

    try {
        auto args = expand_config(argc, argv);
        std::vector<const char*> cargv;
        for (const auto& s : args) cargv.push_back(s.c_str());
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << "plethwave: " << e.what() << '\n';
        return exit_code_for(e.kind());
    }

    try {
        if (app.got_subcommand("generate")) return run_generate(gen);
        if (app.got_subcommand("delineate")) return run_delineate(del);
        if (app.got_subcommand("vitals")) return run_vitals(vit);
        if (app.got_subcommand("sweep")) return run_sweep(swp);
    } catch (const UsageError& e) {
        std::cerr << "plethwave: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        std::cerr << "plethwave: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "plethwave: " << e.what() << '\n';
        return exit_other;
    }
    return exit_usage;
}
