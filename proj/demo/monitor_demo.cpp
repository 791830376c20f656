// Streams a synthetic two-channel recording with a motion burst through the
// monitor and prints each window.

#include <cstdio>

#include "plethwave/monitor.hpp"
#include "plethwave/signal.hpp"

using namespace plethwave;

int main() {
    PlethConfig ir_cfg;
    ir_cfg.heart_rate_bpm = 72.0;
    ir_cfg.duration_s = 60.0;
    PlethConfig red_cfg = ir_cfg;
    red_cfg.ac_amplitude = 0.45;
    red_cfg.dc_level = 1.0;
    red_cfg.label = Channel::red;

    // Baseline jump at 25 s stands in for a motion artefact.
    auto ir = add_drift(add_noise(generate_pleth(ir_cfg), 20.0, 1), {DriftKind::step, 4.0, 0.0, 25.0});
    auto red = add_drift(add_noise(generate_pleth(red_cfg), 20.0, 2), {DriftKind::step, 2.0, 0.0, 25.0});

    StreamingMonitor mon(ir.fs(), 0.0, {}, {}, {});
    for (std::size_t i = 0; i < ir.size(); ++i) {
        mon.push(ir[i], red[i], [](const VitalsReport& r, const std::vector<AlertEvent>& alerts) {
            if (r.has_values()) {
                std::printf("%5.1f-%5.1f s  HR %6.1f  SpO2 %5.1f%s\n", r.window_start_s, r.window_end_s,
                            *r.heart_rate_bpm, *r.spo2_percent, r.held ? "  (held)" : "");
            } else {
                std::printf("%5.1f-%5.1f s  no reading\n", r.window_start_s, r.window_end_s);
            }
            for (const auto& a : alerts) std::printf("    alert %s value %.1f\n", to_string(a.kind), a.value);
        });
    }
}
