// Deterministic synthetic data: bearing run-to-failure vibration and
// turbofan-style multi-sensor fleets. These exist to close the loop for
// pipeline tests without proprietary datasets, not for physical fidelity.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "ptk/prognostics.hpp"
#include "ptk/rng.hpp"
#include "ptk/signal.hpp"
#include "ptk/spectral.hpp"

namespace ptk {

struct BearingSimConfig {
    std::optional<Defect> fault;  // nullopt = healthy bearing
    double rpm = 1800.0;
    double sample_rate_hz = 25600.0;
    std::size_t snapshot_len = 2560;
    std::size_t snapshots = 100;
    double severity_exponent = 1.5; // severity = (i/snapshots)^exponent
    double noise_level = 0.05;
    double impulse_amplitude = 1.0;
    double resonance_hz = 3000.0;
    double resonance_decay = 800.0; // 1/s
    std::uint64_t seed = 0;
};

// Each snapshot: shaft tone + amplitude-growing impulse train at the
// defect frequency convolved with a decaying resonance + a defect-rate
// modulation tone + Gaussian noise. Snapshot i derives its own child
// stream, so generation is order-independent and bit-reproducible.
inline std::vector<Signal> synth_bearing_run(const BearingSimConfig& cfg) {
    std::vector<Signal> snapshots;
    snapshots.reserve(cfg.snapshots);
    const double shaft_hz = cfg.rpm / 60.0;
    const double defect_hz = cfg.fault ? fault_frequency(*cfg.fault, cfg.rpm) : 0.0;

    for (std::size_t snap = 0; snap < cfg.snapshots; ++snap) {
        Rng rng = Rng::child(cfg.seed, snap);
        const double severity =
            std::pow(static_cast<double>(snap) / static_cast<double>(cfg.snapshots),
                     cfg.severity_exponent);

        std::vector<double> samples(cfg.snapshot_len, 0.0);
        const double shaft_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        for (std::size_t t = 0; t < cfg.snapshot_len; ++t) {
            const double time = static_cast<double>(t) / cfg.sample_rate_hz;
            samples[t] = std::sin(2.0 * std::numbers::pi * shaft_hz * time + shaft_phase) +
                         0.25 * std::sin(4.0 * std::numbers::pi * shaft_hz * time + 2.0 * shaft_phase);
        }

        if (cfg.fault && severity > 0.0) {
            const double amp = cfg.impulse_amplitude * severity;
            // load-zone modulation puts a clean spectral line at the
            // defect frequency itself
            const double mod_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
            for (std::size_t t = 0; t < cfg.snapshot_len; ++t) {
                const double time = static_cast<double>(t) / cfg.sample_rate_hz;
                samples[t] += 0.5 * amp *
                              std::sin(2.0 * std::numbers::pi * defect_hz * time + mod_phase);
            }

            const double period_s = 1.0 / defect_hz;
            const double first_hit = rng.uniform(0.0, period_s);
            const double ring_duration = 6.0 / cfg.resonance_decay;
            const double snapshot_s = static_cast<double>(cfg.snapshot_len) / cfg.sample_rate_hz;
            for (double hit = first_hit; hit < snapshot_s; hit += period_s) {
                const double hit_amp = amp * (1.0 + 0.1 * rng.gaussian());
                const auto start = static_cast<std::size_t>(hit * cfg.sample_rate_hz);
                const auto span = static_cast<std::size_t>(ring_duration * cfg.sample_rate_hz);
                for (std::size_t t = start; t < std::min(cfg.snapshot_len, start + span); ++t) {
                    const double tau = static_cast<double>(t) / cfg.sample_rate_hz - hit;
                    samples[t] += hit_amp * std::exp(-cfg.resonance_decay * tau) *
                                  std::sin(2.0 * std::numbers::pi * cfg.resonance_hz * tau);
                }
            }
        }

        if (cfg.noise_level > 0.0)
            for (auto& v : samples) v += rng.gaussian(0.0, cfg.noise_level);

        snapshots.emplace_back(std::move(samples), cfg.sample_rate_hz);
    }
    return snapshots;
}

struct FleetSimConfig {
    std::size_t units = 100;
    std::size_t sensors = 21;
    std::size_t life_min = 128;
    std::size_t life_max = 362;
    double noise_level = 0.02;
    std::vector<int> drift_signs; // per sensor; defaults to alternating +/-
    std::uint64_t seed = 0;
};

// Per-unit life drawn uniformly in [life_min, life_max]; sensor j drifts
// monotonically as sign_j * amp_j * (t/L)^2 plus noise around a fixed
// baseline. Unit ids are sequential from 1.
inline std::vector<RunToFailureUnit> synth_turbofan_fleet(const FleetSimConfig& cfg) {
    if (cfg.life_min < 30 || cfg.sensors < 2) throw Error("fleet config out of range");
    std::vector<int> signs = cfg.drift_signs;
    if (signs.empty()) {
        signs.resize(cfg.sensors);
        for (std::size_t j = 0; j < cfg.sensors; ++j) signs[j] = (j % 2 == 0) ? 1 : -1;
    }
    if (signs.size() != cfg.sensors) throw ShapeMismatch("drift_signs size != sensors");

    std::vector<RunToFailureUnit> fleet;
    fleet.reserve(cfg.units);
    for (std::size_t u = 0; u < cfg.units; ++u) {
        Rng rng = Rng::child(cfg.seed, u);
        const std::size_t life =
            cfg.life_min + static_cast<std::size_t>(rng.below(cfg.life_max - cfg.life_min + 1));

        RunToFailureUnit unit;
        unit.unit_id = static_cast<int>(u) + 1;
        unit.cycles.reserve(life);

        std::vector<double> setting_base(3);
        for (auto& s : setting_base) s = rng.uniform(-1.0, 1.0);

        for (std::size_t t = 0; t < life; ++t) {
            CycleRecord rec;
            rec.cycle = static_cast<int>(t) + 1;
            rec.settings.resize(3);
            for (std::size_t s = 0; s < 3; ++s)
                rec.settings[s] = setting_base[s] + rng.gaussian(0.0, 0.001);
            rec.sensors.resize(cfg.sensors);
            const double frac = static_cast<double>(t) / static_cast<double>(life);
            for (std::size_t j = 0; j < cfg.sensors; ++j) {
                const double base = 100.0 + 10.0 * static_cast<double>(j);
                const double amp = 5.0 * (1.0 + static_cast<double>(j % 4));
                const double drift = signs[j] * amp * frac * frac;
                rec.sensors[j] = base + drift + rng.gaussian(0.0, cfg.noise_level * amp);
            }
            unit.cycles.push_back(std::move(rec));
        }
        fleet.push_back(std::move(unit));
    }
    return fleet;
}

} // namespace ptk
