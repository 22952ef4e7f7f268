#pragma once

#include "dynamics.hpp"

#include <iosfwd>
#include <vector>

namespace lsa {

struct PulseMetrics {
    std::int64_t index = 0;      ///< pulse ordinal counted from t = 0
    double energy = 0.0;         // J
    double turn_on_delay = 0.0;  // s, NaN when not lasing
    std::vector<double> peak_times;  // s, relative to the window start
    std::vector<double> peak_powers; // W
    double max_power = 0.0;      // W
    double max_time = 0.0;       // s, relative to the window start
    double phase_at_peak = 0.0;  // rad in [0, 2π), phase at the maximum-power sample
    double floor = 0.0;          // W, mean power over the last quarter of the off-time
    bool lasing = false;
};

struct PulseAnalysisOptions {
    std::int64_t burn_in = 5;          ///< leading periods discarded
    double lasing_ratio = 10.0;        ///< max power over floor needed to count as lasing
    double peak_ratio = 5.0;           ///< local maxima must exceed this multiple of the floor
    double min_peak_separation = 10e-12; // s
    /// Local maxima must stand this fraction of the pulse maximum above the
    /// surrounding valleys; rejects sample-level noise ripple.
    double min_prominence = 0.1;
    double delay_level = 0.1;          ///< turn-on crossing as a fraction of the pulse maximum
    /// Lower bound on the floor estimate (W). The off-time tail alone can sit
    /// far below the spontaneous level of the on-time when I_off is near zero.
    double floor_min = 0.0;
};

/// `opt` with floor_min raised to the laser's spontaneous power at threshold.
PulseAnalysisOptions with_laser_floor(PulseAnalysisOptions opt, const LaserParams& p);

/// Accumulates (power, phase) samples on the integration grid and emits one
/// PulseMetrics per complete drive period. Windows start at the ideal
/// current rising edges, k·samples_per_period; adjacent windows share their
/// boundary sample so the trapezoid sum is lossless.
class PulseAnalyzer {
public:
    /// `stride` is the spacing of pushed samples in integration steps and
    /// must divide samples_per_period.
    PulseAnalyzer(const PulseGrid& grid, const PulseAnalysisOptions& opt = {}, std::int64_t stride = 1);

    void push(double power, double phase);
    void observe(const StepSample& s) {
        if (s.index % stride_ == 0)
            push(s.power, s.state.phase);
    }

    /// Pulses completed so far, burn-in excluded.
    const std::vector<PulseMetrics>& pulses() const { return pulses_; }
    std::vector<PulseMetrics> take() { return std::move(pulses_); }
    /// Integral of power over every completed window, burn-in excluded.
    double analysed_energy() const { return analysed_energy_; }

private:
    void close_window();

    PulseGrid grid_;
    PulseAnalysisOptions opt_;
    std::int64_t stride_;
    std::int64_t window_samples_;
    std::int64_t on_samples_;
    std::int64_t pulse_ = 0;
    std::vector<double> power_;
    std::vector<double> phase_;
    std::vector<PulseMetrics> pulses_;
    double analysed_energy_ = 0.0;
};

/// Metrics for one window of uniformly spaced samples (n_window + 1 points
/// including both edges). `on_count` is the on-time length in samples.
PulseMetrics analyse_window(const std::vector<double>& power, const std::vector<double>& phase, double spacing,
                            std::int64_t on_count, const PulseAnalysisOptions& opt);

std::vector<PulseMetrics> analyse_trace(const Trace& trace, const DriveWaveform& wave,
                                        const PulseAnalysisOptions& opt = {});

/// Energy of every post-burn-in period. Throws InvalidArgument when the trace
/// covers less than one analysable period.
std::vector<double> energy_per_pulse(const Trace& trace, const DriveWaveform& wave,
                                     const PulseAnalysisOptions& opt = {});

std::vector<double> turn_on_delays(const std::vector<PulseMetrics>& pulses);

struct PulseSummary {
    std::int64_t n_pulses = 0;
    std::int64_t n_lasing = 0;
    double mean_energy = 0.0;      // J, all analysed pulses
    double mean_delay = 0.0;       // s, lasing pulses only (NaN if none)
    double mean_first_peak = 0.0;  // W
    double mean_second_peak = 0.0; // W, pulses with a second peak (NaN if none)
    double mean_max_power = 0.0;   // W
};

PulseSummary summarise(const std::vector<PulseMetrics>& pulses);

struct EnergyComparison {
    PulseSummary base;   ///< no injection
    PulseSummary seeded; ///< with injection, same seed
    double increase_percent = 0.0; ///< NaN when the base energy is zero
};

/// Common-seed pair of noise-on runs used by the energy-increase metric.
EnergyComparison compare_energy(const LaserParams& p, const DriveWaveform& wave, double injected_power,
                                const IntegrationOptions& opt, const PulseAnalysisOptions& popt = {});

/// Simulates `wave` without and with `injected_power` (same seed, noise on)
/// and returns 100·(E_inj − E_0)/E_0 over post-burn-in pulses. Requires at
/// least 100 analysed pulses; throws NumericalError if E_0 is zero.
double energy_increase_percent(const LaserParams& p, const DriveWaveform& wave, double injected_power,
                               const IntegrationOptions& opt, const PulseAnalysisOptions& popt = {});

/// Streams `wave` through the integrator and returns per-pulse metrics.
std::vector<PulseMetrics> simulate_pulses(const LaserParams& p, const DriveWaveform& wave,
                                          const InjectionSignal& inj, const IntegrationOptions& opt,
                                          const PulseAnalysisOptions& popt = {},
                                          IntegrationStats* stats = nullptr,
                                          std::vector<double>* injection_phases = nullptr);

/// Per-pulse CSV: index, energy_J, delay_s, n_peaks, peak1_W, phase_rad.
void write_pulse_csv(std::ostream& os, const std::vector<PulseMetrics>& pulses);

/// Wraps an angle into [0, 2π).
double wrap_phase(double phi);

} // namespace lsa
