#pragma once

#include "dynamics.hpp"
#include "pulse_metrics.hpp"
#include "statistics.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace lsa {

enum class Phi0Policy { fixed, uniform_per_trial };

/// Asymmetric Mach-Zehnder interferometer whose arm imbalance equals
/// `delay_periods` drive periods, so pulse k interferes with pulse k − delay.
struct InterferometerModel {
    double phi0 = 0.0; // rad
    std::int64_t delay_periods = 1;
    Phi0Policy policy = Phi0Policy::uniform_per_trial;
};

/// I_out = (I_in / 2)(1 + cos(Δφ + φ0)).
double mzi_output(double intensity_in, double delta_phi, double phi0);

/// Per-pulse interferometer output. Entry j belongs to pulse
/// pulse_index[j] and uses that pulse's peak power as I_in. Non-lasing
/// pulses (either partner) become NaN gaps.
struct Interferogram {
    std::vector<std::int64_t> pulse_index;
    std::vector<double> output;     // W
    std::vector<double> normalised; // I_out / I_in in [0, 1]
};

Interferogram interferogram(const std::vector<PulseMetrics>& pulses, const InterferometerModel& model);
Interferogram interferogram(const Trace& trace, const InterferometerModel& model, const DriveWaveform& wave,
                            const PulseAnalysisOptions& opt = {});

/// Interferogram of a known phase sequence at unit intensity, aligned to the
/// given pulse indices (phases[k] is the phase of pulse k).
Interferogram phase_interferogram(const std::vector<double>& phases, const std::vector<std::int64_t>& pulse_index,
                                  const InterferometerModel& model);

/// How the attacker obtains her reference stream.
enum class EveMode {
    reference, ///< her recorded injection phases through her own interferometer
    simulated  ///< her own gain-switched laser sets the injection phases
};

/// Everything needed to run the correlation protocol at one injected power.
struct CorrelationSetup {
    LaserParams alice;
    LaserParams eve;
    DriveWaveform wave;          ///< n_pulses includes burn-in
    PhaseMode phase_mode = PhaseMode::per_pulse_uniform;
    double constant_phase = 0.0; ///< used by constant phase mode
    double detuning = 0.0;       // rad/s
    EveMode eve_mode = EveMode::reference;
    Phi0Policy phi0_policy = Phi0Policy::uniform_per_trial;
    double fixed_phi0_alice = 0.0; ///< used by the fixed policy
    double fixed_phi0_eve = 0.0;
    IntegrationOptions integration;  ///< seed field ignored; seeds come from master_seed
    PulseAnalysisOptions analysis;
    std::int64_t max_lag = 8;    ///< lag search half-width in pulses
};

struct TrialSeeds {
    std::uint64_t alice_noise = 0;
    std::uint64_t injection_phase = 0;
    std::uint64_t eve_noise = 0;
    double phi0_alice = 0.0;
    double phi0_eve = 0.0;
};

/// Seeds and interferometer offsets of trial `trial`; independent of the
/// injected power so baseline and injected runs share noise realisations.
TrialSeeds trial_seeds(std::uint64_t master_seed, std::int64_t trial);

struct TrialResult {
    std::int64_t trial = 0;
    double rho = 0.0;            ///< Pearson ρ at the calibrated lag (0: streams share pulse indices)
    std::int64_t best_lag = 0;   ///< lag of max |ρ| in the search window, pulses
    double best_lag_rho = 0.0;
    double phi0_alice = 0.0;
    double phi0_eve = 0.0;
    std::int64_t lasing_pulses = 0;
    IntegrationStats stats;
};

/// One trial: simulate Alice under injection and Eve's reference, build both
/// interferograms, correlate. Interferometer offsets come from `seeds` unless
/// the setup fixes them.
TrialResult lsa_correlation_trial(const CorrelationSetup& setup, double injected_power, const TrialSeeds& seeds,
                                  std::int64_t trial = 0);

struct CorrelationReport {
    double injected_power = 0.0; // W
    std::vector<double> per_trial_rho;
    std::vector<TrialResult> trials;
    double best_lag = 0.0;       // s, lag of the largest |ρ| among trials
    double rho_max = 0.0;
    double rho_min = 0.0;
    double baseline_max = 0.0;
    double baseline_min = 0.0;
    std::int64_t n_trials = 0;
    double window = 0.0;         // s, analysed span per trial
};

/// Runs trials in parallel on `jobs` workers (0 = hardware concurrency).
std::vector<TrialResult> run_trials(const CorrelationSetup& setup, double injected_power, std::uint64_t master_seed,
                                    std::int64_t n_trials, int jobs);

/// Max/min envelope over n_trials trials with fresh φ0 per trial, plus the
/// zero-injection baseline with identical seeds. Pass `baseline` to reuse
/// zero-power trials already computed.
CorrelationReport envelope_protocol(const CorrelationSetup& setup, double injected_power, std::uint64_t master_seed,
                                    std::int64_t n_trials, int jobs,
                                    const std::vector<TrialResult>* baseline = nullptr);

struct CorrelationCurve {
    std::vector<CorrelationReport> points;
    std::optional<double> onset_power;  ///< smallest power with rho_max > baseline_max
    double ceiling = 0.0;               ///< ρ of a fully locked run with aligned interferometers
    double ceiling_power = 0.0;
};

/// Envelope at every grid power (sharing one baseline) and the locked-run ceiling.
CorrelationCurve correlation_vs_power_curve(const CorrelationSetup& setup, const std::vector<double>& powers,
                                            std::uint64_t master_seed, std::int64_t n_trials, int jobs,
                                            double ceiling_power = 480e-6);

/// ρ of one trial at `power` with both interferometers at φ0 = 0.
double locked_ceiling(const CorrelationSetup& setup, double power, std::uint64_t master_seed);

struct RandomnessDiagnostics {
    std::int64_t n = 0;
    KsResult arcsine;          ///< on I_out / I_in
    double acf_max_abs = 0.0;  ///< max |r| at lags 1..max_lag
    double acf_band = 0.0;     ///< 4/√n
    std::int64_t acf_lags = 100;
    double significance = 0.01;
    bool arcsine_pass = false;
    bool acf_pass = false;
    bool pass() const { return arcsine_pass && acf_pass; }
};

/// Arcsine-law KS test and autocorrelation band check on an interferogram.
RandomnessDiagnostics randomness_diagnostics(const Interferogram& ig, std::int64_t max_lag = 100,
                                             double significance = 0.01);

/// Work-queue parallel loop; rethrows the first exception after all workers stop.
void parallel_for(std::int64_t n, int jobs, const std::function<void(std::int64_t)>& body);

} // namespace lsa
