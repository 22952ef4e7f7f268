#pragma once

#include "params.hpp"
#include "waveform.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace lsa {

/// Photon density (cm⁻³) substituted for S in the 1/S and 1/√S phase terms
/// when the cavity is nearly empty.
inline constexpr double kPhotonFloor = 1.0;

/// Default Euler-Maruyama step.
inline constexpr double kDefaultStep = 100e-15;

struct LaserState {
    double carrier_density = 0.0; // cm⁻³
    double photon_density = 0.0;  // cm⁻³
    double phase = 0.0;           // rad, unwrapped
    double time = 0.0;            // s
};

struct RateDerivatives {
    double carrier = 0.0; // cm⁻³ s⁻¹
    double photon = 0.0;  // cm⁻³ s⁻¹
    double phase = 0.0;   // rad s⁻¹
};

/// Independent standard-normal variates for one step, drawn in this order.
struct NoiseDraws {
    double photon = 0.0;
    double phase = 0.0;
    double carrier = 0.0;
};

/// Langevin forces; already carry the 1/√Δt scaling, so Δt·F is the Wiener increment.
struct LangevinForces {
    double carrier = 0.0;
    double photon = 0.0;
    double phase = 0.0;
    bool floored = false; ///< S was replaced by kPhotonFloor in the phase term
};

/// Injected field resolved at one instant.
struct InjectedField {
    double photon_density = 0.0; // cm⁻³
    double phase = 0.0;          // rad
    double detuning = 0.0;       // rad/s
};

struct InjectionTerms {
    double photon = 0.0;
    double phase = 0.0;
    bool floored = false;
};

/// Noise-free free-running rate equations for carriers, photons and phase.
RateDerivatives drift_free_running(const LaserState& state, double current, const LaserParams& p);

/// Spontaneous-emission Langevin forces for step `dt`.
LangevinForces noise_terms(const LaserState& state, const LaserParams& p, double dt, const NoiseDraws& draws);

/// Injection-locking additions to dS/dt and dφ/dt at time state.time.
InjectionTerms oil_terms(const LaserState& state, const InjectedField& field, const LaserParams& p);

/// Per-sample injection phase for a run; resolves the attacker's phase
/// schedule. Per-pulse phases switch at the middle of each off-time so the
/// phase is settled before the next rising edge.
class InjectionSchedule {
public:
    InjectionSchedule(const InjectionSignal& signal, const PulseGrid& grid, std::int64_t n_pulses,
                      const LaserParams& p);

    InjectedField at(std::int64_t sample, double t) const;
    double photon_density() const { return photon_density_; }
    /// Phase applied to each pulse: entry k covers pulse k (empty in constant mode).
    const std::vector<double>& pulse_phases() const { return phases_; }

private:
    double photon_density_ = 0.0;
    double constant_phase_ = 0.0;
    double detuning_ = 0.0;
    std::int64_t samples_per_period_ = 1;
    std::int64_t switch_offset_ = 0;
    std::vector<double> phases_;
};

struct IntegrationOptions {
    double dt = kDefaultStep;
    std::uint64_t seed = 1;
    bool noise = true;
    std::int64_t record_stride = 1; ///< Trace keeps every stride-th sample
};

/// One integration sample handed to streaming observers.
struct StepSample {
    std::int64_t index = 0;
    double current = 0.0; // A, drive current applied over [t, t + dt)
    LaserState state;
    double power = 0.0;   // W
};

struct IntegrationStats {
    std::int64_t steps = 0;
    std::int64_t photon_clamps = 0;  ///< negative S reset to zero
    std::int64_t carrier_clamps = 0; ///< negative N reset to zero
    std::int64_t floor_events = 0;   ///< steps where kPhotonFloor regularised a phase term
};

using SampleObserver = std::function<void(const StepSample&)>;

/// Trajectory sampled every `stride` integration steps.
struct Trace {
    double dt = 0.0;
    std::int64_t stride = 1;
    std::uint64_t seed = 0;
    std::vector<double> time;
    std::vector<double> current;
    std::vector<double> carrier_density;
    std::vector<double> photon_density;
    std::vector<double> phase;
    std::vector<double> power;
    std::vector<double> injection_phases; ///< per-pulse attacker phases, if any
    IntegrationStats stats;

    std::size_t size() const { return time.size(); }
    double sample_spacing() const { return dt * static_cast<double>(stride); }
    LaserState state(std::size_t i) const {
        return {carrier_density[i], photon_density[i], phase[i], time[i]};
    }
};

/// Below-threshold quasi-steady start at the off-time current.
LaserState initial_state(const DriveWaveform& wave, const LaserParams& p);

/// Euler-Maruyama integration of the injection-locked rate equations over
/// wave.n_pulses periods. The observer sees n_pulses·samples_per_period + 1
/// samples, starting with the initial state. Throws NumericalError on a
/// non-finite state.
IntegrationStats integrate_streaming(const LaserParams& p, const DriveWaveform& wave, const InjectionSignal& inj,
                                     const IntegrationOptions& opt, const SampleObserver& observer,
                                     std::vector<double>* injection_phases = nullptr);

Trace integrate(const LaserParams& p, const DriveWaveform& wave, const InjectionSignal& inj,
                const IntegrationOptions& opt);

/// Plain free-running integrator with no injection path at all. Used for the
/// attacker's own gain-switched laser and as a cross-check of the OIL path.
IntegrationStats integrate_free_running_streaming(const LaserParams& p, const DriveWaveform& wave,
                                                  const IntegrationOptions& opt, const SampleObserver& observer);

Trace integrate_free_running(const LaserParams& p, const DriveWaveform& wave, const IntegrationOptions& opt);

} // namespace lsa
