#include "dynamics.hpp"

#include "error.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace lsa {

RateDerivatives drift_free_running(const LaserState& state, double current, const LaserParams& p) {
    const double n = state.carrier_density;
    const double s = state.photon_density;
    const double gain = p.differential_gain * (n - p.transparency_density) / (1.0 + p.gain_compression * s);
    RateDerivatives d;
    d.carrier = current / (p.elementary_charge * p.active_volume) - n / p.carrier_lifetime - gain * s;
    d.photon = p.confinement * gain * s - s / p.photon_lifetime +
               p.confinement * p.spontaneous_coupling * n / p.carrier_lifetime;
    d.phase = 0.5 * p.linewidth_enhancement *
              (p.confinement * p.differential_gain * (n - p.transparency_density) - 1.0 / p.photon_lifetime);
    return d;
}

LangevinForces noise_terms(const LaserState& state, const LaserParams& p, double dt, const NoiseDraws& draws) {
    const double n = std::max(state.carrier_density, 0.0);
    const double s = std::max(state.photon_density, 0.0);
    const double s_eff = std::max(s, kPhotonFloor);
    const double spont = p.confinement * p.spontaneous_coupling * n / p.carrier_lifetime;
    LangevinForces f;
    f.photon = std::sqrt(2.0 * spont * s / dt) * draws.photon;
    f.phase = std::sqrt(spont / (2.0 * s_eff * dt)) * draws.phase;
    const double fz = std::sqrt(2.0 * n / (p.active_volume * p.carrier_lifetime * dt)) * draws.carrier;
    f.carrier = fz - f.photon / p.confinement;
    f.floored = s < kPhotonFloor;
    return f;
}

InjectionTerms oil_terms(const LaserState& state, const InjectedField& field, const LaserParams& p) {
    const double s = std::max(state.photon_density, 0.0);
    const double s_eff = std::max(s, kPhotonFloor);
    const double offset = state.phase - field.phase - field.detuning * state.time;
    InjectionTerms t;
    t.photon = 2.0 * p.injection_coupling * std::sqrt(field.photon_density * s) * std::cos(offset);
    t.phase = -p.injection_coupling * std::sqrt(field.photon_density / s_eff) * std::sin(offset);
    t.floored = field.photon_density > 0.0 && s < kPhotonFloor;
    return t;
}

InjectionSchedule::InjectionSchedule(const InjectionSignal& signal, const PulseGrid& grid, std::int64_t n_pulses,
                                     const LaserParams& p)
    : photon_density_(power_to_photon_density(signal.power, p)),
      constant_phase_(signal.phase),
      detuning_(signal.detuning),
      samples_per_period_(grid.samples_per_period),
      switch_offset_(grid.on_samples + (grid.samples_per_period - grid.on_samples) / 2) {
    signal.validate();
    const auto needed = static_cast<std::size_t>(n_pulses + 1);
    switch (signal.phase_mode) {
    case PhaseMode::constant:
        break;
    case PhaseMode::per_pulse_uniform: {
        std::mt19937_64 engine(signal.phase_seed);
        std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
        phases_.resize(needed);
        for (auto& ph : phases_)
            ph = uniform(engine);
        break;
    }
    case PhaseMode::sequence:
        if (signal.phases.size() < needed)
            throw InvalidArgument("injection phase sequence shorter than n_pulses + 1");
        phases_.assign(signal.phases.begin(), signal.phases.begin() + static_cast<std::ptrdiff_t>(needed));
        break;
    }
}

InjectedField InjectionSchedule::at(std::int64_t sample, double /*t*/) const {
    InjectedField f{photon_density_, constant_phase_, detuning_};
    if (!phases_.empty()) {
        const std::int64_t period = sample / samples_per_period_;
        const std::int64_t pos = sample % samples_per_period_;
        auto idx = static_cast<std::size_t>(period + (pos >= switch_offset_ ? 1 : 0));
        f.phase = phases_[std::min(idx, phases_.size() - 1)];
    }
    return f;
}

LaserState initial_state(const DriveWaveform& wave, const LaserParams& p) {
    LaserState s;
    s.carrier_density = wave.off_current * p.carrier_lifetime / (p.elementary_charge * p.active_volume);
    s.photon_density = p.confinement * p.spontaneous_coupling * s.carrier_density * p.photon_lifetime /
                       p.carrier_lifetime;
    return s;
}

namespace {

void check_step(const LaserParams& p, const IntegrationOptions& opt) {
    p.validate();
    if (!(opt.dt > 0.0) || !std::isfinite(opt.dt))
        throw InvalidArgument("integration step must be finite and > 0");
    if (opt.dt > p.photon_lifetime / 10.0) {
        std::ostringstream os;
        os << "integration step " << opt.dt << " s exceeds photon_lifetime/10 = " << p.photon_lifetime / 10.0
           << " s";
        throw InvalidArgument(os.str());
    }
    if (opt.record_stride < 1)
        throw InvalidArgument("record stride must be >= 1");
}

[[noreturn]] void fail_non_finite(std::int64_t step, const LaserState& before, const LaserState& after,
                                  double current, double injected) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite laser state at step " << step << " (t = " << before.time << " s): "
       << "N " << before.carrier_density << " -> " << after.carrier_density << ", S " << before.photon_density
       << " -> " << after.photon_density << ", phi " << before.phase << " -> " << after.phase
       << "; inputs I = " << current << " A, S_inj = " << injected << " cm^-3";
    throw NumericalError(os.str());
}

bool finite_state(const LaserState& s) {
    return std::isfinite(s.carrier_density) && std::isfinite(s.photon_density) && std::isfinite(s.phase);
}

} // namespace

IntegrationStats integrate_streaming(const LaserParams& p, const DriveWaveform& wave, const InjectionSignal& inj,
                                     const IntegrationOptions& opt, const SampleObserver& observer,
                                     std::vector<double>* injection_phases) {
    check_step(p, opt);
    CurrentSource source(wave, opt.dt);
    const PulseGrid& grid = source.grid();
    const InjectionSchedule schedule(inj, grid, wave.n_pulses, p);
    if (injection_phases)
        *injection_phases = schedule.pulse_phases();

    NormalSource normal(opt.seed);
    const double power_factor = power_per_photon_density(p);
    const double dt = opt.dt;
    const std::int64_t n_steps = wave.n_pulses * grid.samples_per_period;

    IntegrationStats stats;
    LaserState st = initial_state(wave, p);
    for (std::int64_t i = 0; i < n_steps; ++i) {
        st.time = static_cast<double>(i) * dt;
        const double current = source.next();
        if (observer)
            observer(StepSample{i, current, st, power_factor * st.photon_density});

        const InjectedField field = schedule.at(i, st.time);
        const RateDerivatives d = drift_free_running(st, current, p);
        const InjectionTerms oil = oil_terms(st, field, p);
        LangevinForces f;
        if (opt.noise) {
            NoiseDraws draws;
            draws.photon = normal();
            draws.phase = normal();
            draws.carrier = normal();
            f = noise_terms(st, p, dt, draws);
        }
        if (f.floored || oil.floored)
            ++stats.floor_events;

        LaserState next;
        next.carrier_density = st.carrier_density + dt * d.carrier + dt * f.carrier;
        next.photon_density = st.photon_density + dt * (d.photon + oil.photon) + dt * f.photon;
        next.phase = st.phase + dt * (d.phase + oil.phase) + dt * f.phase;
        if (!finite_state(next))
            fail_non_finite(i, st, next, current, field.photon_density);
        if (next.photon_density < 0.0) {
            next.photon_density = 0.0;
            ++stats.photon_clamps;
        }
        if (next.carrier_density < 0.0) {
            next.carrier_density = 0.0;
            ++stats.carrier_clamps;
        }
        st = next;
    }
    st.time = static_cast<double>(n_steps) * dt;
    const double last_current = source.next();
    if (observer)
        observer(StepSample{n_steps, last_current, st, power_factor * st.photon_density});
    stats.steps = n_steps;
    return stats;
}

namespace {

class TraceRecorder {
public:
    TraceRecorder(Trace& trace, std::int64_t expected) : trace_(trace) {
        const auto n = static_cast<std::size_t>(expected / trace.stride + 1);
        for (auto* v : {&trace_.time, &trace_.current, &trace_.carrier_density, &trace_.photon_density,
                        &trace_.phase, &trace_.power})
            v->reserve(n);
    }

    void operator()(const StepSample& s) {
        if (s.index % trace_.stride != 0)
            return;
        trace_.time.push_back(s.state.time);
        trace_.current.push_back(s.current);
        trace_.carrier_density.push_back(s.state.carrier_density);
        trace_.photon_density.push_back(s.state.photon_density);
        trace_.phase.push_back(s.state.phase);
        trace_.power.push_back(s.power);
    }

private:
    Trace& trace_;
};

Trace empty_trace(const IntegrationOptions& opt) {
    Trace t;
    t.dt = opt.dt;
    t.stride = opt.record_stride;
    t.seed = opt.seed;
    return t;
}

} // namespace

Trace integrate(const LaserParams& p, const DriveWaveform& wave, const InjectionSignal& inj,
                const IntegrationOptions& opt) {
    Trace trace = empty_trace(opt);
    const auto grid = PulseGrid::make(wave, opt.dt);
    TraceRecorder rec(trace, wave.n_pulses * grid.samples_per_period);
    trace.stats = integrate_streaming(p, wave, inj, opt, std::ref(rec), &trace.injection_phases);
    return trace;
}

IntegrationStats integrate_free_running_streaming(const LaserParams& p, const DriveWaveform& wave,
                                                  const IntegrationOptions& opt, const SampleObserver& observer) {
    check_step(p, opt);
    CurrentSource source(wave, opt.dt);
    const std::int64_t n_steps = wave.n_pulses * source.grid().samples_per_period;
    NormalSource normal(opt.seed);

    const double dt = opt.dt;
    const double q_v = p.elementary_charge * p.active_volume;
    const double k_power = power_per_photon_density(p);
    const double spont_coeff = p.confinement * p.spontaneous_coupling;

    IntegrationStats stats;
    LaserState init = initial_state(wave, p);
    double n = init.carrier_density;
    double s = init.photon_density;
    double phi = 0.0;
    for (std::int64_t i = 0; i <= n_steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double current = source.next();
        if (observer)
            observer(StepSample{i, current, LaserState{n, s, phi, t}, k_power * s});
        if (i == n_steps)
            break;

        const double gain = p.differential_gain * (n - p.transparency_density) / (1.0 + p.gain_compression * s);
        const double dn = current / q_v - n / p.carrier_lifetime - gain * s;
        const double ds = p.confinement * gain * s - s / p.photon_lifetime + spont_coeff * n / p.carrier_lifetime;
        const double dphi = 0.5 * p.linewidth_enhancement *
                            (p.confinement * p.differential_gain * (n - p.transparency_density) - 1.0 / p.photon_lifetime);

        double fn = 0.0, fs = 0.0, fphi = 0.0;
        if (opt.noise) {
            const double xs = normal();
            const double xphi = normal();
            const double xz = normal();
            const double n_pos = std::max(n, 0.0);
            const double s_pos = std::max(s, 0.0);
            const double rsp = spont_coeff * n_pos / p.carrier_lifetime;
            fs = std::sqrt(2.0 * rsp * s_pos / dt) * xs;
            fphi = std::sqrt(rsp / (2.0 * std::max(s_pos, kPhotonFloor) * dt)) * xphi;
            const double fz = std::sqrt(2.0 * n_pos / (p.active_volume * p.carrier_lifetime * dt)) * xz;
            fn = fz - fs / p.confinement;
            if (s_pos < kPhotonFloor)
                ++stats.floor_events;
        }

        const double n_next = n + dt * dn + dt * fn;
        const double s_next = s + dt * ds + dt * fs;
        const double phi_next = phi + dt * dphi + dt * fphi;
        if (!std::isfinite(n_next) || !std::isfinite(s_next) || !std::isfinite(phi_next))
            fail_non_finite(i, LaserState{n, s, phi, t}, LaserState{n_next, s_next, phi_next, t + dt}, current, 0.0);
        n = n_next;
        s = s_next;
        phi = phi_next;
        if (s < 0.0) {
            s = 0.0;
            ++stats.photon_clamps;
        }
        if (n < 0.0) {
            n = 0.0;
            ++stats.carrier_clamps;
        }
    }
    stats.steps = n_steps;
    return stats;
}

Trace integrate_free_running(const LaserParams& p, const DriveWaveform& wave, const IntegrationOptions& opt) {
    Trace trace = empty_trace(opt);
    const auto grid = PulseGrid::make(wave, opt.dt);
    TraceRecorder rec(trace, wave.n_pulses * grid.samples_per_period);
    trace.stats = integrate_free_running_streaming(p, wave, opt, std::ref(rec));
    return trace;
}

} // namespace lsa
