#include "duty_cycle.hpp"

#include "error.hpp"

#include <algorithm>
#include <sstream>

namespace lsa {

DutyCycleResult auto_duty_cycle(const LaserParams& p, const DriveWaveform& wave, double dt) {
    if (!(wave.on_current > threshold_current(p))) {
        std::ostringstream os;
        os << "duty-cycle rule needs I_on above threshold (" << wave.on_current * 1e3 << " mA <= "
           << threshold_current(p) * 1e3 << " mA)";
        throw InvalidArgument(os.str());
    }
    DriveWaveform probe = wave;
    probe.on_fraction = 0.5;
    PulseAnalysisOptions popt = with_laser_floor({}, p);
    popt.min_prominence = kRingingProminence;
    probe.n_pulses = popt.burn_in + 1;
    IntegrationOptions opt;
    opt.dt = dt;
    opt.noise = false;
    const auto grid = PulseGrid::make(probe, dt);
    const std::int64_t start = popt.burn_in * grid.samples_per_period;
    std::vector<double> power, phase;
    integrate_free_running_streaming(p, probe, opt, [&](const StepSample& s) {
        if (s.index >= start) {
            power.push_back(s.power);
            phase.push_back(s.state.phase);
        }
    });
    const PulseMetrics m = analyse_window(power, phase, dt, grid.on_samples, popt);
    if (!m.lasing || m.peak_times.empty())
        throw NumericalError("duty-cycle probe pulse does not lase");

    // Delay is referenced to the first peak, not the pulse maximum.
    DutyCycleResult r;
    const double level = 0.1 * m.peak_powers.front();
    for (std::size_t j = 0; j < power.size(); ++j) {
        if (power[j] >= level) {
            r.turn_on_delay = j == 0 ? 0.0
                                     : (static_cast<double>(j - 1) + (level - power[j - 1]) / (power[j] - power[j - 1])) * dt;
            break;
        }
    }
    double raw = 0.0;
    if (m.peak_times.size() >= 2) {
        r.ro_half_period = 0.5 * (m.peak_times[1] - m.peak_times[0]);
        raw = (r.turn_on_delay + r.ro_half_period) / wave.period;
    } else {
        r.overdamped = true;
        raw = (r.turn_on_delay + 2.0 * p.photon_lifetime * 1e3) / wave.period;
    }
    r.on_fraction = std::clamp(raw, kMinOnFraction, kMaxOnFraction);
    r.clamped = r.on_fraction != raw;
    return r;
}

} // namespace lsa
