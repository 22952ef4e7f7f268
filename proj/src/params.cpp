#include "params.hpp"

#include "error.hpp"

#include <cmath>
#include <sstream>

namespace lsa {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream os;
        os << name << " must be finite and > 0 (got " << v << ")";
        throw InvalidArgument(os.str());
    }
}

void require_fraction(double v, const char* name) {
    require_positive(v, name);
    if (v > 1.0) {
        std::ostringstream os;
        os << name << " must be <= 1 (got " << v << ")";
        throw InvalidArgument(os.str());
    }
}

} // namespace

void LaserParams::validate() const {
    require_positive(carrier_lifetime, "carrier_lifetime");
    require_positive(photon_lifetime, "photon_lifetime");
    require_positive(differential_gain, "differential_gain");
    require_positive(gain_compression, "gain_compression");
    require_positive(transparency_density, "transparency_density");
    require_fraction(spontaneous_coupling, "spontaneous_coupling");
    require_positive(linewidth_enhancement, "linewidth_enhancement");
    require_fraction(quantum_efficiency, "quantum_efficiency");
    require_positive(active_volume, "active_volume");
    require_fraction(confinement, "confinement");
    require_positive(injection_coupling, "injection_coupling");
    require_positive(wavelength, "wavelength");
    require_positive(elementary_charge, "elementary_charge");
    require_positive(planck, "planck");
}

double photon_energy(const LaserParams& p) {
    return p.planck * kSpeedOfLight / p.wavelength;
}

double power_per_photon_density(const LaserParams& p) {
    return p.active_volume * p.quantum_efficiency * photon_energy(p) /
           (2.0 * p.confinement * p.photon_lifetime);
}

double threshold_density(const LaserParams& p) {
    return p.transparency_density +
           1.0 / (p.confinement * p.differential_gain * p.photon_lifetime);
}

double threshold_current(const LaserParams& p) {
    p.validate();
    return p.elementary_charge * p.active_volume * threshold_density(p) / p.carrier_lifetime;
}

double spontaneous_power_at_threshold(const LaserParams& p) {
    return power_per_photon_density(p) * p.confinement * p.spontaneous_coupling * threshold_density(p) *
           p.photon_lifetime / p.carrier_lifetime;
}

double power_to_photon_density(double power, const LaserParams& p) {
    if (!(power >= 0.0) || !std::isfinite(power))
        throw InvalidArgument("optical power must be finite and >= 0");
    return 2.0 * p.confinement * p.photon_lifetime * power /
           (p.active_volume * p.quantum_efficiency * photon_energy(p));
}

double photon_density_to_power(double density, const LaserParams& p) {
    return power_per_photon_density(p) * density;
}

void DriveWaveform::validate() const {
    if (!(on_current >= 0.0) || !std::isfinite(on_current))
        throw InvalidArgument("on-time current must be finite and >= 0");
    if (!(off_current >= 0.0) || !std::isfinite(off_current))
        throw InvalidArgument("off-time current must be finite and >= 0");
    require_positive(period, "period");
    if (!(on_fraction > 0.0 && on_fraction < 1.0))
        throw InvalidArgument("on_fraction must lie in (0, 1)");
    if (filter.kind != FilterKind::none) {
        if (!(filter.cutoff > 0.0))
            throw InvalidArgument("filter cutoff must be > 0");
        if (filter.order < 1 || filter.order > 8)
            throw InvalidArgument("filter order must lie in [1, 8]");
    }
    if (n_pulses < 1)
        throw InvalidArgument("n_pulses must be >= 1");
}

DriveConstraintReport check_drive_constraints(const DriveWaveform& wave, const LaserParams& p) {
    DriveConstraintReport report;
    report.threshold = threshold_current(p);
    std::ostringstream os;
    if (wave.off_current < 0.0)
        report.violations.push_back("off-time current is negative");
    if (!(wave.off_current < report.threshold)) {
        os << "off-time current " << wave.off_current * 1e3 << " mA is not below the threshold current "
           << report.threshold * 1e3 << " mA (require 0 <= I_off < I_th)";
        report.violations.push_back(os.str());
        os.str({});
    }
    if (!(wave.on_current > report.threshold)) {
        os << "on-time current " << wave.on_current * 1e3 << " mA is not above the threshold current "
           << report.threshold * 1e3 << " mA (require I_on > I_th)";
        report.violations.push_back(os.str());
    }
    return report;
}

void require_drive_constraints(const DriveWaveform& wave, const LaserParams& p) {
    const auto report = check_drive_constraints(wave, p);
    if (report.ok())
        return;
    std::string msg = "drive violates gain-switching constraints:";
    for (const auto& v : report.violations)
        msg += "\n  - " + v;
    throw InvalidArgument(msg);
}

void InjectionSignal::validate() const {
    if (!(power >= 0.0) || !std::isfinite(power))
        throw InvalidArgument("injected power must be finite and >= 0");
    if (!std::isfinite(phase) || !std::isfinite(detuning))
        throw InvalidArgument("injection phase and detuning must be finite");
    if (phase_mode == PhaseMode::sequence && phases.empty())
        throw InvalidArgument("sequence phase mode needs at least one phase");
}

} // namespace lsa
