#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace lsa {

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Single-mode rate-equation parameters of a DFB laser. Densities are per cm³,
/// times in seconds. Defaults are the fitted DFB parameter set used throughout
/// the toolkit.
struct LaserParams {
    double carrier_lifetime = 0.15e-9;       // s
    double photon_lifetime = 4.47e-12;       // s
    double differential_gain = 1.70e-6;      // cm³ s⁻¹
    double gain_compression = 3.24e-17;      // cm³
    double transparency_density = 3.79e18;   // cm⁻³
    double spontaneous_coupling = 4.44e-5;   // fraction of spontaneous emission in the mode
    double linewidth_enhancement = 2.95;
    double quantum_efficiency = 0.52;        // differential
    double active_volume = 2e-11;            // cm³
    double confinement = 0.22;
    double injection_coupling = 1.13e11;     // Hz
    double wavelength = 1550e-9;             // m
    double elementary_charge = 1.602176634e-19; // C
    double planck = 6.62607015e-34;             // J s

    /// Throws InvalidArgument naming the first offending field.
    void validate() const;

    bool operator==(const LaserParams&) const = default;
};

/// Photon energy h·c/λ in joules.
double photon_energy(const LaserParams& p);

/// Factor k with P = k·S (W per cm⁻³).
double power_per_photon_density(const LaserParams& p);

/// Threshold carrier density N0 + 1/(Γ g τp).
double threshold_density(const LaserParams& p);

/// Analytic threshold current q V N_th / τn in amperes.
double threshold_current(const LaserParams& p);

/// Output power of the spontaneous emission coupled into the mode at
/// threshold, k·ΓβN_th·τp/τn. Sub-threshold modulation stays near this level.
double spontaneous_power_at_threshold(const LaserParams& p);

/// Maps an optical power (W) to intracavity photon density (cm⁻³) using the
/// inverse of the output-power relation. Throws for negative power.
double power_to_photon_density(double power, const LaserParams& p);
double photon_density_to_power(double density, const LaserParams& p);

enum class FilterKind { bessel, butterworth, none };

struct FilterSpec {
    FilterKind kind = FilterKind::bessel;
    int order = 4;
    double cutoff = 3.5e9; // Hz, -3 dB point; +inf acts as an identity filter

    bool operator==(const FilterSpec&) const = default;
};

/// Band-limited pulse-wave drive current.
struct DriveWaveform {
    double on_current = 0.12;    // A
    double off_current = 0.08;   // A
    double period = 1e-9;        // s
    double on_fraction = 0.5;
    FilterSpec filter{};
    std::int64_t n_pulses = 105;

    void validate() const;

    double mean_current() const { return off_current + (on_current - off_current) * on_fraction; }

    bool operator==(const DriveWaveform&) const = default;
};

/// Result of checking a drive against the gain-switching constraints
/// 0 <= I_off < I_th < I_on.
struct DriveConstraintReport {
    double threshold = 0.0; // A
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

DriveConstraintReport check_drive_constraints(const DriveWaveform& wave, const LaserParams& p);

/// Throws InvalidArgument listing every violated constraint.
void require_drive_constraints(const DriveWaveform& wave, const LaserParams& p);

enum class PhaseMode {
    constant,          ///< fixed phase for the whole run
    per_pulse_uniform, ///< i.i.d. uniform [0, 2π) phase per drive period, drawn from phase_seed
    sequence           ///< caller-supplied per-period phases
};

/// Light injected by the attacker into the slave cavity.
struct InjectionSignal {
    double power = 0.0;        // W reaching the cavity
    PhaseMode phase_mode = PhaseMode::constant;
    double phase = 0.0;        // rad, constant mode
    std::uint64_t phase_seed = 0;
    std::vector<double> phases; // sequence mode: one entry per period, index 0 precedes pulse 0
    double detuning = 0.0;     // rad/s, master minus slave free-running angular frequency

    void validate() const;

    bool operator==(const InjectionSignal&) const = default;
};

} // namespace lsa
