#pragma once

#include "experiments.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lsa {

enum class Scenario { simulate, sweep_current, sweep_power, correlate, isolation };
enum class Profile { ci, paper };
enum class TraceFormat { csv, binary, none };

const char* to_string(Scenario s);
const char* to_string(Profile p);
std::optional<Scenario> scenario_from_string(const std::string& s);
std::optional<Profile> profile_from_string(const std::string& s);

/// Fully resolved run description. Every field has a value after loading;
/// the canonical JSON of this struct is what gets hashed.
struct RunConfig {
    Scenario scenario = Scenario::simulate;
    Profile profile = Profile::ci;
    std::uint64_t seed = 1;
    double dt = kDefaultStep;
    bool noise = true;

    LaserParams laser;
    LaserParams eve_laser;

    DriveWaveform drive;
    bool auto_duty = false;
    InjectionSignal injection;
    PulseAnalysisOptions analysis;
    bool enforce_constraints = true;

    // simulate
    std::int64_t record_stride = 100;
    TraceFormat trace_format = TraceFormat::csv;

    // sweep-current
    std::vector<double> sweep_on_currents;  // A
    std::vector<double> sweep_off_currents; // A
    double sweep_injected_power = 100e-9;
    bool sweep_auto_duty = true;
    double min_lasing_fraction = 0.9;

    // sweep-power
    std::vector<double> power_grid;
    std::int64_t shape_stride = 10;

    // correlate
    std::vector<double> correlate_powers;
    std::int64_t n_trials = 20;
    std::int64_t pulses_per_trial = 2000;
    PhaseMode correlate_phase_mode = PhaseMode::per_pulse_uniform;
    EveMode eve_mode = EveMode::reference;
    Phi0Policy phi0_policy = Phi0Policy::uniform_per_trial;
    double phi0_alice = 0.0;
    double phi0_eve = 0.0;
    std::int64_t max_lag = 8;
    double ceiling_power = 480e-6;
    std::int64_t randomness_pulses = 5000;

    // isolation
    double eve_max_power = 55e3;
    double isolation_threshold = 1e-9;
    BoundSource bound_source = BoundSource::lidt;

    // Not part of the digest.
    std::string output_dir = "runs";
};

/// Loads a config or manifest document. Missing keys take the profile's
/// defaults; unknown keys and type errors raise ConfigError with the source
/// line. `origin` names the document in messages.
RunConfig parse_config(const std::string& text, const std::string& origin = "config",
                       std::optional<Profile> profile_override = std::nullopt);
RunConfig load_config(const std::string& path, std::optional<Profile> profile_override = std::nullopt);

/// Config with every default for `profile`.
RunConfig default_config(Profile profile = Profile::ci);

/// Canonical JSON (sorted keys, unit-suffixed names) of the effective config.
/// With `include_output` false the output directory is left out, as for the
/// digest.
nlohmann::json to_json(const RunConfig& cfg, bool include_output = false);

/// Lower-case hex SHA-256 of the canonical JSON.
std::string config_digest(const RunConfig& cfg);
std::string sha256_hex(const std::string& data);

/// Laser block in config units (tau_n_ns, kappa_per_s, ...).
nlohmann::json laser_to_json(const LaserParams& p);
/// Inverse of laser_to_json; missing keys keep their defaults.
LaserParams laser_from_json(const nlohmann::json& obj);

/// Strict SI quantity: number immediately followed by an optional prefix
/// (f p n u µ m k M G T) and the expected unit, e.g. "55kW", "100fs",
/// "1nW". A bare number is accepted only when `unit` is empty.
double parse_quantity(const std::string& text, const std::string& unit);

} // namespace lsa
