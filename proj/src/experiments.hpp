#pragma once

#include "duty_cycle.hpp"
#include "interferometry.hpp"
#include "pulse_metrics.hpp"

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lsa {

enum class CellStatus { ok, constraint_violation, non_lasing };

const char* to_string(CellStatus s);
CellStatus cell_status_from_string(const std::string& s);

struct SweepCell {
    std::int64_t index = 0; ///< row-major: i_on_index * n_off + i_off_index
    double on_current = 0.0;  // A
    double off_current = 0.0; // A
    CellStatus status = CellStatus::ok;
    double increase_percent = std::nan(""); ///< NaN unless status is ok
    double on_fraction = std::nan("");
    bool duty_fallback = false;   ///< duty-cycle rule found no second peak
    double base_energy = std::nan("");   // J
    double seeded_energy = std::nan(""); // J
    double lasing_fraction = std::nan("");
    std::uint64_t seed = 0;
    std::string note;
};

struct SweepGrid {
    std::vector<double> on_currents;  // A
    std::vector<double> off_currents; // A
    double injected_power = 0.0;      // W
    double threshold = 0.0;           // A
    std::uint64_t master_seed = 0;
    std::vector<SweepCell> cells;     ///< row-major, always complete

    const SweepCell& at(std::size_t i_on, std::size_t i_off) const {
        return cells[i_on * off_currents.size() + i_off];
    }
};

struct HeatmapSpec {
    LaserParams params;
    DriveWaveform wave;            ///< period, filter and n_pulses; currents and duty set per cell
    std::vector<double> on_currents;
    std::vector<double> off_currents;
    double injected_power = 100e-9;
    IntegrationOptions integration; ///< seed ignored; cell seeds derive from master_seed
    PulseAnalysisOptions analysis;
    std::uint64_t master_seed = 1;
    bool enforce_constraints = true;
    bool auto_duty = true;         ///< false keeps wave.on_fraction
    double min_lasing_fraction = 0.9;
    int jobs = 1;
};

/// Seed used by heatmap cell `index`.
std::uint64_t cell_seed(std::uint64_t master_seed, std::int64_t index);

/// Evaluates one cell in isolation; reproducible from (spec, index).
SweepCell evaluate_cell(const HeatmapSpec& spec, std::int64_t index);

/// Energy increase at every (I_on, I_off). Cells present in `done` are taken
/// as-is; `on_cell` fires once per newly computed cell (possibly from a
/// worker thread, serialised by the caller-provided mutex in the runner).
SweepGrid heatmap_energy_increase(const HeatmapSpec& spec, const std::vector<SweepCell>& done = {},
                                  const std::function<void(const SweepCell&)>& on_cell = {});

struct PowerSweepRow {
    double injected_power = 0.0;   // W
    PulseSummary summary;          ///< noise-on, post-burn-in
    std::vector<double> shape_time;  // s, noise-free pulse shape for the overlay
    std::vector<double> shape_power; // W
};

struct PowerSweepSpec {
    LaserParams params;
    DriveWaveform wave;
    std::vector<double> powers;
    IntegrationOptions integration; ///< shared seed across powers (common-seed policy)
    PulseAnalysisOptions analysis;
    std::int64_t shape_stride = 10;
    int jobs = 1;
};

std::vector<PowerSweepRow> power_sweep_energy(const PowerSweepSpec& spec);

enum class BoundSource { lidt, fuse, power_limiter, custom };

const char* to_string(BoundSource s);
std::optional<BoundSource> bound_source_from_string(const std::string& s);

/// Eve's maximum deliverable power for a preset bound (W).
double preset_power(BoundSource s);

struct IsolationBudget {
    double eve_max_power = 0.0;    // W
    double alice_threshold = 0.0;  // W
    double required_isolation_db = 0.0;
    BoundSource bound_source = BoundSource::custom;
};

/// 10·log10(eve/threshold) dB, or 0 when Eve cannot exceed the threshold.
IsolationBudget isolation_budget(double eve_max_power, double alice_threshold,
                                 BoundSource source = BoundSource::custom);

struct PhaseRandomizedScenario {
    RandomnessDiagnostics alice;  ///< on Alice's own interferometer output under attack
    CorrelationReport cross;      ///< Alice-Eve envelope with baseline
    double null_width = 0.0;      ///< baseline_max − baseline_min
    double margin = 0.0;          ///< (rho_max − baseline_max) / null_width
};

struct ScenarioSpec {
    CorrelationSetup setup;
    double injected_power = 100e-9;
    std::int64_t diagnostic_pulses = 5000; ///< analysed pulses in the randomness run
    std::int64_t n_trials = 20;
    std::uint64_t master_seed = 1;
    int jobs = 1;
};

/// Randomness diagnostics of Alice's own interferometer output while under
/// injection at `power`, over `pulses` analysed pulses (trial-0 seeds).
RandomnessDiagnostics attacked_randomness(const CorrelationSetup& setup, double power, std::uint64_t master_seed,
                                          std::int64_t pulses);

PhaseRandomizedScenario phase_randomized_lsa_scenario(const ScenarioSpec& spec);

} // namespace lsa
