#include "experiments.hpp"

#include "error.hpp"
#include "rng.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace lsa {

const char* to_string(CellStatus s) {
    switch (s) {
    case CellStatus::ok:
        return "ok";
    case CellStatus::constraint_violation:
        return "constraint_violation";
    case CellStatus::non_lasing:
        return "non_lasing";
    }
    return "?";
}

CellStatus cell_status_from_string(const std::string& s) {
    if (s == "ok")
        return CellStatus::ok;
    if (s == "constraint_violation")
        return CellStatus::constraint_violation;
    if (s == "non_lasing")
        return CellStatus::non_lasing;
    throw InvalidArgument("unknown cell status '" + s + "'");
}

std::uint64_t cell_seed(std::uint64_t master_seed, std::int64_t index) {
    return derive_seed(master_seed, SeedStream::cell, static_cast<std::uint64_t>(index));
}

SweepCell evaluate_cell(const HeatmapSpec& spec, std::int64_t index) {
    const auto n_off = static_cast<std::int64_t>(spec.off_currents.size());
    const auto n_cells = static_cast<std::int64_t>(spec.on_currents.size()) * n_off;
    if (index < 0 || index >= n_cells)
        throw InvalidArgument("cell index out of range");
    SweepCell c;
    c.index = index;
    c.on_current = spec.on_currents[static_cast<std::size_t>(index / n_off)];
    c.off_current = spec.off_currents[static_cast<std::size_t>(index % n_off)];
    c.seed = cell_seed(spec.master_seed, index);

    DriveWaveform wave = spec.wave;
    wave.on_current = c.on_current;
    wave.off_current = c.off_current;
    const auto report = check_drive_constraints(wave, spec.params);
    if (!report.ok()) {
        if (spec.enforce_constraints) {
            c.status = CellStatus::constraint_violation;
            for (const auto& v : report.violations)
                c.note += (c.note.empty() ? "" : "; ") + v;
            return c;
        }
        c.note = "constraints not enforced";
    }

    if (spec.auto_duty && c.on_current > report.threshold) {
        const auto duty = auto_duty_cycle(spec.params, wave, spec.integration.dt);
        wave.on_fraction = duty.on_fraction;
        c.duty_fallback = duty.overdamped;
    }
    c.on_fraction = wave.on_fraction;

    IntegrationOptions opt = spec.integration;
    opt.seed = c.seed;
    opt.noise = true;
    const auto cmp = compare_energy(spec.params, wave, spec.injected_power, opt, spec.analysis);
    c.base_energy = cmp.base.mean_energy;
    c.seeded_energy = cmp.seeded.mean_energy;
    c.lasing_fraction =
        cmp.base.n_pulses ? static_cast<double>(cmp.base.n_lasing) / static_cast<double>(cmp.base.n_pulses) : 0.0;
    if (!(cmp.base.mean_energy > 0.0) || c.lasing_fraction < spec.min_lasing_fraction) {
        c.status = CellStatus::non_lasing;
        return c;
    }
    c.status = CellStatus::ok;
    c.increase_percent = cmp.increase_percent;
    return c;
}

SweepGrid heatmap_energy_increase(const HeatmapSpec& spec, const std::vector<SweepCell>& done,
                                  const std::function<void(const SweepCell&)>& on_cell) {
    spec.params.validate();
    if (spec.on_currents.empty() || spec.off_currents.empty())
        throw InvalidArgument("heatmap axes must be non-empty");
    for (const auto* axis : {&spec.on_currents, &spec.off_currents})
        for (double v : *axis)
            if (!std::isfinite(v) || v < 0.0)
                throw InvalidArgument("heatmap currents must be finite and >= 0");
    if (!(spec.injected_power >= 0.0))
        throw InvalidArgument("injected power must be >= 0");

    SweepGrid grid;
    grid.on_currents = spec.on_currents;
    grid.off_currents = spec.off_currents;
    grid.injected_power = spec.injected_power;
    grid.threshold = threshold_current(spec.params);
    grid.master_seed = spec.master_seed;
    const auto n = static_cast<std::int64_t>(spec.on_currents.size() * spec.off_currents.size());
    grid.cells.resize(static_cast<std::size_t>(n));

    std::map<std::int64_t, SweepCell> known;
    for (const auto& c : done)
        if (c.index >= 0 && c.index < n)
            known[c.index] = c;
    std::vector<std::int64_t> todo;
    for (std::int64_t i = 0; i < n; ++i) {
        if (auto it = known.find(i); it != known.end())
            grid.cells[static_cast<std::size_t>(i)] = it->second;
        else
            todo.push_back(i);
    }
    std::mutex report_mutex;
    parallel_for(static_cast<std::int64_t>(todo.size()), spec.jobs, [&](std::int64_t j) {
        const auto idx = todo[static_cast<std::size_t>(j)];
        SweepCell c = evaluate_cell(spec, idx);
        if (on_cell) {
            std::lock_guard lock(report_mutex);
            on_cell(c);
        }
        grid.cells[static_cast<std::size_t>(idx)] = std::move(c);
    });
    return grid;
}

std::vector<PowerSweepRow> power_sweep_energy(const PowerSweepSpec& spec) {
    for (double p : spec.powers)
        if (!(p >= 0.0) || !std::isfinite(p))
            throw InvalidArgument("injected powers must be finite and >= 0");
    if (spec.shape_stride < 1)
        throw InvalidArgument("shape stride must be >= 1");
    std::vector<PowerSweepRow> rows(spec.powers.size());
    const auto grid = PulseGrid::make(spec.wave, spec.integration.dt);
    parallel_for(static_cast<std::int64_t>(spec.powers.size()), spec.jobs, [&](std::int64_t i) {
        PowerSweepRow& row = rows[static_cast<std::size_t>(i)];
        row.injected_power = spec.powers[static_cast<std::size_t>(i)];
        InjectionSignal inj;
        inj.power = row.injected_power;
        row.summary = summarise(simulate_pulses(spec.params, spec.wave, inj, spec.integration, spec.analysis));

        DriveWaveform shape_wave = spec.wave;
        shape_wave.n_pulses = spec.analysis.burn_in + 1;
        IntegrationOptions quiet = spec.integration;
        quiet.noise = false;
        const std::int64_t start = spec.analysis.burn_in * grid.samples_per_period;
        integrate_streaming(spec.params, shape_wave, inj, quiet, [&](const StepSample& s) {
            if (s.index >= start && (s.index - start) % spec.shape_stride == 0) {
                row.shape_time.push_back(static_cast<double>(s.index - start) * grid.dt);
                row.shape_power.push_back(s.power);
            }
        });
    });
    return rows;
}

const char* to_string(BoundSource s) {
    switch (s) {
    case BoundSource::lidt:
        return "lidt";
    case BoundSource::fuse:
        return "fuse";
    case BoundSource::power_limiter:
        return "power_limiter";
    case BoundSource::custom:
        return "custom";
    }
    return "?";
}

std::optional<BoundSource> bound_source_from_string(const std::string& s) {
    for (auto b : {BoundSource::lidt, BoundSource::fuse, BoundSource::power_limiter, BoundSource::custom})
        if (s == to_string(b))
            return b;
    return std::nullopt;
}

double preset_power(BoundSource s) {
    switch (s) {
    case BoundSource::lidt:
        return 55e3; // fiber damage threshold
    case BoundSource::fuse:
        return 1.0;
    case BoundSource::power_limiter:
        return 1e-6;
    case BoundSource::custom:
        break;
    }
    throw InvalidArgument("custom bound has no preset power");
}

IsolationBudget isolation_budget(double eve_max_power, double alice_threshold, BoundSource source) {
    if (!(alice_threshold > 0.0) || !std::isfinite(alice_threshold))
        throw InvalidArgument("attack threshold power must be finite and > 0");
    if (!(eve_max_power > 0.0) || !std::isfinite(eve_max_power))
        throw InvalidArgument("attacker power bound must be finite and > 0");
    IsolationBudget b;
    b.eve_max_power = eve_max_power;
    b.alice_threshold = alice_threshold;
    b.bound_source = source;
    b.required_isolation_db = eve_max_power > alice_threshold ? 10.0 * std::log10(eve_max_power / alice_threshold) : 0.0;
    return b;
}

RandomnessDiagnostics attacked_randomness(const CorrelationSetup& setup, double power, std::uint64_t master_seed,
                                          std::int64_t pulses) {
    if (pulses < 200)
        throw InvalidArgument("randomness diagnostics need at least 200 pulses");
    CorrelationSetup diag = setup;
    diag.wave.n_pulses = pulses + diag.analysis.burn_in + 1;
    const TrialSeeds seeds = trial_seeds(master_seed, 0);
    InjectionSignal inj;
    inj.power = power;
    inj.phase_mode = diag.phase_mode;
    inj.phase = diag.constant_phase;
    inj.phase_seed = seeds.injection_phase;
    inj.detuning = diag.detuning;
    IntegrationOptions opt = diag.integration;
    opt.seed = seeds.alice_noise;
    const auto metrics = simulate_pulses(diag.alice, diag.wave, inj, opt, diag.analysis);
    InterferometerModel model;
    model.phi0 = seeds.phi0_alice;
    return randomness_diagnostics(interferogram(metrics, model));
}

PhaseRandomizedScenario phase_randomized_lsa_scenario(const ScenarioSpec& spec) {
    PhaseRandomizedScenario out;
    out.alice = attacked_randomness(spec.setup, spec.injected_power, spec.master_seed, spec.diagnostic_pulses);
    out.cross = envelope_protocol(spec.setup, spec.injected_power, spec.master_seed, spec.n_trials, spec.jobs);
    out.null_width = out.cross.baseline_max - out.cross.baseline_min;
    out.margin = (out.cross.rho_max - out.cross.baseline_max) / out.null_width;
    return out;
}

} // namespace lsa
