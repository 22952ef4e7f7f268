#include "runner.hpp"

#include "csv.hpp"
#include "error.hpp"
#include "rng.hpp"
#include "trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace lsa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kCheckpoint = "cells.jsonl";

json number_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

double number_from(const json& v) {
    return v.is_number() ? v.get<double>() : std::nan("");
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

/// Amps to milliamps, rounded to the picoamp so 0.017 A prints as 17.
double milliamps(double amps) {
    return std::round(amps * 1e12) / 1e9;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

class RunDir {
public:
    RunDir(const RunConfig& cfg, std::string digest) : cfg_(cfg), digest_(std::move(digest)) {
        path_ = run_directory(cfg);
        std::error_code ec;
        fs::create_directories(path_, ec);
        if (ec)
            throw IoError("cannot create run directory " + path_.string() + ": " + ec.message());
    }

    const fs::path& path() const { return path_; }

    /// '#'-prefixed provenance lines for CSV outputs.
    std::string csv_header(const std::string& kind) const {
        std::ostringstream os;
        os << "# lsa " << kind << " v1\n"
           << "# digest=" << digest_ << "\n"
           << "# version=" << kToolVersion << "\n"
           << "# seed=" << cfg_.seed << "\n";
        return os.str();
    }

    json stamp() const { return {{"digest", digest_}, {"version", kToolVersion}, {"seed", cfg_.seed}}; }

    void write(const std::string& name, const std::string& content, bool listed = true) {
        const fs::path target = path_ / name;
        const fs::path tmp = path_ / (name + ".tmp");
        {
            std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
            if (!os)
                throw IoError("cannot write " + tmp.string());
            os << content;
            if (!os)
                throw IoError("write failed for " + tmp.string());
        }
        std::error_code ec;
        fs::rename(tmp, target, ec);
        if (ec)
            throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
        if (listed && std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end())
            outputs_.push_back(name);
    }

    void note_output(const std::string& name) {
        if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end())
            outputs_.push_back(name);
    }

    void write_manifest() {
        std::sort(outputs_.begin(), outputs_.end());
        json m;
        m["manifest_version"] = kManifestVersion;
        m["tool"] = "lsa";
        m["version"] = kToolVersion;
        m["digest"] = digest_;
        m["seed"] = cfg_.seed;
        m["scenario"] = to_string(cfg_.scenario);
        m["config"] = to_json(cfg_, false);
        m["outputs"] = outputs_;
        write("manifest.json", m.dump(2) + "\n", false);
    }

private:
    const RunConfig& cfg_;
    std::string digest_;
    fs::path path_;
    std::vector<std::string> outputs_;
};

void say(const RunOptions& opt, const std::string& line) {
    if (opt.progress)
        opt.progress(line);
}

IntegrationOptions integration_of(const RunConfig& cfg) {
    IntegrationOptions o;
    o.dt = cfg.dt;
    o.seed = cfg.seed;
    o.noise = cfg.noise;
    return o;
}

/// Applies the constraint check and the automatic duty cycle to cfg.drive.
DriveWaveform prepared_drive(const RunConfig& cfg, json& summary) {
    DriveWaveform wave = cfg.drive;
    const auto report = check_drive_constraints(wave, cfg.laser);
    summary["threshold_current_A"] = report.threshold;
    if (!report.ok()) {
        if (cfg.enforce_constraints)
            require_drive_constraints(wave, cfg.laser);
        summary["constraint_violations"] = report.violations;
    }
    if (cfg.auto_duty) {
        const auto duty = auto_duty_cycle(cfg.laser, wave, cfg.dt);
        wave.on_fraction = duty.on_fraction;
        summary["duty"] = {{"on_fraction", duty.on_fraction},
                           {"turn_on_delay_s", number_or_null(duty.turn_on_delay)},
                           {"ro_half_period_s", number_or_null(duty.ro_half_period)},
                           {"overdamped", duty.overdamped},
                           {"clamped", duty.clamped}};
    }
    summary["on_fraction"] = wave.on_fraction;
    return wave;
}

json stats_json(const IntegrationStats& s) {
    return {{"steps", s.steps},
            {"photon_clamps", s.photon_clamps},
            {"carrier_clamps", s.carrier_clamps},
            {"floor_events", s.floor_events},
            {"clamp_events", s.photon_clamps + s.carrier_clamps}};
}

json pulse_summary_json(const PulseSummary& s) {
    return {{"n_pulses", s.n_pulses},
            {"n_lasing", s.n_lasing},
            {"mean_energy_J", number_or_null(s.mean_energy)},
            {"mean_delay_s", number_or_null(s.mean_delay)},
            {"mean_first_peak_W", number_or_null(s.mean_first_peak)},
            {"mean_second_peak_W", number_or_null(s.mean_second_peak)},
            {"mean_max_power_W", number_or_null(s.mean_max_power)}};
}

// simulate -----------------------------------------------------------------

void run_simulate(const RunConfig& cfg, RunDir& dir, RunResult& res) {
    json& sum = res.summary;
    const DriveWaveform wave = prepared_drive(cfg, sum);
    const auto grid = PulseGrid::make(wave, cfg.dt);
    InjectionSignal inj = cfg.injection;
    inj.phase_seed = derive_seed(cfg.seed, SeedStream::injection_phase, 0);
    IntegrationOptions opt = integration_of(cfg);
    opt.record_stride = cfg.record_stride;

    PulseAnalyzer analyzer(grid, with_laser_floor(cfg.analysis, cfg.laser));
    Trace trace;
    trace.dt = cfg.dt;
    trace.stride = cfg.record_stride;
    trace.seed = cfg.seed;
    const bool keep = cfg.trace_format != TraceFormat::none;
    const auto stats = integrate_streaming(
        cfg.laser, wave, inj, opt,
        [&](const StepSample& s) {
            analyzer.push(s.power, s.state.phase);
            if (keep && s.index % cfg.record_stride == 0) {
                trace.time.push_back(s.state.time);
                trace.current.push_back(s.current);
                trace.carrier_density.push_back(s.state.carrier_density);
                trace.photon_density.push_back(s.state.photon_density);
                trace.phase.push_back(s.state.phase);
                trace.power.push_back(s.power);
            }
        },
        &trace.injection_phases);
    trace.stats = stats;
    const auto pulses = analyzer.take();

    const Provenance prov{config_digest(cfg), kToolVersion};
    if (keep) {
        std::ostringstream os(std::ios::binary);
        if (cfg.trace_format == TraceFormat::csv) {
            write_trace_csv(os, trace, prov);
            dir.write("trace.csv", os.str());
        } else {
            write_trace_binary(os, trace, prov);
            dir.write("trace.bin", os.str());
        }
    }
    std::ostringstream pcsv;
    pcsv << dir.csv_header("pulses");
    write_pulse_csv(pcsv, pulses);
    dir.write("pulses.csv", pcsv.str());

    const auto ps = summarise(pulses);
    sum["pulses"] = pulse_summary_json(ps);
    sum["integration"] = stats_json(stats);
    sum["injected_power_W"] = inj.power;

    std::ostringstream t;
    t << "pulses analysed: " << ps.n_pulses << " (" << ps.n_lasing << " lasing)\n"
      << "mean energy:     " << sci(ps.mean_energy) << " J\n"
      << "mean delay:      " << sci(ps.mean_delay) << " s\n"
      << "clamp events:    " << stats.photon_clamps + stats.carrier_clamps << " (photon " << stats.photon_clamps
      << ", carrier " << stats.carrier_clamps << ")\n";
    res.summary_text = t.str();
}

// sweep-current ------------------------------------------------------------

json cell_json(const SweepCell& c) {
    return {{"index", c.index},
            {"I_on_A", c.on_current},
            {"I_off_A", c.off_current},
            {"status", to_string(c.status)},
            {"increase_percent", number_or_null(c.increase_percent)},
            {"on_fraction", number_or_null(c.on_fraction)},
            {"duty_fallback", c.duty_fallback},
            {"base_energy_J", number_or_null(c.base_energy)},
            {"seeded_energy_J", number_or_null(c.seeded_energy)},
            {"lasing_fraction", number_or_null(c.lasing_fraction)},
            {"seed", c.seed},
            {"note", c.note}};
}

SweepCell cell_from_json(const json& j) {
    SweepCell c;
    c.index = j.at("index").get<std::int64_t>();
    c.on_current = j.at("I_on_A").get<double>();
    c.off_current = j.at("I_off_A").get<double>();
    c.status = cell_status_from_string(j.at("status").get<std::string>());
    c.increase_percent = number_from(j.at("increase_percent"));
    c.on_fraction = number_from(j.at("on_fraction"));
    c.duty_fallback = j.at("duty_fallback").get<bool>();
    c.base_energy = number_from(j.at("base_energy_J"));
    c.seeded_energy = number_from(j.at("seeded_energy_J"));
    c.lasing_fraction = number_from(j.at("lasing_fraction"));
    c.seed = j.at("seed").get<std::uint64_t>();
    c.note = j.at("note").get<std::string>();
    return c;
}

/// Completed cells from an earlier, interrupted run. A torn last line is
/// ignored; cells that no longer match the grid are recomputed.
std::vector<SweepCell> read_checkpoint(const fs::path& path, const HeatmapSpec& spec) {
    std::vector<SweepCell> cells;
    std::ifstream is(path, std::ios::binary);
    std::string line;
    const auto n_off = static_cast<std::int64_t>(spec.off_currents.size());
    const auto n = static_cast<std::int64_t>(spec.on_currents.size()) * n_off;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        try {
            const auto c = cell_from_json(json::parse(line));
            if (c.index < 0 || c.index >= n)
                continue;
            if (c.on_current != spec.on_currents[static_cast<std::size_t>(c.index / n_off)] ||
                c.off_current != spec.off_currents[static_cast<std::size_t>(c.index % n_off)] ||
                c.seed != cell_seed(spec.master_seed, c.index))
                continue;
            cells.push_back(c);
        } catch (const std::exception&) {
            continue;
        }
    }
    return cells;
}

void check_resumable(const fs::path& dir, const std::string& digest) {
    std::ifstream is(dir / "manifest.json", std::ios::binary);
    if (!is)
        return;
    json m;
    try {
        m = json::parse(is);
    } catch (const json::exception&) {
        return;
    }
    if (m.value("digest", std::string()) != digest)
        throw ConfigError("run directory " + dir.string() + " belongs to a different config; refusing to resume");
}

double median(std::vector<double> v) {
    if (v.empty())
        return std::nan("");
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void run_sweep_current(const RunConfig& cfg, const RunOptions& opt, RunDir& dir, RunResult& res) {
    HeatmapSpec spec;
    spec.params = cfg.laser;
    spec.wave = cfg.drive;
    spec.on_currents = cfg.sweep_on_currents;
    spec.off_currents = cfg.sweep_off_currents;
    spec.injected_power = cfg.sweep_injected_power;
    spec.integration = integration_of(cfg);
    spec.analysis = cfg.analysis;
    spec.master_seed = cfg.seed;
    spec.enforce_constraints = cfg.enforce_constraints;
    spec.auto_duty = cfg.sweep_auto_duty;
    spec.min_lasing_fraction = cfg.min_lasing_fraction;
    spec.jobs = opt.jobs;

    const fs::path ckpt = dir.path() / kCheckpoint;
    std::vector<SweepCell> done;
    if (opt.resume) {
        check_resumable(dir.path(), res.digest);
        done = read_checkpoint(ckpt, spec);
        say(opt, "resuming: " + std::to_string(done.size()) + " cells already complete");
    } else {
        std::error_code ec;
        fs::remove(ckpt, ec);
    }
    // Record the manifest first so an interrupted run can be resumed from it.
    dir.write_manifest();

    const auto total = spec.on_currents.size() * spec.off_currents.size();
    std::size_t finished = done.size();
    {
        std::ofstream log(ckpt, std::ios::binary | std::ios::trunc);
        if (!log)
            throw IoError("cannot write checkpoint " + ckpt.string());
        for (const auto& c : done)
            log << cell_json(c).dump() << '\n';
        log.flush();
        const auto grid = heatmap_energy_increase(spec, done, [&](const SweepCell& c) {
            log << cell_json(c).dump() << '\n';
            log.flush();
            ++finished;
            say(opt, "cell " + std::to_string(finished) + "/" + std::to_string(total) + ": I_on=" +
                         fixed(c.on_current * 1e3, 1) + " mA I_off=" + fixed(c.off_current * 1e3, 1) +
                         " mA " + to_string(c.status));
        });
        log.close();

        // Canonical checkpoint: one line per cell in index order.
        std::ostringstream canon;
        for (const auto& c : grid.cells)
            canon << cell_json(c).dump() << '\n';
        dir.write(kCheckpoint, canon.str());

        std::ostringstream csv;
        csv << dir.csv_header("heatmap") << "# injected_power_W=" << format_double(grid.injected_power) << "\n"
            << "# threshold_A=" << format_double(grid.threshold) << "\n"
            << "index,I_on_mA,I_off_mA,increase_pct,status,on_fraction,duty_fallback,base_energy_J,"
               "seeded_energy_J,lasing_fraction,seed,note\n";
        std::vector<double> ok;
        std::map<std::string, std::int64_t> counts;
        for (const auto& c : grid.cells) {
            std::string note = c.note;
            std::replace(note.begin(), note.end(), ',', ';');
            csv << c.index << ',' << format_double(milliamps(c.on_current)) << ','
                << format_double(milliamps(c.off_current)) << ',' << format_double(c.increase_percent) << ','
                << to_string(c.status) << ','
                << format_double(c.on_fraction) << ',' << (c.duty_fallback ? 1 : 0) << ','
                << format_double(c.base_energy) << ',' << format_double(c.seeded_energy) << ','
                << format_double(c.lasing_fraction) << ',' << c.seed << ',' << note << '\n';
            ++counts[to_string(c.status)];
            if (c.status == CellStatus::ok)
                ok.push_back(c.increase_percent);
        }
        dir.write("heatmap.csv", csv.str());

        json& sum = res.summary;
        sum["threshold_current_A"] = grid.threshold;
        sum["injected_power_W"] = grid.injected_power;
        sum["cells"] = grid.cells.size();
        sum["status_counts"] = counts;
        const double max_inc = ok.empty() ? std::nan("") : *std::max_element(ok.begin(), ok.end());
        const double med = median(ok);
        sum["max_increase_percent"] = number_or_null(max_inc);
        sum["median_increase_percent"] = number_or_null(med);
        sum["max_over_median"] = number_or_null(max_inc / med);

        std::ostringstream t;
        t << "cells: " << grid.cells.size() << " (ok " << counts["ok"] << ", constraint_violation "
          << counts["constraint_violation"] << ", non_lasing " << counts["non_lasing"] << ")\n"
          << "threshold current: " << fixed(grid.threshold * 1e3, 2) << " mA\n";
        if (!ok.empty())
            t << "energy increase: max " << fixed(max_inc, 2) << " %, median " << fixed(med, 2) << " %\n";
        res.summary_text = t.str();
    }
}

// sweep-power --------------------------------------------------------------

void run_sweep_power(const RunConfig& cfg, const RunOptions& opt, RunDir& dir, RunResult& res) {
    PowerSweepSpec spec;
    spec.params = cfg.laser;
    spec.wave = prepared_drive(cfg, res.summary);
    spec.powers = cfg.power_grid;
    spec.integration = integration_of(cfg);
    spec.analysis = cfg.analysis;
    spec.shape_stride = cfg.shape_stride;
    spec.jobs = opt.jobs;
    say(opt, "sweeping " + std::to_string(spec.powers.size()) + " injected powers");
    const auto rows = power_sweep_energy(spec);

    std::ostringstream csv;
    csv << dir.csv_header("power-sweep")
        << "P_inj_W,n_pulses,n_lasing,mean_energy_J,mean_delay_s,mean_first_peak_W,mean_second_peak_W,"
           "mean_max_power_W\n";
    std::ostringstream shapes;
    shapes << dir.csv_header("pulse-shapes") << "P_inj_W,t_s,P_W\n";
    json table = json::array();
    std::ostringstream t;
    t << "P_inj_W     energy_J    delay_s     peak1_W     peak2_W\n";
    for (const auto& r : rows) {
        const auto& s = r.summary;
        csv << format_double(r.injected_power) << ',' << s.n_pulses << ',' << s.n_lasing << ','
            << format_double(s.mean_energy) << ',' << format_double(s.mean_delay) << ','
            << format_double(s.mean_first_peak) << ',' << format_double(s.mean_second_peak) << ','
            << format_double(s.mean_max_power) << '\n';
        for (std::size_t i = 0; i < r.shape_time.size(); ++i)
            shapes << format_double(r.injected_power) << ',' << format_double(r.shape_time[i]) << ','
                   << format_double(r.shape_power[i]) << '\n';
        auto row = pulse_summary_json(s);
        row["P_inj_W"] = r.injected_power;
        table.push_back(row);
        char line[160];
        std::snprintf(line, sizeof line, "%-11.4g %-11.4g %-11.4g %-11.4g %-11.4g\n", r.injected_power,
                      s.mean_energy, s.mean_delay, s.mean_first_peak, s.mean_second_peak);
        t << line;
    }
    dir.write("power_sweep.csv", csv.str());
    dir.write("pulse_shapes.csv", shapes.str());
    res.summary["rows"] = table;
    res.summary_text = t.str();
}

// correlate ----------------------------------------------------------------

CorrelationSetup correlation_setup(const RunConfig& cfg, json& summary) {
    CorrelationSetup s;
    s.alice = cfg.laser;
    s.eve = cfg.eve_laser;
    s.wave = prepared_drive(cfg, summary);
    s.wave.n_pulses = cfg.pulses_per_trial + cfg.analysis.burn_in + 1;
    s.phase_mode = cfg.correlate_phase_mode;
    s.constant_phase = cfg.injection.phase;
    s.detuning = cfg.injection.detuning;
    s.eve_mode = cfg.eve_mode;
    s.phi0_policy = cfg.phi0_policy;
    s.fixed_phi0_alice = cfg.phi0_alice;
    s.fixed_phi0_eve = cfg.phi0_eve;
    s.integration = integration_of(cfg);
    s.analysis = cfg.analysis;
    s.max_lag = cfg.max_lag;
    return s;
}

void run_correlate(const RunConfig& cfg, const RunOptions& opt, RunDir& dir, RunResult& res) {
    const auto setup = correlation_setup(cfg, res.summary);
    say(opt, "correlating " + std::to_string(cfg.correlate_powers.size()) + " powers x " +
                 std::to_string(cfg.n_trials) + " trials");
    const auto curve =
        correlation_vs_power_curve(setup, cfg.correlate_powers, cfg.seed, cfg.n_trials, opt.jobs, cfg.ceiling_power);

    std::vector<std::optional<RandomnessDiagnostics>> diag(curve.points.size());
    if (cfg.randomness_pulses > 0) {
        say(opt, "randomness diagnostics over " + std::to_string(cfg.randomness_pulses) + " pulses per power");
        parallel_for(static_cast<std::int64_t>(curve.points.size()), opt.jobs, [&](std::int64_t i) {
            diag[static_cast<std::size_t>(i)] = attacked_randomness(
                setup, curve.points[static_cast<std::size_t>(i)].injected_power, cfg.seed, cfg.randomness_pulses);
        });
    }

    std::ostringstream trials;
    trials << dir.csv_header("correlation-trials")
           << "P_inj_W,trial,rho,best_lag_pulses,best_lag_rho,phi0_alice_rad,phi0_eve_rad,lasing_pulses\n";
    std::ostringstream env;
    env << dir.csv_header("correlation-envelope") << "# ceiling_rho=" << format_double(curve.ceiling) << "\n"
        << "# ceiling_P_inj_W=" << format_double(curve.ceiling_power) << "\n"
        << "P_inj_W,n_trials,rho_max,rho_min,baseline_max,baseline_min,margin,best_lag_s,window_s,"
           "ks_statistic,ks_p_value,acf_max_abs,acf_band,randomness_pass\n";
    json points = json::array();
    std::ostringstream t;
    t << "P_inj_W     rho_max   rho_min   base_max  margin    random\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const auto& p = curve.points[i];
        for (const auto& tr : p.trials)
            trials << format_double(p.injected_power) << ',' << tr.trial << ',' << format_double(tr.rho) << ','
                   << tr.best_lag << ',' << format_double(tr.best_lag_rho) << ',' << format_double(tr.phi0_alice)
                   << ',' << format_double(tr.phi0_eve) << ',' << tr.lasing_pulses << '\n';
        const double width = p.baseline_max - p.baseline_min;
        const double margin = (p.rho_max - p.baseline_max) / width;
        env << format_double(p.injected_power) << ',' << p.n_trials << ',' << format_double(p.rho_max) << ','
            << format_double(p.rho_min) << ',' << format_double(p.baseline_max) << ','
            << format_double(p.baseline_min) << ',' << format_double(margin) << ',' << format_double(p.best_lag)
            << ',' << format_double(p.window);
        json pj = {{"P_inj_W", p.injected_power},      {"rho_max", number_or_null(p.rho_max)},
                   {"rho_min", number_or_null(p.rho_min)}, {"baseline_max", number_or_null(p.baseline_max)},
                   {"baseline_min", number_or_null(p.baseline_min)}, {"margin", number_or_null(margin)},
                   {"best_lag_s", number_or_null(p.best_lag)}};
        std::string rand = "-";
        if (diag[i]) {
            const auto& d = *diag[i];
            env << ',' << format_double(d.arcsine.statistic) << ',' << format_double(d.arcsine.p_value) << ','
                << format_double(d.acf_max_abs) << ',' << format_double(d.acf_band) << ',' << (d.pass() ? 1 : 0)
                << '\n';
            pj["randomness"] = {{"n", d.n},
                                {"ks_statistic", d.arcsine.statistic},
                                {"ks_p_value", d.arcsine.p_value},
                                {"acf_max_abs", d.acf_max_abs},
                                {"acf_band", d.acf_band},
                                {"pass", d.pass()}};
            rand = d.pass() ? "pass" : "FAIL";
        } else {
            env << ",nan,nan,nan,nan,\n";
        }
        points.push_back(pj);
        char line[160];
        std::snprintf(line, sizeof line, "%-11.4g %-9.4f %-9.4f %-9.4f %-9.3g %s\n", p.injected_power, p.rho_max,
                      p.rho_min, p.baseline_max, margin, rand.c_str());
        t << line;
    }
    dir.write("correlation_trials.csv", trials.str());
    dir.write("correlation_envelope.csv", env.str());

    json& sum = res.summary;
    sum["points"] = points;
    sum["onset_power_W"] = curve.onset_power ? json(*curve.onset_power) : json(nullptr);
    sum["ceiling_rho"] = number_or_null(curve.ceiling);
    sum["ceiling_power_W"] = curve.ceiling_power;
    t << "locked ceiling:  rho = " << fixed(curve.ceiling, 4) << " at " << sci(curve.ceiling_power) << " W\n"
      << "onset power:     " << (curve.onset_power ? sci(*curve.onset_power) + " W" : std::string("none in grid"))
      << "\n";
    res.summary_text = t.str();
}

// isolation ----------------------------------------------------------------

void run_isolation(const RunConfig& cfg, RunDir& dir, RunResult& res) {
    const auto b = isolation_budget(cfg.eve_max_power, cfg.isolation_threshold, cfg.bound_source);
    std::ostringstream csv;
    csv << dir.csv_header("isolation") << "source,eve_max_W,threshold_W,required_isolation_dB\n";
    auto row = [&](const IsolationBudget& r) {
        csv << to_string(r.bound_source) << ',' << format_double(r.eve_max_power) << ','
            << format_double(r.alice_threshold) << ',' << format_double(r.required_isolation_db) << '\n';
    };
    row(b);
    json presets = json::array();
    for (auto s : {BoundSource::lidt, BoundSource::fuse, BoundSource::power_limiter}) {
        const auto p = isolation_budget(preset_power(s), cfg.isolation_threshold, s);
        presets.push_back({{"source", to_string(s)},
                           {"eve_max_W", p.eve_max_power},
                           {"required_isolation_dB", p.required_isolation_db}});
        if (!(s == b.bound_source && p.eve_max_power == b.eve_max_power))
            row(p);
    }
    dir.write("isolation.csv", csv.str());
    res.summary["source"] = to_string(b.bound_source);
    res.summary["eve_max_W"] = b.eve_max_power;
    res.summary["threshold_W"] = b.alice_threshold;
    res.summary["required_isolation_dB"] = b.required_isolation_db;
    res.summary["presets"] = presets;
    res.summary_text = "required isolation: " + fixed(b.required_isolation_db, 1) + " dB (eve_max " +
                       sci(b.eve_max_power) + " W, threshold " + sci(b.alice_threshold) + " W, bound " +
                       to_string(b.bound_source) + ")\n";
}

} // namespace

std::string run_directory(const RunConfig& cfg) {
    return (fs::path(cfg.output_dir) / (std::string(to_string(cfg.scenario)) + "-" + config_digest(cfg).substr(0, 16)))
        .string();
}

RunResult execute(const RunConfig& cfg, const RunOptions& opt) {
    RunResult res;
    res.digest = config_digest(cfg);
    RunDir dir(cfg, res.digest);
    res.directory = dir.path().string();
    res.summary = dir.stamp();
    res.summary["scenario"] = to_string(cfg.scenario);

    switch (cfg.scenario) {
    case Scenario::simulate:
        run_simulate(cfg, dir, res);
        break;
    case Scenario::sweep_current:
        run_sweep_current(cfg, opt, dir, res);
        break;
    case Scenario::sweep_power:
        run_sweep_power(cfg, opt, dir, res);
        break;
    case Scenario::correlate:
        run_correlate(cfg, opt, dir, res);
        break;
    case Scenario::isolation:
        run_isolation(cfg, dir, res);
        break;
    }
    dir.note_output("summary.json");
    dir.write_manifest();
    dir.write("summary.json", res.summary.dump(2) + "\n");
    return res;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e))
        return 2;
    if (dynamic_cast<const NumericalError*>(&e))
        return 3;
    return 1;
}

} // namespace lsa
