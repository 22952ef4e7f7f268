// Acceptance suite: one PASS/FAIL line per criterion. Arguments select a
// subset by number; with none, every criterion runs.

#include "config.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "oracles.hpp"
#include "rng.hpp"
#include "runner.hpp"
#include "statistics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace lsa;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

int jobs() {
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Correlation setup of the CI profile, as the correlate scenario builds it.
CorrelationSetup ci_setup(const RunConfig& cfg) {
    CorrelationSetup s;
    s.alice = cfg.laser;
    s.eve = cfg.eve_laser;
    s.wave = cfg.drive;
    s.wave.n_pulses = cfg.pulses_per_trial + cfg.analysis.burn_in + 1;
    s.phase_mode = cfg.correlate_phase_mode;
    s.eve_mode = cfg.eve_mode;
    s.phi0_policy = cfg.phi0_policy;
    s.integration.dt = cfg.dt;
    s.analysis = cfg.analysis;
    s.max_lag = cfg.max_lag;
    return s;
}

// Criteria 5 and 9 share the 100 nW envelope.
std::optional<CorrelationCurve> shared_curve;

const CorrelationCurve& correlation_curve() {
    if (!shared_curve) {
        const auto cfg = default_config(Profile::ci);
        shared_curve = correlation_vs_power_curve(ci_setup(cfg), {0.0, 0.1e-9, 1e-9, 10e-9, 100e-9}, cfg.seed,
                                                  cfg.n_trials, jobs(), cfg.ceiling_power);
    }
    return *shared_curve;
}

// 1 -------------------------------------------------------------------------
Outcome isolation_arithmetic() {
    const double a = isolation_budget(55e3, 1e-9).required_isolation_db;
    const double b = isolation_budget(1e-6, 1e-9).required_isolation_db;
    return {std::abs(a - 137.4) <= 0.05 && b == 30.0,
            "55 kW/1 nW = " + fmt("%.4f", a) + " dB, 1 uW/1 nW = " + fmt("%.12g", b) + " dB"};
}

// 2 -------------------------------------------------------------------------
Outcome oil_reduction() {
    const LaserParams p;
    DriveWaveform w;
    w.n_pulses = 1;
    std::mt19937_64 pick(2024);
    int identical = 0;
    std::size_t steps = 0;
    for (int i = 0; i < 5; ++i) {
        IntegrationOptions o;
        o.seed = pick();
        const auto a = integrate(p, w, {}, o);
        const auto b = integrate_free_running(p, w, o);
        steps = a.size() - 1;
        if (a.carrier_density == b.carrier_density && a.photon_density == b.photon_density && a.phase == b.phase &&
            a.power == b.power)
            ++identical;
    }
    return {identical == 5 && steps >= 10000,
            std::to_string(identical) + "/5 seeds bit-identical over " + std::to_string(steps) + " steps"};
}

// 3 -------------------------------------------------------------------------
Outcome sde_correctness() {
    const LaserParams p;
    std::ostringstream d;
    bool ok = true;

    // Fixed point.
    {
        const double amps = 1.5 * threshold_current(p);
        DriveWaveform w;
        w.on_current = w.off_current = amps;
        w.filter.kind = FilterKind::none;
        w.n_pulses = 3;
        IntegrationOptions o;
        o.noise = false;
        LaserState last;
        integrate_streaming(p, w, {}, o, [&](const StepSample& s) { last = s.state; });
        const auto ss = oracle::steady_state(p, amps);
        const double en = std::abs(last.carrier_density - ss.carrier) / ss.carrier;
        const double es = std::abs(last.photon_density - ss.photon) / ss.photon;
        ok &= en < 1e-3 && es < 1e-3;
        d << "steady-state err N " << fmt("%.2e", en) << " S " << fmt("%.2e", es);
    }

    // Step halving.
    {
        DriveWaveform w;
        w.filter.kind = FilterKind::none;
        w.n_pulses = 1;
        IntegrationOptions o;
        o.noise = false;
        std::vector<double> s_at;
        for (double dt : {100e-15, 50e-15, 25e-15, 12.5e-15, 6.25e-15}) {
            o.dt = dt;
            const auto k = std::llround(0.3e-9 / dt);
            double hit = 0.0;
            integrate_streaming(p, w, {}, o, [&](const StepSample& s) {
                if (s.index == k)
                    hit = s.state.photon_density;
            });
            s_at.push_back(hit);
        }
        d << "; halving ratios";
        for (std::size_t i = 0; i + 2 < s_at.size(); ++i) {
            const double r = std::abs(s_at[i] - s_at[i + 1]) / std::abs(s_at[i + 1] - s_at[i + 2]);
            ok &= std::abs(r - 2.0) <= 0.3;
            d << ' ' << fmt("%.3f", r);
        }
    }

    // Langevin variances.
    {
        const double dt = kDefaultStep, n = 4.2e18, s = 3e15;
        const int draws = 100000;
        NormalSource rng(99);
        double m[4] = {}, q[4] = {};
        for (int i = 0; i < draws; ++i) {
            NoiseDraws x;
            x.photon = rng();
            x.phase = rng();
            x.carrier = rng();
            const auto f = noise_terms({n, s, 0.0, 0.0}, p, dt, x);
            const double v[4] = {f.photon, f.phase, f.carrier + f.photon / p.confinement, f.carrier};
            for (int k = 0; k < 4; ++k) {
                m[k] += v[k];
                q[k] += v[k] * v[k];
            }
        }
        const double gb = p.confinement * p.spontaneous_coupling;
        const double vs = 2 * gb * n * s / p.carrier_lifetime;
        const double vz = 2 * n / (p.active_volume * p.carrier_lifetime);
        const double expect[4] = {vs, gb * n / (2 * p.carrier_lifetime * s), vz, vz + vs / (p.confinement * p.confinement)};
        d << "; variance z-scores";
        for (int k = 0; k < 4; ++k) {
            const double mean = m[k] / draws;
            const double var = (q[k] - draws * mean * mean) / (draws - 1) * dt;
            const double z = (var - expect[k]) / (expect[k] * std::sqrt(2.0 / (draws - 1)));
            ok &= std::abs(z) < 3.0;
            d << ' ' << fmt("%.2f", z);
        }
    }
    return {ok, d.str()};
}

// 4 -------------------------------------------------------------------------
Outcome free_running_randomness() {
    const LaserParams p;
    DriveWaveform w;
    PulseAnalysisOptions a;
    w.n_pulses = 5000 + a.burn_in + 1;
    IntegrationOptions o;
    o.seed = 4;
    const auto pulses = simulate_pulses(p, w, {}, o, a);
    InterferometerModel m;
    m.phi0 = 2.1;
    const auto r = randomness_diagnostics(interferogram(pulses, m));
    return {r.n >= 5000 && r.pass(), "n = " + std::to_string(r.n) + ", arcsine KS p = " + fmt("%.3g", r.arcsine.p_value) +
                                         ", max |acf| = " + fmt("%.4f", r.acf_max_abs) + " (band " +
                                         fmt("%.4f", r.acf_band) + ")"};
}

// 5 -------------------------------------------------------------------------
Outcome correlation_envelope() {
    const auto& c = correlation_curve();
    const auto& pts = c.points;
    std::ostringstream d;
    const auto& zero = pts.front();
    const bool a = zero.rho_max <= zero.baseline_max && zero.rho_min >= zero.baseline_min;
    const double null_width = zero.baseline_max - zero.baseline_min;

    int inversions = 0;
    bool inversion_small = true;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].rho_max < pts[i - 1].rho_max) {
            ++inversions;
            inversion_small &= pts[i - 1].rho_max - pts[i].rho_max <= null_width;
        }
    const bool b = inversions == 0 || (inversions == 1 && inversion_small);
    const bool sat = pts.back().rho_max >= 0.9 * c.ceiling;
    const bool onset = c.onset_power && *c.onset_power > pts.front().injected_power &&
                       *c.onset_power < pts.back().injected_power;

    d << "rho_max";
    for (const auto& pt : pts)
        d << ' ' << fmt("%.3f", pt.rho_max);
    d << " | null [" << fmt("%.3f", zero.baseline_min) << ", " << fmt("%.3f", zero.baseline_max) << "]"
      << " | ceiling " << fmt("%.3f", c.ceiling) << " | onset "
      << (c.onset_power ? fmt("%.3g W", *c.onset_power) : std::string("none")) << " | (a) " << (a ? "ok" : "fail")
      << " (b) " << (b ? "ok" : "fail") << " (c) " << (sat ? "ok" : "fail") << " onset " << (onset ? "ok" : "fail");
    return {a && b && sat && onset, d.str()};
}

// 6 -------------------------------------------------------------------------
Outcome injection_pulse_shape() {
    const auto cfg = default_config(Profile::ci);
    PowerSweepSpec s;
    s.params = cfg.laser;
    s.wave = cfg.drive;
    s.powers = {0.0, 1e-9, 10e-9, 100e-9};
    s.integration.dt = cfg.dt;
    s.integration.seed = cfg.seed;
    s.analysis = cfg.analysis;
    s.jobs = jobs();
    const auto rows = power_sweep_energy(s);
    bool ok = true;
    std::ostringstream d;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ok &= rows[i].summary.mean_energy >= rows[i - 1].summary.mean_energy;
        ok &= rows[i].summary.mean_delay <= rows[i - 1].summary.mean_delay;
    }
    const auto& base = rows.front().summary;
    const auto& top = rows.back().summary;
    ok &= top.mean_first_peak < base.mean_first_peak && top.mean_second_peak > base.mean_second_peak;
    d << "E/pulse [fJ]";
    for (const auto& r : rows)
        d << ' ' << fmt("%.4f", r.summary.mean_energy * 1e15);
    d << " | delay [ps]";
    for (const auto& r : rows)
        d << ' ' << fmt("%.2f", r.summary.mean_delay * 1e12);
    d << " | peak1 " << fmt("%.4g", base.mean_first_peak) << " -> " << fmt("%.4g", top.mean_first_peak)
      << " W, peak2 " << fmt("%.4g", base.mean_second_peak) << " -> " << fmt("%.4g", top.mean_second_peak) << " W";
    return {ok, d.str()};
}

// 7 -------------------------------------------------------------------------
Outcome current_heatmap() {
    const auto cfg = default_config(Profile::ci);
    HeatmapSpec s;
    s.params = cfg.laser;
    s.wave = cfg.drive;
    s.on_currents = cfg.sweep_on_currents;
    s.off_currents = cfg.sweep_off_currents;
    s.injected_power = 100e-9;
    s.integration.dt = cfg.dt;
    s.analysis = cfg.analysis;
    s.master_seed = cfg.seed;
    s.jobs = jobs();
    const auto grid = heatmap_energy_increase(s);
    std::map<CellStatus, int> counts;
    std::vector<double> values;
    bool resolved = grid.cells.size() == 100;
    for (const auto& c : grid.cells) {
        ++counts[c.status];
        if (c.status == CellStatus::ok)
            values.push_back(c.increase_percent);
        else
            resolved &= !c.note.empty();
    }
    std::ostringstream d;
    d << grid.cells.size() << " cells: " << counts[CellStatus::ok] << " ok, " << counts[CellStatus::constraint_violation]
      << " constraint violations, " << counts[CellStatus::non_lasing] << " non-lasing; I_th "
      << fmt("%.2f", grid.threshold * 1e3) << " mA";
    if (values.empty())
        return {false, d.str() + "; no resolved cells, map cannot be non-uniform"};
    std::sort(values.begin(), values.end());
    const double median = values.size() % 2 ? values[values.size() / 2]
                                             : 0.5 * (values[values.size() / 2 - 1] + values[values.size() / 2]);
    const double mx = values.back();
    d << "; max " << fmt("%.3g", mx) << " %, median " << fmt("%.3g", median) << " %";
    return {resolved && median > 0.0 && mx >= 2.0 * median, d.str()};
}

// 8 -------------------------------------------------------------------------
Outcome lag_and_sign() {
    std::mt19937_64 rng(86);
    std::normal_distribution<double> n;
    const std::size_t len = 4000, shift = 86;
    std::vector<double> src(len + shift);
    for (auto& v : src)
        v = n(rng);
    std::vector<double> x(src.begin() + shift, src.end()), y(src.begin(), src.begin() + len);
    for (auto& v : y)
        v += 0.01 * n(rng);
    // y[i + 86] = x[i] + noise; samples one drive period (1 ns) apart.
    const auto lag = cross_correlation_vs_lag(x, y, 120);
    const double lag_ns = static_cast<double>(lag.best_lag) * 1.0;
    bool ok = lag_ns == 86.0 && lag.best_rho >= 0.999;

    const auto cfg = default_config(Profile::ci);
    auto setup = ci_setup(cfg);
    setup.wave.n_pulses = 1000 + cfg.analysis.burn_in + 1;
    setup.phi0_policy = Phi0Policy::fixed;
    setup.fixed_phi0_alice = 0.7;
    double worst = 0.0;
    std::ostringstream flips;
    for (double power : {1e-9, 100e-9, 480e-6}) {
        const auto seeds = trial_seeds(cfg.seed, 0);
        setup.fixed_phi0_eve = 1.9;
        const double r0 = lsa_correlation_trial(setup, power, seeds).rho;
        setup.fixed_phi0_eve = 1.9 + kPi;
        const double r1 = lsa_correlation_trial(setup, power, seeds).rho;
        worst = std::max(worst, std::abs(r0 + r1));
        flips << ' ' << fmt("%.4f", r0) << "/" << fmt("%.4f", r1);
    }
    ok &= worst <= 1e-9;
    return {ok, "lag " + fmt("%.0f", lag_ns) + " ns, rho " + fmt("%.6f", lag.best_rho) + "; pi flip rho pairs" +
                    flips.str() + " (max |sum| " + fmt("%.1e", worst) + ")"};
}

// 9 -------------------------------------------------------------------------
Outcome undetectable_attack() {
    const auto cfg = default_config(Profile::ci);
    const auto setup = ci_setup(cfg);
    const auto alice = attacked_randomness(setup, 100e-9, cfg.seed, 5000);
    const auto& cross = correlation_curve().points.back();
    const double width = cross.baseline_max - cross.baseline_min;
    const double margin = (cross.rho_max - cross.baseline_max) / width;
    return {alice.pass() && margin >= 5.0,
            "Alice diagnostics " + std::string(alice.pass() ? "pass" : "fail") + " (KS p " +
                fmt("%.3g", alice.arcsine.p_value) + ", max |acf| " + fmt("%.4f", alice.acf_max_abs) + "); rho_max " +
                fmt("%.3f", cross.rho_max) + " vs baseline_max " + fmt("%.3f", cross.baseline_max) + ", null width " +
                fmt("%.3f", width) + ", margin " + fmt("%.2f", margin) + " widths"};
}

// 10 ------------------------------------------------------------------------
std::map<std::string, std::string> files_of(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        out[e.path().filename().string()] = os.str();
    }
    return out;
}

Outcome determinism() {
    const auto root = fs::temp_directory_path() / "lsa-acceptance-determinism";
    fs::remove_all(root);
    std::vector<RunConfig> runs;
    auto base = default_config(Profile::ci);
    base.output_dir = (root / "first").string();
    {
        auto c = base;
        c.drive.n_pulses = 200;
        runs.push_back(c);
    }
    {
        auto c = base;
        c.scenario = Scenario::sweep_current;
        c.sweep_on_currents = {0.11, 0.12};
        c.sweep_off_currents = {0.0, 0.08};
        c.drive.n_pulses = 110;
        runs.push_back(c);
    }
    {
        auto c = base;
        c.scenario = Scenario::sweep_power;
        c.power_grid = {0.0, 100e-9};
        c.drive.n_pulses = 110;
        runs.push_back(c);
    }
    {
        auto c = base;
        c.scenario = Scenario::correlate;
        c.correlate_powers = {0.0, 100e-9};
        c.n_trials = 2;
        c.pulses_per_trial = 200;
        c.randomness_pulses = 200;
        runs.push_back(c);
    }
    {
        auto c = base;
        c.scenario = Scenario::isolation;
        runs.push_back(c);
    }
    int same = 0;
    std::ostringstream d;
    for (const auto& c : runs) {
        const auto first = execute(c);
        const auto files = files_of(first.directory);
        auto replay = load_config((fs::path(first.directory) / "manifest.json").string());
        replay.output_dir = (root / "replay").string();
        RunOptions opt;
        opt.jobs = jobs();
        const auto second = execute(replay, opt);
        const bool eq = files_of(second.directory) == files;
        same += eq;
        d << ' ' << to_string(c.scenario) << (eq ? "=" : "!=");
    }
    fs::remove_all(root);
    return {same == static_cast<int>(runs.size()),
            std::to_string(same) + "/" + std::to_string(runs.size()) + " scenarios byte-identical:" + d.str()};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, isolation_arithmetic},
        {2, oil_reduction},
        {3, sde_correctness},
        {4, free_running_randomness},
        {5, correlation_envelope},
        {6, injection_pulse_shape},
        {7, current_heatmap},
        {8, lag_and_sign},
        {9, undetectable_attack},
        {10, determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& [id, run] : criteria) {
        if (!selected.empty() && !selected.count(id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d: %s  %s  [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
