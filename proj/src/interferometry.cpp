#include "interferometry.hpp"

#include "error.hpp"
#include "rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace lsa {

double mzi_output(double intensity_in, double delta_phi, double phi0) {
    return 0.5 * intensity_in * (1.0 + std::cos(delta_phi + phi0));
}

Interferogram interferogram(const std::vector<PulseMetrics>& pulses, const InterferometerModel& model) {
    if (model.delay_periods < 1)
        throw InvalidArgument("interferometer delay must be at least one period");
    Interferogram ig;
    const auto d = static_cast<std::size_t>(model.delay_periods);
    for (std::size_t j = d; j < pulses.size(); ++j) {
        const PulseMetrics& cur = pulses[j];
        const PulseMetrics& prev = pulses[j - d];
        if (cur.index - prev.index != model.delay_periods)
            throw InvalidArgument("interferogram needs consecutive pulse indices");
        ig.pulse_index.push_back(cur.index);
        if (!cur.lasing || !prev.lasing) {
            ig.output.push_back(std::nan(""));
            ig.normalised.push_back(std::nan(""));
            continue;
        }
        const double out = mzi_output(cur.max_power, cur.phase_at_peak - prev.phase_at_peak, model.phi0);
        ig.output.push_back(out);
        ig.normalised.push_back(out / cur.max_power);
    }
    return ig;
}

Interferogram interferogram(const Trace& trace, const InterferometerModel& model, const DriveWaveform& wave,
                            const PulseAnalysisOptions& opt) {
    return interferogram(analyse_trace(trace, wave, opt), model);
}

Interferogram phase_interferogram(const std::vector<double>& phases, const std::vector<std::int64_t>& pulse_index,
                                  const InterferometerModel& model) {
    Interferogram ig;
    for (auto k : pulse_index) {
        const auto prev = k - model.delay_periods;
        if (prev < 0 || k >= static_cast<std::int64_t>(phases.size()))
            throw InvalidArgument("phase sequence does not cover the requested pulses");
        const double out =
            mzi_output(1.0, phases[static_cast<std::size_t>(k)] - phases[static_cast<std::size_t>(prev)], model.phi0);
        ig.pulse_index.push_back(k);
        ig.output.push_back(out);
        ig.normalised.push_back(out);
    }
    return ig;
}

TrialSeeds trial_seeds(std::uint64_t master_seed, std::int64_t trial) {
    const auto t = static_cast<std::uint64_t>(trial);
    TrialSeeds s;
    s.alice_noise = derive_seed(master_seed, SeedStream::laser_noise, t);
    s.injection_phase = derive_seed(master_seed, SeedStream::injection_phase, t);
    s.eve_noise = derive_seed(master_seed, SeedStream::eve_noise, t);
    std::mt19937_64 engine(derive_seed(master_seed, SeedStream::interferometer, t));
    std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
    s.phi0_alice = uniform(engine);
    s.phi0_eve = uniform(engine);
    return s;
}

TrialResult lsa_correlation_trial(const CorrelationSetup& setup, double injected_power, const TrialSeeds& seeds,
                                  std::int64_t trial) {
    InjectionSignal inj;
    inj.power = injected_power;
    inj.detuning = setup.detuning;
    std::vector<PulseMetrics> eve_pulses;
    if (setup.eve_mode == EveMode::simulated) {
        IntegrationOptions eopt = setup.integration;
        eopt.seed = seeds.eve_noise;
        PulseAnalysisOptions all = setup.analysis;
        all.burn_in = 0;
        DriveWaveform ewave = setup.wave;
        ewave.n_pulses += 1; // the schedule needs one phase beyond the last pulse
        eve_pulses = simulate_pulses(setup.eve, ewave, InjectionSignal{}, eopt, all);
        inj.phase_mode = PhaseMode::sequence;
        for (const auto& m : eve_pulses)
            inj.phases.push_back(m.phase_at_peak);
    } else {
        inj.phase_mode = setup.phase_mode;
        inj.phase = setup.constant_phase;
        inj.phase_seed = seeds.injection_phase;
    }

    IntegrationOptions aopt = setup.integration;
    aopt.seed = seeds.alice_noise;
    TrialResult r;
    r.trial = trial;
    const bool fixed = setup.phi0_policy == Phi0Policy::fixed;
    r.phi0_alice = fixed ? setup.fixed_phi0_alice : seeds.phi0_alice;
    r.phi0_eve = fixed ? setup.fixed_phi0_eve : seeds.phi0_eve;
    std::vector<double> phases;
    const auto alice = simulate_pulses(setup.alice, setup.wave, inj, aopt, setup.analysis, &r.stats, &phases);
    for (const auto& m : alice)
        r.lasing_pulses += m.lasing ? 1 : 0;

    InterferometerModel am;
    am.phi0 = r.phi0_alice;
    InterferometerModel em;
    em.phi0 = r.phi0_eve;
    const Interferogram ai = interferogram(alice, am);

    Interferogram ei;
    if (setup.eve_mode == EveMode::simulated) {
        std::vector<PulseMetrics> aligned;
        const auto first = static_cast<std::size_t>(setup.analysis.burn_in);
        aligned.assign(eve_pulses.begin() + static_cast<std::ptrdiff_t>(first),
                       eve_pulses.begin() + static_cast<std::ptrdiff_t>(first + alice.size()));
        ei = interferogram(aligned, em);
    } else {
        if (phases.empty())
            phases.assign(static_cast<std::size_t>(setup.wave.n_pulses + 1), setup.constant_phase);
        ei = phase_interferogram(phases, ai.pulse_index, em);
    }

    r.rho = pearson(ai.output, ei.output);
    const auto n = static_cast<std::int64_t>(ai.output.size());
    if (setup.max_lag > 0 && 2 * setup.max_lag < n) {
        const auto lc = cross_correlation_vs_lag(ai.output, ei.output, setup.max_lag);
        r.best_lag = lc.best_lag;
        r.best_lag_rho = lc.best_rho;
    } else {
        r.best_lag_rho = r.rho;
    }
    return r;
}

void parallel_for(std::int64_t n, int jobs, const std::function<void(std::int64_t)>& body) {
    if (jobs <= 0)
        jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    jobs = static_cast<int>(std::min<std::int64_t>(jobs, n));
    if (jobs <= 1) {
        for (std::int64_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            while (!failed.load()) {
                const std::int64_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    failed = true;
                }
            }
        });
    }
    for (auto& t : workers)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

std::vector<TrialResult> run_trials(const CorrelationSetup& setup, double injected_power, std::uint64_t master_seed,
                                    std::int64_t n_trials, int jobs) {
    std::vector<TrialResult> out(static_cast<std::size_t>(n_trials));
    parallel_for(n_trials, jobs, [&](std::int64_t t) {
        out[static_cast<std::size_t>(t)] = lsa_correlation_trial(setup, injected_power, trial_seeds(master_seed, t), t);
    });
    return out;
}

namespace {

std::pair<double, double> extremes(const std::vector<TrialResult>& trials) {
    double hi = -INFINITY, lo = INFINITY;
    for (const auto& t : trials) {
        if (std::isnan(t.rho))
            continue;
        hi = std::max(hi, t.rho);
        lo = std::min(lo, t.rho);
    }
    if (hi < lo)
        return {std::nan(""), std::nan("")};
    return {hi, lo};
}

} // namespace

CorrelationReport envelope_protocol(const CorrelationSetup& setup, double injected_power, std::uint64_t master_seed,
                                    std::int64_t n_trials, int jobs, const std::vector<TrialResult>* baseline) {
    if (n_trials < 2)
        throw InvalidArgument("envelope protocol needs at least two trials");
    CorrelationReport rep;
    rep.injected_power = injected_power;
    rep.n_trials = n_trials;
    rep.trials = run_trials(setup, injected_power, master_seed, n_trials, jobs);
    std::vector<TrialResult> own_baseline;
    if (!baseline) {
        own_baseline = injected_power == 0.0 ? rep.trials : run_trials(setup, 0.0, master_seed, n_trials, jobs);
        baseline = &own_baseline;
    }
    double best_abs = -1.0;
    for (const auto& t : rep.trials) {
        rep.per_trial_rho.push_back(t.rho);
        if (!std::isnan(t.best_lag_rho) && std::abs(t.best_lag_rho) > best_abs) {
            best_abs = std::abs(t.best_lag_rho);
            rep.best_lag = static_cast<double>(t.best_lag) * setup.wave.period;
        }
    }
    std::tie(rep.rho_max, rep.rho_min) = extremes(rep.trials);
    std::tie(rep.baseline_max, rep.baseline_min) = extremes(*baseline);
    rep.window = static_cast<double>(setup.wave.n_pulses - setup.analysis.burn_in) * setup.wave.period;
    return rep;
}

double locked_ceiling(const CorrelationSetup& setup, double power, std::uint64_t master_seed) {
    CorrelationSetup aligned = setup;
    aligned.phi0_policy = Phi0Policy::fixed;
    aligned.fixed_phi0_alice = 0.0;
    aligned.fixed_phi0_eve = 0.0;
    return lsa_correlation_trial(aligned, power, trial_seeds(master_seed, 0)).rho;
}

CorrelationCurve correlation_vs_power_curve(const CorrelationSetup& setup, const std::vector<double>& powers,
                                            std::uint64_t master_seed, std::int64_t n_trials, int jobs,
                                            double ceiling_power) {
    if (powers.empty())
        throw InvalidArgument("power grid is empty");
    CorrelationCurve curve;
    const auto baseline = run_trials(setup, 0.0, master_seed, n_trials, jobs);
    for (double p : powers)
        curve.points.push_back(envelope_protocol(setup, p, master_seed, n_trials, jobs, &baseline));
    for (const auto& pt : curve.points) {
        if (pt.injected_power > 0.0 && pt.rho_max > pt.baseline_max &&
            (!curve.onset_power || pt.injected_power < *curve.onset_power))
            curve.onset_power = pt.injected_power;
    }
    curve.ceiling_power = ceiling_power;
    curve.ceiling = locked_ceiling(setup, ceiling_power, master_seed);
    return curve;
}

RandomnessDiagnostics randomness_diagnostics(const Interferogram& ig, std::int64_t max_lag, double significance) {
    RandomnessDiagnostics d;
    d.acf_lags = max_lag;
    d.significance = significance;
    d.arcsine = ks_arcsine(ig.normalised);
    d.n = d.arcsine.n;
    const auto acf = autocorrelation(ig.normalised, max_lag);
    d.acf_max_abs = 0.0;
    for (double r : acf)
        d.acf_max_abs = std::max(d.acf_max_abs, std::isnan(r) ? INFINITY : std::abs(r));
    d.acf_band = 4.0 / std::sqrt(static_cast<double>(d.n));
    d.arcsine_pass = d.arcsine.p_value > significance;
    d.acf_pass = d.acf_max_abs < d.acf_band;
    return d;
}

} // namespace lsa
