#include "pulse_metrics.hpp"

#include "csv.hpp"
#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace lsa {

double wrap_phase(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0)
        w += kTwoPi;
    return w >= kTwoPi ? 0.0 : w;
}

namespace {

double trapezoid(const std::vector<double>& y, double h) {
    if (y.size() < 2)
        return 0.0;
    double sum = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        sum += y[i];
    return sum * h;
}

double prominence(const std::vector<double>& p, std::size_t i) {
    double left = p[i];
    for (std::size_t j = i; j-- > 0;) {
        if (p[j] > p[i])
            break;
        left = std::min(left, p[j]);
    }
    double right = p[i];
    for (std::size_t j = i + 1; j < p.size(); ++j) {
        if (p[j] > p[i])
            break;
        right = std::min(right, p[j]);
    }
    return p[i] - std::max(left, right);
}

} // namespace

PulseMetrics analyse_window(const std::vector<double>& power, const std::vector<double>& phase, double spacing,
                            std::int64_t on_count, const PulseAnalysisOptions& opt) {
    const auto n = power.size();
    if (n < 3 || phase.size() != n)
        throw InvalidArgument("pulse window needs at least three samples");
    PulseMetrics m;
    m.energy = trapezoid(power, spacing);

    const auto first_quiet = static_cast<std::size_t>(on_count + 3 * (static_cast<std::int64_t>(n - 1) - on_count) / 4);
    const auto last = n - 1; // boundary sample belongs to the next window's edge
    double floor_sum = 0.0;
    std::size_t floor_n = 0;
    for (std::size_t i = std::min(first_quiet, last - 1); i < last; ++i, ++floor_n)
        floor_sum += power[i];
    m.floor = std::max(floor_sum / static_cast<double>(floor_n), opt.floor_min);

    const auto imax = static_cast<std::size_t>(std::max_element(power.begin(), power.end()) - power.begin());
    m.max_power = power[imax];
    m.max_time = static_cast<double>(imax) * spacing;
    m.phase_at_peak = wrap_phase(phase[imax]);
    m.lasing = m.max_power > opt.lasing_ratio * m.floor && m.max_power > 0.0;

    if (!m.lasing) {
        m.turn_on_delay = std::nan("");
        return m;
    }

    const double level = opt.delay_level * m.max_power;
    for (std::size_t j = 0; j < n; ++j) {
        if (power[j] >= level) {
            if (j == 0) {
                m.turn_on_delay = 0.0;
            } else {
                const double frac = (level - power[j - 1]) / (power[j] - power[j - 1]);
                m.turn_on_delay = (static_cast<double>(j - 1) + frac) * spacing;
            }
            break;
        }
    }

    std::vector<std::size_t> cand;
    const double min_height = opt.peak_ratio * m.floor;
    const double min_prom = opt.min_prominence * m.max_power;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (power[i] > power[i - 1] && power[i] >= power[i + 1] && power[i] > min_height &&
            prominence(power, i) >= min_prom)
            cand.push_back(i);
    std::stable_sort(cand.begin(), cand.end(), [&](auto a, auto b) { return power[a] > power[b]; });
    const double sep = opt.min_peak_separation / spacing;
    std::vector<std::size_t> kept;
    for (auto c : cand) {
        const bool clear = std::none_of(kept.begin(), kept.end(), [&](auto k) {
            return std::abs(static_cast<double>(c) - static_cast<double>(k)) < sep;
        });
        if (clear)
            kept.push_back(c);
    }
    std::sort(kept.begin(), kept.end());
    for (auto k : kept) {
        m.peak_times.push_back(static_cast<double>(k) * spacing);
        m.peak_powers.push_back(power[k]);
    }
    return m;
}

PulseAnalyzer::PulseAnalyzer(const PulseGrid& grid, const PulseAnalysisOptions& opt, std::int64_t stride)
    : grid_(grid), opt_(opt), stride_(stride) {
    if (stride < 1 || grid.samples_per_period % stride != 0)
        throw InvalidArgument("record stride must divide the samples per period");
    if (opt.burn_in < 0)
        throw InvalidArgument("burn-in must be >= 0");
    window_samples_ = grid.samples_per_period / stride;
    on_samples_ = grid.on_samples / stride;
    if (window_samples_ < 2)
        throw InvalidArgument("pulse window needs at least two samples per period");
    power_.reserve(static_cast<std::size_t>(window_samples_ + 1));
    phase_.reserve(static_cast<std::size_t>(window_samples_ + 1));
}

void PulseAnalyzer::push(double power, double phase) {
    power_.push_back(power);
    phase_.push_back(phase);
    if (static_cast<std::int64_t>(power_.size()) == window_samples_ + 1)
        close_window();
}

void PulseAnalyzer::close_window() {
    if (pulse_ >= opt_.burn_in) {
        PulseMetrics m = analyse_window(power_, phase_, grid_.dt * static_cast<double>(stride_), on_samples_, opt_);
        m.index = pulse_;
        analysed_energy_ += m.energy;
        pulses_.push_back(std::move(m));
    }
    ++pulse_;
    const double p = power_.back();
    const double ph = phase_.back();
    power_.clear();
    phase_.clear();
    power_.push_back(p);
    phase_.push_back(ph);
}

std::vector<PulseMetrics> analyse_trace(const Trace& trace, const DriveWaveform& wave,
                                        const PulseAnalysisOptions& opt) {
    const auto grid = PulseGrid::make(wave, trace.dt);
    PulseAnalyzer an(grid, opt, trace.stride);
    const std::int64_t per = grid.samples_per_period / trace.stride;
    if (static_cast<std::int64_t>(trace.size()) < (opt.burn_in + 1) * per + 1)
        throw InvalidArgument("trace is shorter than burn-in plus one drive period");
    for (std::size_t i = 0; i < trace.size(); ++i)
        an.push(trace.power[i], trace.phase[i]);
    return an.take();
}

std::vector<double> energy_per_pulse(const Trace& trace, const DriveWaveform& wave, const PulseAnalysisOptions& opt) {
    const auto pulses = analyse_trace(trace, wave, opt);
    std::vector<double> e;
    e.reserve(pulses.size());
    for (const auto& m : pulses)
        e.push_back(m.energy);
    return e;
}

std::vector<double> turn_on_delays(const std::vector<PulseMetrics>& pulses) {
    std::vector<double> d;
    for (const auto& m : pulses)
        if (m.lasing)
            d.push_back(m.turn_on_delay);
    return d;
}

PulseSummary summarise(const std::vector<PulseMetrics>& pulses) {
    PulseSummary s;
    s.n_pulses = static_cast<std::int64_t>(pulses.size());
    double e = 0, d = 0, p1 = 0, p2 = 0, pm = 0;
    std::int64_t n1 = 0, n2 = 0;
    for (const auto& m : pulses) {
        e += m.energy;
        pm += m.max_power;
        if (!m.lasing)
            continue;
        ++s.n_lasing;
        d += m.turn_on_delay;
        if (!m.peak_powers.empty()) {
            p1 += m.peak_powers[0];
            ++n1;
        }
        if (m.peak_powers.size() > 1) {
            p2 += m.peak_powers[1];
            ++n2;
        }
    }
    const double nan = std::nan("");
    s.mean_energy = s.n_pulses ? e / static_cast<double>(s.n_pulses) : nan;
    s.mean_max_power = s.n_pulses ? pm / static_cast<double>(s.n_pulses) : nan;
    s.mean_delay = s.n_lasing ? d / static_cast<double>(s.n_lasing) : nan;
    s.mean_first_peak = n1 ? p1 / static_cast<double>(n1) : nan;
    s.mean_second_peak = n2 ? p2 / static_cast<double>(n2) : nan;
    return s;
}

PulseAnalysisOptions with_laser_floor(PulseAnalysisOptions opt, const LaserParams& p) {
    opt.floor_min = std::max(opt.floor_min, spontaneous_power_at_threshold(p));
    return opt;
}

std::vector<PulseMetrics> simulate_pulses(const LaserParams& p, const DriveWaveform& wave,
                                          const InjectionSignal& inj, const IntegrationOptions& opt,
                                          const PulseAnalysisOptions& popt, IntegrationStats* stats,
                                          std::vector<double>* injection_phases) {
    const auto grid = PulseGrid::make(wave, opt.dt);
    PulseAnalyzer an(grid, with_laser_floor(popt, p));
    const auto st = integrate_streaming(
        p, wave, inj, opt, [&](const StepSample& s) { an.push(s.power, s.state.phase); }, injection_phases);
    if (stats)
        *stats = st;
    return an.take();
}

EnergyComparison compare_energy(const LaserParams& p, const DriveWaveform& wave, double injected_power,
                                const IntegrationOptions& opt, const PulseAnalysisOptions& popt) {
    if (wave.n_pulses - popt.burn_in < 100)
        throw InvalidArgument("energy comparison needs at least 100 pulses after burn-in");
    if (!opt.noise)
        throw InvalidArgument("energy comparison is defined with spontaneous-emission noise on");
    InjectionSignal inj;
    EnergyComparison c;
    c.base = summarise(simulate_pulses(p, wave, inj, opt, popt));
    if (injected_power == 0.0) {
        c.seeded = c.base;
    } else {
        inj.power = injected_power;
        c.seeded = summarise(simulate_pulses(p, wave, inj, opt, popt));
    }
    if (!(c.base.mean_energy > 0.0))
        c.increase_percent = std::nan("");
    else if (injected_power == 0.0)
        c.increase_percent = 0.0;
    else
        c.increase_percent = 100.0 * (c.seeded.mean_energy - c.base.mean_energy) / c.base.mean_energy;
    return c;
}

double energy_increase_percent(const LaserParams& p, const DriveWaveform& wave, double injected_power,
                               const IntegrationOptions& opt, const PulseAnalysisOptions& popt) {
    const auto c = compare_energy(p, wave, injected_power, opt, popt);
    // Spontaneous emission alone leaves a small nonzero energy below threshold.
    if (!(c.base.mean_energy > 0.0) || c.base.n_lasing == 0)
        throw NumericalError("free-running run has no lasing pulses; the drive does not produce pulses");
    return c.increase_percent;
}

void write_pulse_csv(std::ostream& os, const std::vector<PulseMetrics>& pulses) {
    os << "index,energy_J,delay_s,n_peaks,peak1_W,phase_rad\n";
    for (const auto& m : pulses) {
        os << m.index << ',' << format_double(m.energy) << ',' << format_double(m.turn_on_delay) << ','
           << m.peak_powers.size() << ','
           << format_double(m.peak_powers.empty() ? std::nan("") : m.peak_powers[0]) << ','
           << format_double(m.phase_at_peak) << '\n';
    }
}

} // namespace lsa
