#include "waveform.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lsa {

namespace {

using cld = std::complex<long double>;

// Coefficients (ascending powers) of the reverse Bessel polynomial of `order`.
std::vector<long double> reverse_bessel(int order) {
    std::vector<long double> a(order + 1);
    for (int k = 0; k <= order; ++k) {
        long double v = 1.0L;
        // (2n-k)! / (2^(n-k) k! (n-k)!)
        for (int i = order - k + 1; i <= 2 * order - k; ++i)
            v *= i;
        for (int i = 2; i <= k; ++i)
            v /= i;
        v /= std::pow(2.0L, order - k);
        a[k] = v;
    }
    return a;
}

cld eval(const std::vector<long double>& a, cld s) {
    cld acc = 0;
    for (auto it = a.rbegin(); it != a.rend(); ++it)
        acc = acc * s + *it;
    return acc;
}

// Durand-Kerner iteration; adequate for the low orders used here.
std::vector<cld> polynomial_roots(const std::vector<long double>& a) {
    const int n = static_cast<int>(a.size()) - 1;
    std::vector<long double> monic(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        monic[i] = a[i] / a.back();
    std::vector<cld> z(n);
    const cld seed(0.4L, 0.9L);
    for (int i = 0; i < n; ++i)
        z[i] = std::pow(seed, i) * static_cast<long double>(n);
    for (int iter = 0; iter < 2000; ++iter) {
        long double change = 0;
        for (int i = 0; i < n; ++i) {
            cld denom = 1;
            for (int j = 0; j < n; ++j)
                if (j != i)
                    denom *= z[i] - z[j];
            const cld step = eval(monic, z[i]) / denom;
            z[i] -= step;
            change = std::max(change, std::abs(step));
        }
        if (change < 1e-16L)
            break;
    }
    return z;
}

} // namespace

std::vector<std::complex<double>> lowpass_poles(FilterKind kind, int order, double cutoff_hz) {
    if (order < 1)
        throw InvalidArgument("filter order must be >= 1");
    const double wc = kTwoPi * cutoff_hz;
    std::vector<std::complex<double>> poles;
    if (kind == FilterKind::none)
        return poles;
    if (kind == FilterKind::butterworth) {
        for (int k = 1; k <= order; ++k) {
            const double theta = std::numbers::pi * (2.0 * k + order - 1) / (2.0 * order);
            poles.emplace_back(wc * std::cos(theta), wc * std::sin(theta));
        }
        return poles;
    }
    const auto poly = reverse_bessel(order);
    const auto roots = polynomial_roots(poly);
    // Locate the -3 dB frequency of the delay-normalised prototype.
    const long double dc = std::abs(eval(poly, 0));
    auto gain2 = [&](long double w) {
        const long double m = dc / std::abs(eval(poly, cld(0, w)));
        return m * m;
    };
    long double lo = 0, hi = 1;
    while (gain2(hi) > 0.5L)
        hi *= 2;
    for (int i = 0; i < 200; ++i) {
        const long double mid = 0.5L * (lo + hi);
        (gain2(mid) > 0.5L ? lo : hi) = mid;
    }
    const long double w3db = 0.5L * (lo + hi);
    for (const auto& r : roots)
        poles.emplace_back(static_cast<double>(r.real() / w3db * wc),
                           static_cast<double>(r.imag() / w3db * wc));
    return poles;
}

LowPassFilter::LowPassFilter(const FilterSpec& spec, double dt) {
    if (spec.kind == FilterKind::none || std::isinf(spec.cutoff))
        return;
    if (!(dt > 0.0))
        throw InvalidArgument("filter sample step must be > 0");
    if (!(spec.cutoff * dt < 0.5))
        throw InvalidArgument("filter cutoff must lie below the Nyquist frequency of the integration step");
    const double wc = kTwoPi * spec.cutoff;
    const double k = wc / std::tan(0.5 * wc * dt);
    auto poles = lowpass_poles(spec.kind, spec.order, spec.cutoff);
    // Pair conjugates: keep poles with imag >= 0, real poles become first-order sections.
    std::sort(poles.begin(), poles.end(), [](auto a, auto b) { return a.imag() > b.imag(); });
    const double tiny = 1e-9 * wc;
    for (const auto& p : poles) {
        if (p.imag() < -tiny)
            continue;
        Section s;
        if (std::abs(p.imag()) <= tiny) {
            const double c = -p.real();
            const double d0 = k + c;
            s.b0 = c / d0;
            s.b1 = c / d0;
            s.a1 = (c - k) / d0;
        } else {
            const double a = -2.0 * p.real();
            const double w2 = std::norm(p);
            const double d0 = k * k + a * k + w2;
            s.b0 = w2 / d0;
            s.b1 = 2.0 * w2 / d0;
            s.b2 = w2 / d0;
            s.a1 = (2.0 * w2 - 2.0 * k * k) / d0;
            s.a2 = (k * k - a * k + w2) / d0;
        }
        sections_.push_back(s);
    }
}

void LowPassFilter::reset(double level) {
    for (auto& s : sections_) {
        // Transposed direct form II steady state for y = x = level.
        s.s2 = (s.b2 - s.a2) * level;
        s.s1 = (s.b1 - s.a1) * level + s.s2;
    }
}

double LowPassFilter::process(double x) {
    for (auto& s : sections_) {
        const double y = s.b0 * x + s.s1;
        s.s1 = s.b1 * x - s.a1 * y + s.s2;
        s.s2 = s.b2 * x - s.a2 * y;
        x = y;
    }
    return x;
}

PulseGrid PulseGrid::make(const DriveWaveform& wave, double dt) {
    wave.validate();
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw InvalidArgument("integration step must be finite and > 0");
    if (dt > wave.period / 100.0)
        throw InvalidArgument("integration step exceeds period/100; pulse shape would be under-resolved");
    PulseGrid g;
    g.dt = dt;
    g.samples_per_period = std::llround(wave.period / dt);
    g.on_samples = std::clamp<std::int64_t>(std::llround(wave.on_fraction * static_cast<double>(g.samples_per_period)),
                                            1, g.samples_per_period - 1);
    return g;
}

CurrentSource::CurrentSource(const DriveWaveform& wave, double dt)
    : wave_(wave), grid_(PulseGrid::make(wave, dt)), filter_(wave.filter, dt) {
    // The wave is taken to have been at its off level before t = 0.
    filter_.reset(wave_.off_current);
}

double CurrentSource::next() {
    const std::int64_t phase = index_ % grid_.samples_per_period;
    ++index_;
    const double ideal = phase < grid_.on_samples ? wave_.on_current : wave_.off_current;
    return std::max(0.0, filter_.process(ideal));
}

SampledCurrent synthesize_current(const DriveWaveform& wave, double dt) {
    CurrentSource source(wave, dt);
    SampledCurrent out;
    out.grid = source.grid();
    const std::int64_t n = wave.n_pulses * out.grid.samples_per_period;
    out.values.resize(static_cast<std::size_t>(n));
    for (auto& v : out.values)
        v = source.next();
    return out;
}

} // namespace lsa
