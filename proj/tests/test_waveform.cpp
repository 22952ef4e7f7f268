#include <doctest.h>

#include "error.hpp"
#include "waveform.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

using namespace lsa;

namespace {

DriveWaveform wave(double on, double off, FilterKind kind = FilterKind::bessel, double cutoff = 3.5e9) {
    DriveWaveform w;
    w.on_current = on;
    w.off_current = off;
    w.filter.kind = kind;
    w.filter.cutoff = cutoff;
    w.n_pulses = 6;
    return w;
}

/// 10%-90% rise time of the first rising edge after `from`.
double rise_time(const std::vector<double>& x, std::size_t from, std::size_t to, double lo, double hi, double dt) {
    const double a = lo + 0.1 * (hi - lo), b = lo + 0.9 * (hi - lo);
    auto cross = [&](double level) {
        for (std::size_t i = from + 1; i < to; ++i)
            if (x[i - 1] < level && x[i] >= level)
                return (static_cast<double>(i - 1) + (level - x[i - 1]) / (x[i] - x[i - 1])) * dt;
        return std::nan("");
    };
    return cross(b) - cross(a);
}

} // namespace

TEST_SUITE("waveform") {

TEST_CASE("unbounded bandwidth reproduces the ideal pulse wave") {
    for (auto w : {wave(0.024, 0.002, FilterKind::bessel, std::numeric_limits<double>::infinity()),
                   wave(0.024, 0.002, FilterKind::none)}) {
        const auto c = synthesize_current(w, 1e-12);
        REQUIRE(c.values.size() == static_cast<std::size_t>(w.n_pulses * 1000));
        for (std::size_t i = 0; i < c.values.size(); ++i)
            CHECK(c.values[i] == (i % 1000 < 500 ? 0.024 : 0.002));
    }
}

TEST_CASE("equal on and off currents give a constant current") {
    const auto c = synthesize_current(wave(0.05, 0.05), 1e-12);
    for (double v : c.values)
        CHECK(v == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("rise time of the 3.5 GHz Bessel drive") {
    const double dt = 0.1e-12;
    const auto c = synthesize_current(wave(0.024, 0.0), dt);
    const auto spp = static_cast<std::size_t>(c.grid.samples_per_period);
    // Third period: the filter has settled from its initial state.
    const double tr = rise_time(c.values, 2 * spp, 3 * spp, 0.0, 0.024, dt);
    // 0.35/3.5 GHz = 100 ps is the single-pole rule of thumb. The analog
    // 4th-order Bessel step response (computed separately with scipy) gives
    // 100.037 ps and 0.835% overshoot.
    CHECK(tr == doctest::Approx(100e-12).epsilon(0.05));
    CHECK(tr == doctest::Approx(100.037e-12).epsilon(1e-3));
    const double peak = *std::max_element(c.values.begin() + 2 * static_cast<std::ptrdiff_t>(spp),
                                          c.values.begin() + 3 * static_cast<std::ptrdiff_t>(spp));
    CHECK((peak / 0.024 - 1.0) * 100.0 == doctest::Approx(0.835).epsilon(0.01));
}

TEST_CASE("period mean equals the duty-weighted current") {
    for (double duty : {0.2, 0.5, 0.73}) {
        auto w = wave(0.024, 0.003);
        w.on_fraction = duty;
        const auto c = synthesize_current(w, 0.5e-12);
        const auto spp = static_cast<std::size_t>(c.grid.samples_per_period);
        const double mean = std::accumulate(c.values.begin() + 4 * spp, c.values.begin() + 5 * spp, 0.0) / spp;
        CHECK(std::abs(mean - w.mean_current()) / w.mean_current() < 0.005);
    }
}

TEST_CASE("filtered current never goes negative") {
    for (auto kind : {FilterKind::bessel, FilterKind::butterworth}) {
        const auto c = synthesize_current(wave(0.024, 0.0, kind, 10e9), 0.1e-12);
        CHECK(*std::min_element(c.values.begin(), c.values.end()) >= 0.0);
    }
}

TEST_CASE("coarse steps are rejected") {
    CHECK_THROWS_AS(synthesize_current(wave(0.024, 0.0), 11e-12), InvalidArgument);
    CHECK_NOTHROW(synthesize_current(wave(0.024, 0.0), 10e-12));
}

TEST_CASE("Bessel poles sit at the requested -3 dB point") {
    for (int order : {1, 2, 4, 6}) {
        const auto poles = lowpass_poles(FilterKind::bessel, order, 1e9);
        const std::complex<double> s(0.0, 2.0 * 3.14159265358979323846 * 1e9);
        std::complex<double> h = 1.0;
        for (const auto& p : poles)
            h *= -p / (s - p);
        CAPTURE(order);
        CHECK(std::abs(h) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
    }
}

}
