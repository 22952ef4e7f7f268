#include <doctest.h>

#include "error.hpp"
#include "interferometry.hpp"

#include <cmath>
#include <random>

using namespace lsa;

namespace {

constexpr double kPi = 3.14159265358979323846;

CorrelationSetup small_setup(std::int64_t pulses) {
    CorrelationSetup s;
    s.wave.n_pulses = pulses + s.analysis.burn_in + 1;
    s.max_lag = 4;
    return s;
}

PulseMetrics pulse(std::int64_t k, double phase, double power = 1e-2) {
    PulseMetrics m;
    m.index = k;
    m.phase_at_peak = phase;
    m.max_power = power;
    m.lasing = true;
    return m;
}

} // namespace

TEST_SUITE("interferometry") {

TEST_CASE("interferometer transfer function") {
    CHECK(mzi_output(2.0, 0.0, 0.0) == doctest::Approx(2.0));
    CHECK(mzi_output(2.0, kPi, 0.0) == doctest::Approx(0.0).scale(1.0));
    CHECK(mzi_output(2.0, 0.3, kPi / 2 - 0.3) == doctest::Approx(1.0));
    CHECK(mzi_output(2.0, 1.1, 0.4) == doctest::Approx(mzi_output(2.0, 1.1 + 2 * kPi, 0.4)));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    double mean = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double v = mzi_output(1.0, u(rng), 0.7);
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 1.0);
        mean += v;
    }
    CHECK(mean / 200000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("constant phase stream gives a constant interferogram") {
    std::vector<PulseMetrics> ps;
    for (int k = 0; k < 50; ++k)
        ps.push_back(pulse(k, 1.234));
    InterferometerModel m;
    m.phi0 = 0.4;
    const auto ig = interferogram(ps, m);
    REQUIRE(ig.output.size() == 49);
    for (double v : ig.normalised)
        CHECK(v == doctest::Approx(0.5 * (1 + std::cos(0.4))));
}

TEST_CASE("non-lasing pulses become gaps") {
    std::vector<PulseMetrics> ps;
    for (int k = 0; k < 6; ++k)
        ps.push_back(pulse(k, 0.1 * k));
    ps[3].lasing = false;
    const auto ig = interferogram(ps, InterferometerModel{});
    REQUIRE(ig.output.size() == 5);
    CHECK(ig.pulse_index[0] == 1);
    CHECK(std::isnan(ig.output[2])); // pulse 3 with 2
    CHECK(std::isnan(ig.output[3])); // pulse 4 with 3
    CHECK_FALSE(std::isnan(ig.output[4]));
}

TEST_CASE("uniform phases give arcsine-distributed, uncorrelated output") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 2 * kPi);
    std::vector<double> phases(10001);
    std::vector<std::int64_t> idx;
    for (auto& v : phases)
        v = u(rng);
    for (std::int64_t k = 1; k <= 10000; ++k)
        idx.push_back(k);
    InterferometerModel m;
    m.phi0 = 1.0;
    const auto d = randomness_diagnostics(phase_interferogram(phases, idx, m));
    CHECK(d.n == 10000);
    CHECK(d.arcsine_pass);
    CHECK(d.acf_pass);
}

TEST_CASE("free-running laser interferogram passes the randomness diagnostics") {
    LaserParams p;
    DriveWaveform w;
    w.n_pulses = 5006;
    const auto pulses = simulate_pulses(p, w, {}, IntegrationOptions{});
    InterferometerModel m;
    m.phi0 = 2.1;
    const auto d = randomness_diagnostics(interferogram(pulses, m));
    CHECK(d.n == 5000);
    CHECK(d.arcsine_pass);
    CHECK(d.acf_pass);
}

TEST_CASE("trial seeds are independent of power and distinct across trials") {
    const auto a = trial_seeds(5, 0), b = trial_seeds(5, 1);
    CHECK(a.alice_noise != b.alice_noise);
    CHECK(a.phi0_alice != b.phi0_alice);
    CHECK(a.phi0_alice >= 0.0);
    CHECK(a.phi0_alice < 2 * kPi);
    CHECK(trial_seeds(5, 0).injection_phase == a.injection_phase);
}

TEST_CASE("locked lasers: aligned interferometers correlate, pi offset anti-correlates") {
    auto s = small_setup(300);
    s.phi0_policy = Phi0Policy::fixed;
    s.fixed_phi0_alice = 0.3;
    s.fixed_phi0_eve = 0.3;
    const auto seeds = trial_seeds(1, 0);
    const auto aligned = lsa_correlation_trial(s, 480e-6, seeds);
    CHECK(aligned.rho > 0.8);
    s.fixed_phi0_eve = 0.3 + kPi;
    const auto flipped = lsa_correlation_trial(s, 480e-6, seeds);
    CHECK(flipped.rho == doctest::Approx(-aligned.rho).epsilon(1e-9));
}

TEST_CASE("no injection: correlation stays in the null band") {
    const auto s = small_setup(1000);
    const auto r = lsa_correlation_trial(s, 0.0, trial_seeds(2, 0));
    CHECK(std::abs(r.rho) < 4.0 / std::sqrt(1000.0));
    CHECK(r.lasing_pulses == 1001); // the extra pulse is the last interference partner
}

TEST_CASE("envelope invariants and baseline reuse") {
    const auto s = small_setup(300);
    const auto rep = envelope_protocol(s, 1e-6, 3, 4, 1);
    CHECK(rep.n_trials == 4);
    CHECK(rep.per_trial_rho.size() == 4);
    CHECK(rep.rho_max >= rep.rho_min);
    CHECK(rep.baseline_max >= rep.baseline_min);
    for (double r : rep.per_trial_rho) {
        CHECK(r <= 1.0);
        CHECK(r >= -1.0);
    }
    CHECK(rep.window == doctest::Approx(301e-9));
    const auto zero = envelope_protocol(s, 0.0, 3, 4, 1);
    CHECK(zero.rho_max == zero.baseline_max);
    CHECK(zero.rho_min == zero.baseline_min);
}

TEST_CASE("null envelope widens with more trials") {
    const auto s = small_setup(200);
    const auto few = envelope_protocol(s, 0.0, 4, 3, 1);
    const auto many = envelope_protocol(s, 0.0, 4, 12, 1);
    CHECK(many.baseline_max - many.baseline_min >= few.baseline_max - few.baseline_min);
}

TEST_CASE("results do not depend on the worker count") {
    const auto s = small_setup(200);
    const auto a = run_trials(s, 1e-6, 9, 4, 1);
    const auto b = run_trials(s, 1e-6, 9, 4, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i].rho == b[i].rho);
}

TEST_CASE("parallel_for rethrows worker failures") {
    CHECK_THROWS_AS(parallel_for(8, 3,
                                 [](std::int64_t i) {
                                     if (i == 5)
                                         throw NumericalError("boom");
                                 }),
                    NumericalError);
}

}
