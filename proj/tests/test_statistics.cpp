#include <doctest.h>

#include "error.hpp"
#include "statistics.hpp"

#include <cmath>
#include <random>

using namespace lsa;

TEST_SUITE("statistics") {

TEST_CASE("Pearson basics") {
    const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 6, 8, 10.5};
    CHECK(pearson(x, x) == doctest::Approx(1.0));
    std::vector<double> neg;
    for (double v : x)
        neg.push_back(-v);
    CHECK(pearson(x, neg) == doctest::Approx(-1.0));
    CHECK(std::isnan(pearson(x, {3, 3, 3, 3, 3})));
    CHECK(std::isnan(pearson({1.0}, {2.0})));
}

TEST_CASE("Pearson is invariant under affine rescaling") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    std::vector<double> x(500), y(500), y2(500);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = n(rng);
        y[i] = 0.6 * x[i] + n(rng);
        y2[i] = 3.7 * y[i] + 12.0;
    }
    CHECK(pearson(x, y2) == doctest::Approx(pearson(x, y)).epsilon(1e-12));
}

TEST_CASE("Pearson skips NaN pairs") {
    const double nan = std::nan("");
    CHECK(pearson({1, nan, 2, 3}, {2, 100, 4, 6}) == doctest::Approx(1.0));
}

TEST_CASE("lag search recovers a known shift") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n;
    std::vector<double> base(3000);
    for (auto& v : base)
        v = n(rng);
    std::vector<double> x(base.begin(), base.begin() + 2000), y(base.begin() + 14, base.begin() + 2014);
    // y[i] = x[i + 14], so x[i] pairs with y[i - 14].
    const auto r = cross_correlation_vs_lag(x, y, 30);
    CHECK(r.best_lag == -14);
    CHECK(r.best_rho == doctest::Approx(1.0));
    CHECK(r.lags.size() == 61);
}

TEST_CASE("anti-correlated series peak at lag zero with rho = -1") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n;
    std::vector<double> x(1000), y(1000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = n(rng);
        y[i] = -x[i];
    }
    const auto r = cross_correlation_vs_lag(x, y, 10);
    CHECK(r.best_lag == 0);
    CHECK(r.best_rho == doctest::Approx(-1.0));
}

TEST_CASE("independent series stay inside 4/sqrt(n)") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n;
    const std::size_t len = 5000;
    std::vector<double> x(len), y(len);
    for (std::size_t i = 0; i < len; ++i) {
        x[i] = n(rng);
        y[i] = n(rng);
    }
    const auto r = cross_correlation_vs_lag(x, y, 20);
    CHECK(std::abs(r.best_rho) < 4.0 / std::sqrt(static_cast<double>(len)));
}

TEST_CASE("lag search preconditions and undefined correlation") {
    std::vector<double> x(10, 1.0), y(10);
    for (int i = 0; i < 10; ++i)
        y[i] = i;
    CHECK_THROWS_AS(cross_correlation_vs_lag(x, y, 5), InvalidArgument);
    const auto r = cross_correlation_vs_lag(x, y, 2);
    CHECK(std::isnan(r.best_rho));
    for (double v : r.rho)
        CHECK(std::isnan(v));
}

TEST_CASE("autocorrelation of white noise and of a ramp") {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> n;
    std::vector<double> x(20000);
    for (auto& v : x)
        v = n(rng);
    const auto r = autocorrelation(x, 50);
    REQUIRE(r.size() == 50);
    for (double v : r)
        CHECK(std::abs(v) < 4.0 / std::sqrt(20000.0));
    std::vector<double> ramp(100);
    for (int i = 0; i < 100; ++i)
        ramp[i] = i;
    CHECK(autocorrelation(ramp, 1)[0] > 0.9);
}

TEST_CASE("Kolmogorov survival reference values") {
    CHECK(kolmogorov_survival(0.0) == doctest::Approx(1.0));
    // Tabulated critical values: Q(1.3581) = 0.05, Q(1.6276) = 0.01.
    CHECK(kolmogorov_survival(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_survival(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("arcsine KS accepts analytically generated interference and rejects uniform") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
    std::vector<double> arcsine, uniform;
    for (int i = 0; i < 10000; ++i) {
        arcsine.push_back(0.5 * (1.0 + std::cos(u(rng) - u(rng))));
        uniform.push_back(u(rng) / 6.283185307179586);
    }
    CHECK(ks_arcsine(arcsine).p_value > 0.01);
    CHECK(ks_arcsine(uniform).p_value < 1e-6);
    CHECK(ks_uniform(uniform).p_value > 0.01);
}

TEST_CASE("chi-square phase uniformity") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 6.283185307179586);
    std::vector<double> good, bad;
    for (int i = 0; i < 5000; ++i) {
        good.push_back(u(rng));
        bad.push_back(std::fmod(u(rng) * 0.5, 6.283185307179586));
    }
    const auto g = chi_square_uniform_phase(good, 20);
    CHECK(g.dof == 19);
    CHECK(g.p_value > 0.01);
    CHECK(chi_square_uniform_phase(bad, 20).p_value < 1e-10);
}

}
