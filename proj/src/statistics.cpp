#include "statistics.hpp"

#include "error.hpp"
#include "params.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lsa {

namespace {

double pearson_range(const double* x, const double* y, std::size_t n) {
    double mx = 0, my = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(x[i]) || std::isnan(y[i]))
            continue;
        mx += x[i];
        my += y[i];
        ++m;
    }
    if (m < 2)
        return std::nan("");
    mx /= static_cast<double>(m);
    my /= static_cast<double>(m);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::isnan(x[i]) || std::isnan(y[i]))
            continue;
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        return std::nan("");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

KsResult ks_against(std::vector<double> x, double (*cdf)(double)) {
    std::erase_if(x, [](double v) { return std::isnan(v); });
    KsResult r;
    r.n = static_cast<std::int64_t>(x.size());
    if (x.empty())
        throw InvalidArgument("KS test needs at least one value");
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    r.statistic = d;
    const double sn = std::sqrt(n);
    r.p_value = kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
    return r;
}

double arcsine_cdf(double v) {
    return 2.0 / std::numbers::pi * std::asin(std::sqrt(std::clamp(v, 0.0, 1.0)));
}

double uniform_cdf(double v) {
    return std::clamp(v, 0.0, 1.0);
}

} // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw InvalidArgument("pearson: sequences differ in length");
    return pearson_range(x.data(), y.data(), x.size());
}

LagCorrelation cross_correlation_vs_lag(const std::vector<double>& x, const std::vector<double>& y,
                                        std::int64_t max_lag) {
    if (x.size() != y.size())
        throw InvalidArgument("cross-correlation: sequences differ in length");
    const auto n = static_cast<std::int64_t>(x.size());
    if (max_lag < 0 || 2 * max_lag >= n)
        throw InvalidArgument("cross-correlation: max_lag must satisfy 0 <= max_lag < length/2");
    LagCorrelation out;
    out.best_rho = std::nan("");
    double best_abs = -1.0;
    for (std::int64_t lag = -max_lag; lag <= max_lag; ++lag) {
        const std::int64_t x0 = lag >= 0 ? 0 : -lag;
        const std::int64_t y0 = lag >= 0 ? lag : 0;
        const auto len = static_cast<std::size_t>(n - std::abs(lag));
        const double r = pearson_range(x.data() + x0, y.data() + y0, len);
        out.lags.push_back(lag);
        out.rho.push_back(r);
        if (std::isnan(r))
            continue;
        const double a = std::abs(r);
        if (a > best_abs || (a == best_abs && std::abs(lag) < std::abs(out.best_lag))) {
            best_abs = a;
            out.best_lag = lag;
            out.best_rho = r;
        }
    }
    return out;
}

std::vector<double> autocorrelation(const std::vector<double>& x, std::int64_t max_lag) {
    const auto n = static_cast<std::int64_t>(x.size());
    if (max_lag < 1 || max_lag >= n)
        throw InvalidArgument("autocorrelation: max_lag must lie in [1, length)");
    double mean = 0;
    std::int64_t m = 0;
    for (double v : x)
        if (!std::isnan(v)) {
            mean += v;
            ++m;
        }
    mean /= static_cast<double>(m);
    double var = 0;
    for (double v : x)
        if (!std::isnan(v))
            var += (v - mean) * (v - mean);
    std::vector<double> r(static_cast<std::size_t>(max_lag), std::nan(""));
    if (var == 0.0)
        return r;
    for (std::int64_t k = 1; k <= max_lag; ++k) {
        double c = 0;
        for (std::int64_t i = 0; i + k < n; ++i) {
            const double a = x[static_cast<std::size_t>(i)];
            const double b = x[static_cast<std::size_t>(i + k)];
            if (!std::isnan(a) && !std::isnan(b))
                c += (a - mean) * (b - mean);
        }
        r[static_cast<std::size_t>(k - 1)] = c / var;
    }
    return r;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0)
        return 1.0;
    if (lambda < 0.2)
        return 1.0; // series converges slowly here; the true value differs from 1 by < 1e-10
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-17)
            break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_arcsine(std::vector<double> x) {
    return ks_against(std::move(x), arcsine_cdf);
}

KsResult ks_uniform(std::vector<double> x) {
    return ks_against(std::move(x), uniform_cdf);
}

ChiSquareResult chi_square_uniform_phase(const std::vector<double>& phases, int bins) {
    if (bins < 2)
        throw InvalidArgument("chi-square test needs at least two bins");
    std::vector<double> count(static_cast<std::size_t>(bins), 0.0);
    std::size_t n = 0;
    for (double ph : phases) {
        if (std::isnan(ph))
            continue;
        double w = std::fmod(ph, kTwoPi);
        if (w < 0)
            w += kTwoPi;
        auto b = static_cast<std::size_t>(w / kTwoPi * bins);
        count[std::min(b, count.size() - 1)] += 1.0;
        ++n;
    }
    if (n == 0)
        throw InvalidArgument("chi-square test needs at least one phase");
    const double expected = static_cast<double>(n) / bins;
    ChiSquareResult r;
    for (double c : count)
        r.statistic += (c - expected) * (c - expected) / expected;
    r.dof = bins - 1;
    boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    return r;
}

} // namespace lsa
