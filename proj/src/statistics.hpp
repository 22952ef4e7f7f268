#pragma once

#include <cstdint>
#include <vector>

namespace lsa {

/// Pearson correlation over index-aligned pairs, skipping pairs where either
/// value is NaN. Returns NaN when fewer than two pairs remain or either side
/// has zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct LagCorrelation {
    std::vector<std::int64_t> lags;
    std::vector<double> rho; ///< NaN where undefined
    std::int64_t best_lag = 0;
    double best_rho = 0.0;   ///< ρ at best_lag (signed); NaN if every lag is undefined
};

/// ρ between x[i] and y[i + lag] for lag in [-max_lag, max_lag]. best_lag
/// maximises |ρ|; ties go to the smaller |lag|.
LagCorrelation cross_correlation_vs_lag(const std::vector<double>& x, const std::vector<double>& y,
                                        std::int64_t max_lag);

/// Sample autocorrelation r[k-1] for k = 1..max_lag using the overall mean
/// and variance. NaN entries are skipped pairwise.
std::vector<double> autocorrelation(const std::vector<double>& x, std::int64_t max_lag);

struct KsResult {
    double statistic = 0.0; ///< sup |F_n − F|
    double p_value = 0.0;
    std::int64_t n = 0;
};

/// Kolmogorov survival function Q(λ) = 2 Σ (−1)^{k−1} exp(−2k²λ²).
double kolmogorov_survival(double lambda);

/// One-sample KS test of values in [0, 1] against the arcsine law
/// F(x) = (2/π)·asin(√x). NaN values are ignored.
KsResult ks_arcsine(std::vector<double> x);

/// One-sample KS test against Uniform[0, 1).
KsResult ks_uniform(std::vector<double> x);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 0.0;
};

/// Equal-width histogram test that angles are uniform on [0, 2π).
ChiSquareResult chi_square_uniform_phase(const std::vector<double>& phases, int bins);

} // namespace lsa
