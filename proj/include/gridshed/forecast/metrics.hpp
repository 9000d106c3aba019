#pragma once

#include <cmath>
#include <vector>

namespace gridshed::forecast {

/// Point and probabilistic accuracy scores. mape_percent and crps are NaN
/// when undefined (all actuals negligible / no intervals supplied).
struct Metrics {
    double rmse = 0.0;
    double mape_percent = std::numeric_limits<double>::quiet_NaN();
    long mape_skipped = 0;  // entries dropped by the |actual| <= eps rule
    double r_squared = 0.0;
    double crps = std::numeric_limits<double>::quiet_NaN();

    bool has_mape() const { return !std::isnan(mape_percent); }
    bool has_crps() const { return !std::isnan(crps); }
};

/// A forecast: point values plus optional 80%-nominal interval bounds.
struct ForecastResult {
    std::vector<double> point;
    std::vector<double> lower;  // empty when the model produces no intervals
    std::vector<double> upper;
    Metrics metrics;  // filled by evaluation, zero-initialized otherwise

    bool has_intervals() const { return !lower.empty(); }
};

/// Closed-form CRPS of a Gaussian predictive distribution at observation y.
double gaussian_crps(double y, double mu, double sigma);

/// The z value putting 80% central mass inside [mu - z s, mu + z s].
inline constexpr double kZ80 = 1.2815515655446004;

/// RMSE, MAPE (skipping entries with |actual| <= 1e-6 kWh), R-squared about
/// the actuals' mean (may be negative), and, when 80% intervals are given,
/// the mean Gaussian CRPS implied by them. Lengths must match and be >= 1.
Metrics compute_metrics(const std::vector<double>& actual,
                        const std::vector<double>& predicted,
                        const std::vector<double>& lower = {},
                        const std::vector<double>& upper = {});

}  // namespace gridshed::forecast
