#include "gridshed/forecast/metrics.hpp"

#include <cmath>

#include "gridshed/core/errors.hpp"

namespace gridshed::forecast {

namespace {

constexpr double kMapeEps = 1e-6;  // kWh below which MAPE entries are skipped
constexpr double kInvSqrtPi = 0.5641895835477563;
constexpr double kInvSqrtTwoPi = 0.3989422804014327;

double std_normal_pdf(double z) { return kInvSqrtTwoPi * std::exp(-0.5 * z * z); }
double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double gaussian_crps(double y, double mu, double sigma) {
    if (!(sigma >= 0.0)) throw ArgumentError("gaussian_crps: sigma must be >= 0");
    if (sigma == 0.0) return std::fabs(y - mu);
    const double z = (y - mu) / sigma;
    return sigma * (z * (2.0 * std_normal_cdf(z) - 1.0) + 2.0 * std_normal_pdf(z) - kInvSqrtPi);
}

Metrics compute_metrics(const std::vector<double>& actual,
                        const std::vector<double>& predicted,
                        const std::vector<double>& lower,
                        const std::vector<double>& upper) {
    const std::size_t n = actual.size();
    if (n == 0 || predicted.size() != n) {
        throw ArgumentError("compute_metrics: series must be equal length and non-empty");
    }
    const bool with_intervals = !lower.empty();
    if (with_intervals && (lower.size() != n || upper.size() != n)) {
        throw ArgumentError("compute_metrics: interval bounds must match series length");
    }

    Metrics m;
    double sse = 0.0, abs_pct = 0.0, crps_sum = 0.0;
    long mape_used = 0;
    double mean_actual = 0.0;
    for (double a : actual) mean_actual += a;
    mean_actual /= static_cast<double>(n);

    double sst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double err = predicted[i] - actual[i];
        sse += err * err;
        sst += (actual[i] - mean_actual) * (actual[i] - mean_actual);
        if (std::fabs(actual[i]) > kMapeEps) {
            abs_pct += std::fabs(err / actual[i]);
            ++mape_used;
        } else {
            ++m.mape_skipped;
        }
        if (with_intervals) {
            const double sigma = (upper[i] - lower[i]) / (2.0 * kZ80);
            crps_sum += gaussian_crps(actual[i], predicted[i], std::max(sigma, 0.0));
        }
    }

    m.rmse = std::sqrt(sse / static_cast<double>(n));
    if (mape_used > 0) {
        m.mape_percent = 100.0 * abs_pct / static_cast<double>(mape_used);
    }
    if (sst > 0.0) {
        m.r_squared = 1.0 - sse / sst;
    } else {
        // Constant actuals: perfect prediction scores 1, anything else 0.
        m.r_squared = sse <= 1e-18 ? 1.0 : 0.0;
    }
    if (with_intervals) {
        m.crps = crps_sum / static_cast<double>(n);
    }
    return m;
}

}  // namespace gridshed::forecast
