#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "gridshed/core/series.hpp"
#include "gridshed/forecast/metrics.hpp"

namespace gridshed::forecast {

struct SeasonalSpec {
    int P = 0;
    int D = 0;
    int Q = 0;
    int s = 24;
};

/// ARIMA(p,d,q) orders, optionally with a multiplicative seasonal part
/// (P,D,Q)_s. At least one of the orders must be active.
struct ArimaSpec {
    int p = 0;
    int d = 0;
    int q = 0;
    std::optional<SeasonalSpec> seasonal;

    int param_count() const {
        return p + q + (seasonal ? seasonal->P + seasonal->Q : 0);
    }
    /// Throws ArgumentError when all orders are zero, any is negative,
    /// or a seasonal period is < 2.
    void validate() const;
    std::string to_string() const;
};

/// Fitted (S)ARIMA model. Coefficients follow the convention
///   phi(B) PHI(B^s) (1-B)^d (1-B^s)^D (y - drift terms) = theta(B) THETA(B^s) e
/// estimated on the conditional sum of squares. The mean of the (fully
/// differenced) series is always fitted, which acts as a drift term when
/// d + D >= 1. The struct is open so tests can build models directly.
struct ArimaModel {
    ArimaSpec spec;
    Eigen::VectorXd params;  // [phi 1..p, theta 1..q, PHI 1..P, THETA 1..Q]
    double mean = 0.0;       // mean of the differenced series
    double sigma2 = 0.0;     // innovation variance (CSS / effective n)
    bool stationarity_warning = false;

    /// Differencing stack: levels[0] is the (gap-interpolated) series, each
    /// further entry is the previous one differenced at level_lags[i].
    std::vector<std::vector<double>> levels;
    std::vector<int> level_lags;
    std::vector<double> residuals;  // in-sample innovations of the last level

    /// Composite polynomial coefficients with leading 1 (AR side carries
    /// negative signs, MA side positive, matching the recursion below).
    std::vector<double> composite_ar() const;
    std::vector<double> composite_ma() const;
};

/// Estimate by Hannan-Rissanen (long-AR residual proxy, then least squares)
/// refined with Levenberg-damped Gauss-Newton on the conditional sum of
/// squares. Gaps are linearly interpolated first. AR roots are checked via
/// the companion spectral radius; a root on or inside the unit circle only
/// sets stationarity_warning. Throws ArgumentError when the series is too
/// short, ValidationError when non-finite values survive interpolation.
ArimaModel fit_arima(const HourlySeries& train, const ArimaSpec& spec);

/// Iterated one-step recursion with future innovations at zero, then
/// undifferencing. Intervals are Gaussian at 80% nominal from the psi-weight
/// cumulative variance. horizon must be >= 1.
ForecastResult forecast_arima(const ArimaModel& model, int horizon);

}  // namespace gridshed::forecast
