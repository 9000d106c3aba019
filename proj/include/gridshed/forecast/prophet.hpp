#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "gridshed/core/series.hpp"
#include "gridshed/forecast/metrics.hpp"

namespace gridshed::forecast {

/// Additive trend + seasonality + holiday regression model.
struct ProphetSpec {
    int n_changepoints = 10;
    int daily_fourier_order = 6;
    int weekly_fourier_order = 3;
    double ridge_lambda = 1.0;

    void validate() const;
    int param_count() const {
        return 2 + n_changepoints + 2 * (daily_fourier_order + weekly_fourier_order) + 1;
    }
};

/// Fitted additive model: piecewise-linear trend (continuous, slope changes
/// at uniformly spaced changepoints), daily and weekly Fourier terms phased
/// by the absolute hour stamp, and one holiday indicator regressor.
struct ProphetModel {
    ProphetSpec spec;
    HourStamp train_start;
    long train_len = 0;                 // hours spanned by the training slice
    std::vector<double> changepoints;   // normalized positions in (0, 1)
    Eigen::VectorXd coef;               // design-column coefficients
    double residual_std = 0.0;

    double holiday_coefficient() const { return coef(coef.size() - 1); }
    /// One design row for hour index i (0 = first training hour).
    Eigen::RowVectorXd design_row(long i, bool holiday) const;
};

/// Ridge-regularized least squares on the design (normal equations solved by
/// Cholesky). Gap hours are simply omitted from the fit. Requires two weeks
/// of data when weekly terms are active (48 hours otherwise). calendar must
/// align with the series. Throws ValidationError when the normal equations
/// are singular (possible only at ridge_lambda = 0).
ProphetModel fit_prophet(const HourlySeries& train,
                         const std::vector<std::uint8_t>& calendar,
                         const ProphetSpec& spec);

/// Evaluate the design at the next `horizon` hours; the final trend slope
/// extends beyond the training span. future_flags must have `horizon`
/// entries. Intervals are point +- 1.2816 * residual_std.
ForecastResult forecast_prophet(const ProphetModel& model, int horizon,
                                const std::vector<std::uint8_t>& future_flags);

}  // namespace gridshed::forecast
