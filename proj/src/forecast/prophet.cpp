#include "gridshed/forecast/prophet.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "gridshed/core/errors.hpp"

namespace gridshed::forecast {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void ProphetSpec::validate() const {
    if (n_changepoints < 0 || daily_fourier_order < 0 || weekly_fourier_order < 0) {
        throw ArgumentError("prophet spec orders must be >= 0");
    }
    if (ridge_lambda < 0.0) {
        throw ArgumentError("prophet ridge_lambda must be >= 0");
    }
}

Eigen::RowVectorXd ProphetModel::design_row(long i, bool holiday) const {
    const int n_cols = spec.param_count();
    Eigen::RowVectorXd row(n_cols);
    int col = 0;
    const double t = static_cast<double>(i) / static_cast<double>(train_len);
    row(col++) = 1.0;
    row(col++) = t;
    for (double cp : changepoints) row(col++) = std::max(0.0, t - cp);

    // Seasonal phases follow the absolute hour stamp so fit and forecast
    // stay aligned.
    const std::int64_t absolute = train_start.hours + i;
    const double daily_phase = kTwoPi * static_cast<double>(((absolute % 24) + 24) % 24) / 24.0;
    for (int k = 1; k <= spec.daily_fourier_order; ++k) {
        row(col++) = std::sin(k * daily_phase);
        row(col++) = std::cos(k * daily_phase);
    }
    const double weekly_phase =
        kTwoPi * static_cast<double>(((absolute % 168) + 168) % 168) / 168.0;
    for (int k = 1; k <= spec.weekly_fourier_order; ++k) {
        row(col++) = std::sin(k * weekly_phase);
        row(col++) = std::cos(k * weekly_phase);
    }
    row(col++) = holiday ? 1.0 : 0.0;
    return row;
}

ProphetModel fit_prophet(const HourlySeries& train,
                         const std::vector<std::uint8_t>& calendar,
                         const ProphetSpec& spec) {
    spec.validate();
    if (calendar.size() != train.size()) {
        throw ArgumentError("fit_prophet: calendar does not align with the series");
    }
    const long n = static_cast<long>(train.size());
    const long min_len = spec.weekly_fourier_order > 0 ? 2 * 168 : 48;
    if (n < min_len) {
        throw ArgumentError("fit_prophet: series too short (need " + std::to_string(min_len) +
                            " hours)");
    }

    ProphetModel model;
    model.spec = spec;
    model.train_start = train.start;
    model.train_len = n;
    for (int j = 1; j <= spec.n_changepoints; ++j) {
        model.changepoints.push_back(static_cast<double>(j) /
                                     static_cast<double>(spec.n_changepoints + 1));
    }

    const int n_cols = spec.param_count();
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(n_cols, n_cols);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_cols);
    long used = 0;
    for (long i = 0; i < n; ++i) {
        if (train.is_gap(static_cast<std::size_t>(i))) continue;  // gap rows simply dropped
        const Eigen::RowVectorXd row =
            model.design_row(i, calendar[static_cast<std::size_t>(i)] != 0);
        normal.selfadjointView<Eigen::Lower>().rankUpdate(row.transpose());
        rhs += row.transpose() * train.values[static_cast<std::size_t>(i)];
        ++used;
    }
    if (used < n_cols) {
        throw ArgumentError("fit_prophet: fewer usable rows than design columns");
    }
    normal = normal.selfadjointView<Eigen::Lower>();
    normal.diagonal().array() += spec.ridge_lambda;

    Eigen::LLT<Eigen::MatrixXd> llt(normal);
    if (llt.info() != Eigen::Success) {
        throw ValidationError("fit_prophet: singular normal equations (ridge_lambda too small)");
    }
    model.coef = llt.solve(rhs);

    double sse = 0.0;
    for (long i = 0; i < n; ++i) {
        if (train.is_gap(static_cast<std::size_t>(i))) continue;
        const double fitted =
            model.design_row(i, calendar[static_cast<std::size_t>(i)] != 0) * model.coef;
        const double err = train.values[static_cast<std::size_t>(i)] - fitted;
        sse += err * err;
    }
    model.residual_std = std::sqrt(sse / static_cast<double>(used));
    return model;
}

ForecastResult forecast_prophet(const ProphetModel& model, int horizon,
                                const std::vector<std::uint8_t>& future_flags) {
    if (horizon < 1) throw ArgumentError("forecast_prophet: horizon must be >= 1");
    if (future_flags.size() != static_cast<std::size_t>(horizon)) {
        throw ArgumentError("forecast_prophet: future_flags must have `horizon` entries");
    }
    ForecastResult result;
    result.point.resize(static_cast<std::size_t>(horizon));
    result.lower.resize(static_cast<std::size_t>(horizon));
    result.upper.resize(static_cast<std::size_t>(horizon));
    const double width = kZ80 * model.residual_std;
    for (int j = 0; j < horizon; ++j) {
        const double value =
            model.design_row(model.train_len + j, future_flags[static_cast<std::size_t>(j)] != 0) *
            model.coef;
        result.point[static_cast<std::size_t>(j)] = value;
        result.lower[static_cast<std::size_t>(j)] = value - width;
        result.upper[static_cast<std::size_t>(j)] = value + width;
    }
    return result;
}

}  // namespace gridshed::forecast
