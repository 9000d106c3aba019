#include "gridshed/forecast/evaluate.hpp"

#include <cmath>
#include <sstream>

#include "gridshed/core/errors.hpp"

namespace gridshed::forecast {

const char* family_name(Family family) {
    switch (family) {
        case Family::Arima: return "arima";
        case Family::Sarima: return "sarima";
        case Family::Prophet: return "prophet";
        case Family::Gru: return "gru";
    }
    return "?";
}

Family parse_family(const std::string& name) {
    if (name == "arima") return Family::Arima;
    if (name == "sarima") return Family::Sarima;
    if (name == "prophet") return Family::Prophet;
    if (name == "gru") return Family::Gru;
    throw ArgumentError("unknown forecast model family '" + name + "'");
}

int ForecasterSpec::param_count() const {
    switch (family) {
        case Family::Arima: return arima.param_count();
        case Family::Sarima: return sarima.param_count();
        case Family::Prophet: return prophet.param_count();
        case Family::Gru:
            return 3 * (gru.hidden_size * gru.hidden_size + 2 * gru.hidden_size) +
                   gru.hidden_size + 1;
    }
    return 0;
}

std::string ForecasterSpec::to_string() const {
    std::ostringstream out;
    out << family_name(family);
    switch (family) {
        case Family::Arima: out << arima.to_string(); break;
        case Family::Sarima: out << sarima.to_string(); break;
        case Family::Prophet:
            out << "(cp=" << prophet.n_changepoints << ",daily=" << prophet.daily_fourier_order
                << ",weekly=" << prophet.weekly_fourier_order << ",lambda=" << prophet.ridge_lambda
                << ")";
            break;
        case Family::Gru:
            out << "(h=" << gru.hidden_size << ",lookback=" << gru.lookback
                << ",epochs=" << gru.epochs << ")";
            break;
    }
    return out.str();
}

namespace {

class ArimaForecaster final : public Forecaster {
public:
    ArimaForecaster(const ArimaSpec& spec, const char* label) : spec_(spec), label_(label) {}
    std::string name() const override { return label_ + spec_.to_string(); }
    void fit(const HourlySeries& train, const std::vector<std::uint8_t>&) override {
        model_ = fit_arima(train, spec_);
    }
    ForecastResult predict(int horizon, const std::vector<std::uint8_t>&) override {
        return forecast_arima(model_, horizon);
    }

private:
    ArimaSpec spec_;
    std::string label_;
    ArimaModel model_;
};

class ProphetForecaster final : public Forecaster {
public:
    explicit ProphetForecaster(const ProphetSpec& spec) : spec_(spec) {}
    std::string name() const override { return "prophet"; }
    void fit(const HourlySeries& train, const std::vector<std::uint8_t>& calendar) override {
        model_ = fit_prophet(train, calendar, spec_);
    }
    ForecastResult predict(int horizon, const std::vector<std::uint8_t>& flags) override {
        return forecast_prophet(model_, horizon, flags);
    }

private:
    ProphetSpec spec_;
    ProphetModel model_;
};

class GruForecaster final : public Forecaster {
public:
    explicit GruForecaster(const GruSpec& spec) : spec_(spec) {}
    std::string name() const override { return "gru"; }
    void fit(const HourlySeries& train, const std::vector<std::uint8_t>&) override {
        model_ = fit_gru(train, spec_);
    }
    ForecastResult predict(int horizon, const std::vector<std::uint8_t>&) override {
        return forecast_gru(model_, horizon);
    }

private:
    GruSpec spec_;
    GruModel model_;
};

}  // namespace

std::unique_ptr<Forecaster> make_forecaster(const ForecasterSpec& spec) {
    switch (spec.family) {
        case Family::Arima: return std::make_unique<ArimaForecaster>(spec.arima, "arima");
        case Family::Sarima: return std::make_unique<ArimaForecaster>(spec.sarima, "sarima");
        case Family::Prophet: return std::make_unique<ProphetForecaster>(spec.prophet);
        case Family::Gru: return std::make_unique<GruForecaster>(spec.gru);
    }
    throw ArgumentError("make_forecaster: bad family");
}

EvaluationResult rolling_origin_evaluate(const ClusterSeries& series,
                                         const std::vector<std::uint8_t>& calendar,
                                         const ForecasterSpec& spec,
                                         const EvaluationOptions& options) {
    const long n = static_cast<long>(series.series.size());
    if (calendar.size() != static_cast<std::size_t>(n)) {
        throw ArgumentError("rolling_origin_evaluate: calendar does not align with series");
    }
    if (!(options.initial_train_fraction > 0.0) || options.initial_train_fraction >= 1.0) {
        throw ArgumentError("rolling_origin_evaluate: initial_train_fraction must be in (0,1)");
    }
    if (options.horizon < 1 || options.step < 1) {
        throw ArgumentError("rolling_origin_evaluate: horizon and step must be >= 1");
    }

    const long first_origin =
        static_cast<long>(std::floor(options.initial_train_fraction * static_cast<double>(n)));
    EvaluationResult result;

    for (long origin = first_origin; origin + options.horizon <= n; origin += options.step) {
        HourlySeries train;
        train.start = series.series.start;
        train.values.assign(series.series.values.begin(),
                            series.series.values.begin() + origin);
        const std::vector<std::uint8_t> train_cal(calendar.begin(), calendar.begin() + origin);
        const std::vector<std::uint8_t> future_cal(calendar.begin() + origin,
                                                   calendar.begin() + origin + options.horizon);

        auto forecaster = make_forecaster(spec);
        forecaster->fit(train, train_cal);
        ForecastResult forecast = forecaster->predict(options.horizon, future_cal);

        // Gap hours in the held-out actuals carry no ground truth.
        std::vector<double> actual, predicted, lower, upper;
        for (int j = 0; j < options.horizon; ++j) {
            const std::size_t t = static_cast<std::size_t>(origin + j);
            if (series.series.is_gap(t)) continue;
            actual.push_back(series.series.values[t]);
            predicted.push_back(forecast.point[static_cast<std::size_t>(j)]);
            if (forecast.has_intervals()) {
                lower.push_back(forecast.lower[static_cast<std::size_t>(j)]);
                upper.push_back(forecast.upper[static_cast<std::size_t>(j)]);
            }
        }
        if (actual.empty()) continue;  // fully gapped fold carries no signal
        FoldResult fold;
        fold.origin = origin;
        fold.metrics = compute_metrics(actual, predicted, lower, upper);
        result.folds.push_back(fold);
    }
    if (result.folds.empty()) {
        throw ArgumentError("rolling_origin_evaluate: no evaluation fold fits the series");
    }

    double rmse = 0.0, mape = 0.0, r2 = 0.0, crps = 0.0;
    long mape_n = 0, crps_n = 0, skipped = 0;
    for (const FoldResult& fold : result.folds) {
        rmse += fold.metrics.rmse;
        r2 += fold.metrics.r_squared;
        skipped += fold.metrics.mape_skipped;
        if (fold.metrics.has_mape()) {
            mape += fold.metrics.mape_percent;
            ++mape_n;
        }
        if (fold.metrics.has_crps()) {
            crps += fold.metrics.crps;
            ++crps_n;
        }
    }
    const double folds = static_cast<double>(result.folds.size());
    result.mean.rmse = rmse / folds;
    result.mean.r_squared = r2 / folds;
    result.mean.mape_skipped = skipped;
    if (mape_n > 0) result.mean.mape_percent = mape / static_cast<double>(mape_n);
    if (crps_n > 0) result.mean.crps = crps / static_cast<double>(crps_n);
    return result;
}

GridSearchResult grid_search(const ClusterSeries& train,
                             const std::vector<std::uint8_t>& calendar,
                             const std::vector<ForecasterSpec>& grid,
                             const EvaluationOptions& options) {
    if (grid.empty()) throw ArgumentError("grid_search: empty grid");
    if (calendar.size() != train.series.size()) {
        throw ArgumentError("grid_search: calendar does not align with series");
    }

    GridSearchResult result;
    result.mean_rmse.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    result.failures.assign(grid.size(), "");

    bool have_best = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            // The validation tail is carved from the provided training slice
            // by the rolling evaluator itself; the test region never enters.
            const EvaluationResult eval =
                rolling_origin_evaluate(train, calendar, grid[i], options);
            result.mean_rmse[i] = eval.mean.rmse;
        } catch (const std::exception& e) {
            result.failures[i] = e.what();
            continue;
        }
        if (!have_best) {
            result.best = grid[i];
            result.best_index = i;
            have_best = true;
            continue;
        }
        const double best_rmse = result.mean_rmse[result.best_index];
        const double rmse = result.mean_rmse[i];
        if (rmse < best_rmse ||
            (rmse == best_rmse && grid[i].param_count() < result.best.param_count())) {
            result.best = grid[i];
            result.best_index = i;
        }
    }
    if (!have_best) {
        std::ostringstream out;
        out << "grid_search: every candidate failed:";
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out << "\n  " << grid[i].to_string() << ": " << result.failures[i];
        }
        throw ArgumentError(out.str());
    }
    return result;
}

}  // namespace gridshed::forecast
