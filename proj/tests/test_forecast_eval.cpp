#include <doctest.h>

#include <cmath>

#include "gridshed/core/errors.hpp"
#include "gridshed/core/rng.hpp"
#include "gridshed/forecast/evaluate.hpp"
#include "support/oracles.hpp"

using namespace gridshed;
using namespace gridshed::forecast;

namespace {

ClusterSeries cluster_series_from(const std::vector<double>& values) {
    ClusterSeries cs;
    cs.cluster_id = 0;
    cs.series.start = parse_hourstamp("2024-01-01T00:00:00");
    cs.series.values = values;
    return cs;
}

}  // namespace

TEST_CASE("metric examples") {
    Metrics exact = compute_metrics({1, 2, 3}, {1, 2, 3});
    CHECK(exact.rmse == doctest::Approx(0.0));
    CHECK(exact.mape_percent == doctest::Approx(0.0));
    CHECK(exact.r_squared == doctest::Approx(1.0));

    Metrics mean_pred = compute_metrics({1, 2, 3}, {2, 2, 2});
    CHECK(mean_pred.r_squared == doctest::Approx(0.0));

    Metrics hand = compute_metrics({10, 20}, {11, 18});
    CHECK(hand.rmse == doctest::Approx(std::sqrt(2.5)));
    CHECK(hand.mape_percent == doctest::Approx(10.0));
}

TEST_CASE("mape skips negligible actuals and can be undefined") {
    Metrics some = compute_metrics({0.0, 10.0}, {1.0, 12.0});
    CHECK(some.mape_skipped == 1);
    CHECK(some.mape_percent == doctest::Approx(20.0));

    Metrics none = compute_metrics({0.0, 0.0}, {1.0, 1.0});
    CHECK(none.mape_skipped == 2);
    CHECK_FALSE(none.has_mape());
}

TEST_CASE("gaussian crps closed form matches monte carlo within 1%") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const double mu = rng.uniform(-5.0, 5.0);
        const double sigma = rng.uniform(0.5, 3.0);
        const double y = mu + sigma * rng.uniform(-2.0, 2.0);
        const double closed = gaussian_crps(y, mu, sigma);
        const double mc = oracles::crps_monte_carlo(y, mu, sigma, 100000, 1000 + trial);
        CHECK(std::fabs(closed - mc) <= 0.01 * std::max(std::fabs(closed), 0.05));
    }
    CHECK(gaussian_crps(3.0, 3.0, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("rmse and crps scale linearly, mape and r-squared are scale-invariant") {
    Rng rng(23);
    std::vector<double> actual(50), predicted(50), lower(50), upper(50);
    for (std::size_t i = 0; i < actual.size(); ++i) {
        actual[i] = 20.0 + rng.uniform(0.0, 10.0);
        predicted[i] = actual[i] + rng.uniform(-2.0, 2.0);
        lower[i] = predicted[i] - 1.5;
        upper[i] = predicted[i] + 1.5;
    }
    const Metrics base = compute_metrics(actual, predicted, lower, upper);
    const double c = 3.25;
    std::vector<double> a2(actual), p2(predicted), l2(lower), u2(upper);
    for (std::size_t i = 0; i < actual.size(); ++i) {
        a2[i] *= c;
        p2[i] *= c;
        l2[i] *= c;
        u2[i] *= c;
    }
    const Metrics scaled = compute_metrics(a2, p2, l2, u2);
    CHECK(scaled.rmse == doctest::Approx(c * base.rmse).epsilon(1e-12));
    CHECK(scaled.crps == doctest::Approx(c * base.crps).epsilon(1e-12));
    CHECK(scaled.mape_percent == doctest::Approx(base.mape_percent).epsilon(1e-12));
    CHECK(scaled.r_squared == doctest::Approx(base.r_squared).epsilon(1e-12));
}

TEST_CASE("rolling origin: step = n gives exactly one fold (the 80/20 split)") {
    Rng rng(31);
    std::vector<double> y(400);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = 30.0 + 5.0 * std::sin(2.0 * M_PI * static_cast<double>(i % 24) / 24.0) +
               rng.gaussian();
    }
    const ClusterSeries cs = cluster_series_from(y);
    ForecasterSpec spec;
    spec.family = Family::Arima;
    spec.arima = ArimaSpec{1, 0, 0, std::nullopt};
    EvaluationOptions options;
    options.horizon = 24;
    options.step = static_cast<int>(y.size());
    const auto eval = rolling_origin_evaluate(cs, std::vector<std::uint8_t>(y.size(), 0),
                                              spec, options);
    CHECK(eval.folds.size() == 1);
    CHECK(eval.folds[0].origin == 320);
}

TEST_CASE("rolling origin fold count follows the arithmetic") {
    for (int n : {400, 500, 730}) {
        for (int step : {24, 48}) {
            const int horizon = 24;
            std::vector<double> y(static_cast<std::size_t>(n), 10.0);
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += 0.01 * static_cast<double>(i % 7);
            const ClusterSeries cs = cluster_series_from(y);
            ForecasterSpec spec;
            spec.family = Family::Arima;
            spec.arima = ArimaSpec{0, 1, 0, std::nullopt};
            EvaluationOptions options;
            options.horizon = horizon;
            options.step = step;
            const auto eval = rolling_origin_evaluate(
                cs, std::vector<std::uint8_t>(y.size(), 0), spec, options);
            const long test_len = n - static_cast<long>(std::floor(0.8 * n));
            const long expected = (test_len - horizon) / step + 1;
            CHECK(static_cast<long>(eval.folds.size()) == expected);
        }
    }
}

TEST_CASE("a perfect-foresight dummy scores perfectly on every fold") {
    // Test-only forecaster that looks up the actual future values.
    class PerfectForesight final : public Forecaster {
    public:
        explicit PerfectForesight(std::vector<double> full) : full_(std::move(full)) {}
        std::string name() const override { return "oracle"; }
        void fit(const HourlySeries& train, const std::vector<std::uint8_t>&) override {
            origin_ = train.size();
        }
        ForecastResult predict(int horizon, const std::vector<std::uint8_t>&) override {
            ForecastResult result;
            for (int j = 0; j < horizon; ++j) {
                result.point.push_back(full_[origin_ + static_cast<std::size_t>(j)]);
            }
            return result;
        }

    private:
        std::vector<double> full_;
        std::size_t origin_ = 0;
    };

    Rng rng(37);
    std::vector<double> y(300);
    for (auto& v : y) v = 50.0 + rng.uniform(0.0, 20.0);
    const ClusterSeries cs = cluster_series_from(y);
    const std::vector<std::uint8_t> calendar(y.size(), 0);

    PerfectForesight dummy(y);
    EvaluationOptions options;
    options.horizon = 12;
    options.step = 12;
    const long first_origin = static_cast<long>(std::floor(0.8 * y.size()));
    for (long origin = first_origin; origin + options.horizon <= static_cast<long>(y.size());
         origin += options.step) {
        HourlySeries train;
        train.start = cs.series.start;
        train.values.assign(y.begin(), y.begin() + origin);
        dummy.fit(train, calendar);
        const auto result = dummy.predict(options.horizon, {});
        std::vector<double> actual(y.begin() + origin, y.begin() + origin + options.horizon);
        const Metrics metrics = compute_metrics(actual, result.point);
        CHECK(metrics.rmse == doctest::Approx(0.0));
        CHECK(metrics.r_squared == doctest::Approx(1.0));
    }
}

TEST_CASE("grid search returns the only candidate and prefers AR(1) on AR(1) data") {
    Rng rng(41);
    std::vector<double> y(1500);
    double state = 0.0;
    for (auto& v : y) {
        state = 0.8 * state + rng.gaussian();
        v = 50.0 + state;
    }
    const ClusterSeries cs = cluster_series_from(y);
    const std::vector<std::uint8_t> calendar(y.size(), 0);
    // One-step evaluation: the AR(1) advantage is its innovation variance,
    // which multi-step horizons wash out (phi^h decays fast).
    EvaluationOptions options;
    options.horizon = 1;
    options.step = 10;

    ForecasterSpec ar1;
    ar1.family = Family::Arima;
    ar1.arima = ArimaSpec{1, 0, 0, std::nullopt};
    ForecasterSpec ma1;
    ma1.family = Family::Arima;
    ma1.arima = ArimaSpec{0, 0, 1, std::nullopt};

    const auto single = grid_search(cs, calendar, {ma1}, options);
    CHECK(single.best_index == 0);

    const auto result = grid_search(cs, calendar, {ar1, ma1}, options);
    CHECK(result.best_index == 0);

    // Identical specs tie on RMSE; grid order wins.
    const auto tie = grid_search(cs, calendar, {ma1, ma1}, options);
    CHECK(tie.best_index == 0);
}

TEST_CASE("grid search aggregates failures when every spec is unfittable") {
    std::vector<double> y(40, 5.0);
    const ClusterSeries cs = cluster_series_from(y);
    ForecasterSpec needs_data;
    needs_data.family = Family::Sarima;
    needs_data.sarima = ArimaSpec{1, 0, 1, SeasonalSpec{1, 1, 1, 24}};
    try {
        grid_search(cs, std::vector<std::uint8_t>(y.size(), 0), {needs_data}, {});
        FAIL("expected ArgumentError");
    } catch (const ArgumentError& e) {
        CHECK(std::string(e.what()).find("sarima") != std::string::npos);
    }
}

TEST_CASE("evaluation skips gap hours in the held-out actuals") {
    std::vector<double> y(300, 20.0);
    ClusterSeries cs = cluster_series_from(y);
    for (std::size_t i = 250; i < 300; i += 7) cs.series.values[i] = HourlySeries::gap_marker();
    ForecasterSpec spec;
    spec.family = Family::Arima;
    spec.arima = ArimaSpec{0, 1, 0, std::nullopt};
    EvaluationOptions options;
    options.horizon = 24;
    options.step = 24;
    const auto eval = rolling_origin_evaluate(cs, std::vector<std::uint8_t>(300, 0), spec,
                                              options);
    CHECK(eval.mean.rmse == doctest::Approx(0.0));
}
