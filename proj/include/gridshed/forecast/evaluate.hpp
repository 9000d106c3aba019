#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gridshed/forecast/arima.hpp"
#include "gridshed/forecast/gru.hpp"
#include "gridshed/forecast/metrics.hpp"
#include "gridshed/forecast/prophet.hpp"
#include "gridshed/forecast/series.hpp"

namespace gridshed::forecast {

enum class Family { Arima, Sarima, Prophet, Gru };

const char* family_name(Family family);
Family parse_family(const std::string& name);

/// Bundle of per-family hyperparameters; `family` selects which one applies.
struct ForecasterSpec {
    Family family = Family::Prophet;
    ArimaSpec arima{1, 1, 1, std::nullopt};
    ArimaSpec sarima{1, 0, 1, SeasonalSpec{0, 1, 1, 24}};
    ProphetSpec prophet{};
    GruSpec gru{};

    int param_count() const;
    std::string to_string() const;
};

/// Uniform fit/predict interface over the model families. fit receives only
/// the training slice (and its aligned calendar), which is what keeps
/// hyperparameter search and evaluation free of test-set leakage.
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::string name() const = 0;
    virtual void fit(const HourlySeries& train, const std::vector<std::uint8_t>& calendar) = 0;
    virtual ForecastResult predict(int horizon, const std::vector<std::uint8_t>& future_flags) = 0;
};

std::unique_ptr<Forecaster> make_forecaster(const ForecasterSpec& spec);

struct EvaluationOptions {
    double initial_train_fraction = 0.8;
    int horizon = 24;
    int step = 24;
};

struct FoldResult {
    long origin = 0;  // first forecast index of the fold
    Metrics metrics;
};

struct EvaluationResult {
    std::vector<FoldResult> folds;
    Metrics mean;  // uniform average over folds (NaN components skipped)
};

/// Expanding-window rolling-origin evaluation. The first origin sits at
/// floor(fraction * n); each fold refits on [0, origin) and forecasts
/// `horizon` hours; origins advance by `step` while origin + horizon <= n.
/// Fold metrics skip gap hours in the actuals. Throws ArgumentError when no
/// fold fits.
EvaluationResult rolling_origin_evaluate(const ClusterSeries& series,
                                         const std::vector<std::uint8_t>& calendar,
                                         const ForecasterSpec& spec,
                                         const EvaluationOptions& options);

struct GridSearchResult {
    ForecasterSpec best;
    std::size_t best_index = 0;
    std::vector<double> mean_rmse;          // NaN where the spec failed
    std::vector<std::string> failures;      // messages for failed specs ("" = ok)
};

/// Evaluate every candidate by rolling-origin CV on a validation tail carved
/// from the given training slice only, then pick the smallest mean RMSE
/// (ties: fewer parameters, then grid order). Throws ArgumentError when the
/// grid is empty or every candidate fails (listing per-spec failures).
GridSearchResult grid_search(const ClusterSeries& train,
                             const std::vector<std::uint8_t>& calendar,
                             const std::vector<ForecasterSpec>& grid,
                             const EvaluationOptions& options);

}  // namespace gridshed::forecast
