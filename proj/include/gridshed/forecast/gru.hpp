#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "gridshed/core/series.hpp"
#include "gridshed/forecast/metrics.hpp"

namespace gridshed::forecast {

struct GruSpec {
    int hidden_size = 32;
    int lookback = 24;   // input window, hours
    int epochs = 200;
    double learning_rate = 1e-3;
    std::uint64_t seed = 42;

    void validate() const;
};

/// Ranges observed across every training forward pass; the gates must stay
/// inside their sigmoid/tanh codomains.
struct GruGateStats {
    double z_min = 1.0, z_max = 0.0;
    double r_min = 1.0, r_max = 0.0;
    double cand_min = 1.0, cand_max = -1.0;
};

/// Single-layer GRU (update/reset/candidate gates) with a linear head,
/// trained on sliding windows by full-gradient backpropagation through time
/// with Adam. Inputs are min-max scaled with statistics from the training
/// slice only.
struct GruModel {
    GruSpec spec;

    // Gate parameters. Input is scalar, so the W's are H-vectors.
    Eigen::VectorXd w_z, w_r, w_h;
    Eigen::MatrixXd u_z, u_r, u_h;  // H x H
    Eigen::VectorXd b_z, b_r, b_h;
    Eigen::VectorXd w_out;
    double b_out = 0.0;

    double scale_min = 0.0;
    double scale_range = 1.0;          // max - min (1 when degenerate)
    std::vector<double> train_tail;    // last lookback observations, unscaled
    std::vector<double> loss_trace;    // training MSE per epoch
    GruGateStats gate_stats;

    /// Hidden state after running one scaled window; exposed for testing.
    Eigen::VectorXd run_window(const Eigen::VectorXd& scaled_window) const;
    double predict_next(const std::vector<double>& recent_unscaled) const;
};

/// Train on all windows of `lookback` consecutive non-gap values followed by
/// a non-gap target (windows touching gaps are discarded). Deterministic for
/// a seed. Throws ArgumentError when the series is shorter than lookback+1
/// or no valid window survives the gap rule.
GruModel fit_gru(const HourlySeries& train, const GruSpec& spec);

/// Recursive one-step forecasting; no intervals (CRPS stays undefined).
ForecastResult forecast_gru(const GruModel& model, int horizon);

/// Flattened-parameter access used by training and the gradient checks.
struct GruParamView {
    std::vector<double*> blocks;
    std::vector<long> sizes;
    long total = 0;
};
GruParamView gru_params(GruModel& model);

/// Mean-squared-error loss over a window batch and its analytic gradient
/// (same flattening as gru_params). Exposed so tests can difference it.
double gru_loss_and_gradient(GruModel& model, const Eigen::MatrixXd& windows,
                             const Eigen::VectorXd& targets, Eigen::VectorXd* grad);

}  // namespace gridshed::forecast
