#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gridshed::pipeline {

/// Flat key-value pipeline configuration (`section.key = value`). Every
/// field has a default; unknown keys are rejected. Command-line flags
/// override file values.
struct PipelineConfig {
    // paths
    std::string feeder_path;
    std::string inventory_path;
    std::string calendar_path;
    std::string out_dir = "out";

    // one root seed, expanded per stage by fixed labels
    std::uint64_t seed = 1;

    // generator
    int gen_buildings = 55;
    int gen_hours = 3648;
    std::vector<int> gen_cluster_sizes = {9, 37, 9};
    double gen_gap_rate = 0.0;

    // clustering
    std::string cluster_algorithm = "minibatch";
    int cluster_k = 3;
    int cluster_k_min = 2;
    int cluster_k_max = 8;
    int cluster_batch_size = 32;
    int dbscan_min_pts = 4;
    double dbscan_eps = 0.0;  // 0 = k-distance heuristic

    // pca
    bool pca_enabled = true;
    double pca_variance_target = 0.95;

    // forecasting
    std::vector<std::string> forecast_families = {"arima", "sarima", "prophet"};
    std::string forecast_model = "prophet";
    int forecast_horizon = 24;
    int forecast_cv_step = 24;
    double forecast_train_fraction = 0.8;
    std::vector<int> arima_order = {1, 1, 1};
    std::vector<int> sarima_order = {1, 0, 1, 0, 1, 1, 24};
    int prophet_changepoints = 10;
    int prophet_daily_order = 6;
    int prophet_weekly_order = 3;
    double prophet_ridge_lambda = 1.0;
    int gru_hidden = 32;
    int gru_lookback = 24;
    int gru_epochs = 200;
    double gru_learning_rate = 1e-3;

    // allocation
    std::string weights_path;  // empty = demand-ranked defaults
    std::string supply_path;   // empty = supply_factor * forecast total
    double supply_factor = 0.9;

    /// Throws ArgumentError when a value is out of range.
    void validate() const;

    /// Canonical serialized form (sorted keys); hashing this gives the
    /// provenance config hash.
    std::string canonical() const;
    std::uint64_t hash() const;
};

/// Parse a config file. Throws InputError when the file is missing,
/// ArgumentError for unknown keys or bad values.
PipelineConfig load_config(const std::string& path);

/// Apply one `section.key=value` assignment (used for file rows and
/// command-line overrides alike).
void apply_config_entry(PipelineConfig& config, const std::string& key,
                        const std::string& value);

}  // namespace gridshed::pipeline
