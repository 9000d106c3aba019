#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridshed/allocate/shedding.hpp"
#include "gridshed/cluster/validity.hpp"
#include "gridshed/disagg/disagg.hpp"
#include "gridshed/forecast/metrics.hpp"
#include "gridshed/forecast/series.hpp"
#include "gridshed/reduce/features.hpp"

namespace gridshed::pipeline {

/// Disaggregation artifact: inventory estimates and reconciled values side
/// by side, one row per (hour, building).
struct EstimatesArtifact {
    disagg::BuildingEstimates aim;
    disagg::BuildingEstimates reconciled;
    std::vector<disagg::HourFlag> flags;  // per hour
};

void write_estimates_csv(const std::string& path, const EstimatesArtifact& artifact);
EstimatesArtifact read_estimates_csv(const std::string& path);

void write_features_csv(const std::string& path, const reduce::FeatureMatrix& features);
reduce::FeatureMatrix read_features_csv(const std::string& path);

void write_clusters_csv(const std::string& path, const std::vector<std::string>& building_ids,
                        const std::vector<int>& labels);
std::vector<std::pair<std::string, int>> read_clusters_csv(const std::string& path);

void write_validity_csv(const std::string& path,
                        const std::vector<cluster::ValidityRow>& rows);

void write_cluster_series_csv(const std::string& path,
                              const std::vector<forecast::ClusterSeries>& series);
std::vector<forecast::ClusterSeries> read_cluster_series_csv(const std::string& path);

/// Forecast rows keyed by cluster; lower/upper stay empty without intervals.
struct ForecastArtifact {
    HourStamp start;
    std::vector<int> cluster_ids;
    std::map<int, forecast::ForecastResult> results;
};

void write_forecast_csv(const std::string& path, const ForecastArtifact& artifact);
ForecastArtifact read_forecast_csv(const std::string& path);

struct MetricsRow {
    std::string model;
    std::string cluster;  // cluster id or "mean"
    forecast::Metrics metrics;
};

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);

HourlySeries read_supply_csv(const std::string& path);
std::map<int, double> read_weights_csv(const std::string& path);
void write_weights_csv(const std::string& path, const std::map<int, double>& weights);

void write_plan_csv(const std::string& path, HourStamp start,
                    const std::vector<int>& cluster_ids,
                    const std::vector<std::vector<double>>& demands,
                    const std::vector<allocate::SheddingPlan>& plans);

}  // namespace gridshed::pipeline
