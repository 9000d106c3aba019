#pragma once

#include <vector>

#include "gridshed/cluster/model.hpp"
#include "gridshed/disagg/disagg.hpp"

namespace gridshed::forecast {

/// Summed hourly load of one cluster's member buildings.
struct ClusterSeries {
    int cluster_id = 0;
    HourlySeries series;
};

/// Per-hour sums over cluster members, ordered by ascending cluster id
/// (noise label -1 first, as its own series). A gap propagates only when
/// every member is gapped that hour. Labels must cover all buildings.
std::vector<ClusterSeries> build_cluster_series(const disagg::BuildingEstimates& estimates,
                                                const std::vector<int>& labels);

}  // namespace gridshed::forecast
