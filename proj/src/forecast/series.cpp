#include "gridshed/forecast/series.hpp"

#include <iostream>
#include <map>

#include "gridshed/core/errors.hpp"

namespace gridshed::forecast {

std::vector<ClusterSeries> build_cluster_series(const disagg::BuildingEstimates& estimates,
                                                const std::vector<int>& labels) {
    if (labels.size() != estimates.n_buildings()) {
        throw ArgumentError("build_cluster_series: labels do not cover all buildings");
    }

    std::map<int, std::vector<Eigen::Index>> members;
    for (std::size_t b = 0; b < labels.size(); ++b) {
        members[labels[b]].push_back(static_cast<Eigen::Index>(b));
    }

    const Eigen::Index hours = estimates.values.rows();
    std::vector<ClusterSeries> out;
    for (const auto& [cluster_id, cols] : members) {
        ClusterSeries cs;
        cs.cluster_id = cluster_id;
        cs.series.start = estimates.start;
        cs.series.values.resize(static_cast<std::size_t>(hours));
        for (Eigen::Index t = 0; t < hours; ++t) {
            double sum = 0.0;
            bool any = false;
            for (Eigen::Index b : cols) {
                const double v = estimates.values(t, b);
                if (HourlySeries::is_gap_value(v)) continue;
                sum += v;
                any = true;
            }
            cs.series.values[static_cast<std::size_t>(t)] =
                any ? sum : HourlySeries::gap_marker();
        }
        out.push_back(std::move(cs));
    }
    return out;
}

}  // namespace gridshed::forecast
