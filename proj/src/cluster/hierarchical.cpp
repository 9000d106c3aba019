#include <limits>
#include <vector>

#include "gridshed/cluster/algorithms.hpp"
#include "gridshed/core/errors.hpp"

namespace gridshed::cluster {

namespace {

struct ActiveCluster {
    int id = 0;  // creation order: leaves 0..n-1, merges n, n+1, ...
    double size = 0.0;
    Eigen::RowVectorXd centroid;
    std::vector<int> members;  // original row indices
};

/// Ward variance increase caused by merging a and b.
double ward_cost(const ActiveCluster& a, const ActiveCluster& b) {
    return a.size * b.size / (a.size + b.size) * (a.centroid - b.centroid).squaredNorm();
}

}  // namespace

std::vector<WardMerge> ward_linkage(const Eigen::MatrixXd& points) {
    const Eigen::Index n = points.rows();
    std::vector<ActiveCluster> active(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        active[static_cast<std::size_t>(i)] = {static_cast<int>(i), 1.0, points.row(i),
                                               {static_cast<int>(i)}};
    }

    std::vector<WardMerge> merges;
    int next_id = static_cast<int>(n);
    while (active.size() > 1) {
        std::size_t best_a = 0, best_b = 1;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a + 1 < active.size(); ++a) {
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                const double cost = ward_cost(active[a], active[b]);
                if (cost < best_cost) {
                    best_cost = cost;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        // active is kept ordered by creation id, so the scan order breaks
        // cost ties toward the earliest-created pair.
        ActiveCluster merged;
        merged.id = next_id++;
        merged.size = active[best_a].size + active[best_b].size;
        merged.centroid = (active[best_a].size * active[best_a].centroid +
                           active[best_b].size * active[best_b].centroid) /
                          merged.size;
        merged.members = active[best_a].members;
        merged.members.insert(merged.members.end(), active[best_b].members.begin(),
                              active[best_b].members.end());
        merges.push_back({active[best_a].id, active[best_b].id, best_cost});

        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_a));
        active.push_back(std::move(merged));
    }
    return merges;
}

ClusterModel fit_hierarchical(const FeatureMatrix& features, int k) {
    features.validate();
    const Eigen::Index n = features.n_rows();
    if (k < 1 || k > n) {
        throw ArgumentError("fit_hierarchical: k must be in [1, n]");
    }

    // Rebuild the active set, stopping after n - k merges.
    std::vector<ActiveCluster> active(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        active[static_cast<std::size_t>(i)] = {static_cast<int>(i), 1.0, features.values.row(i),
                                               {static_cast<int>(i)}};
    }
    int next_id = static_cast<int>(n);
    for (Eigen::Index merge = 0; merge < n - k; ++merge) {
        std::size_t best_a = 0, best_b = 1;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a + 1 < active.size(); ++a) {
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                const double cost = ward_cost(active[a], active[b]);
                if (cost < best_cost) {
                    best_cost = cost;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        ActiveCluster merged;
        merged.id = next_id++;
        merged.size = active[best_a].size + active[best_b].size;
        merged.centroid = (active[best_a].size * active[best_a].centroid +
                           active[best_b].size * active[best_b].centroid) /
                          merged.size;
        merged.members = active[best_a].members;
        merged.members.insert(merged.members.end(), active[best_b].members.begin(),
                              active[best_b].members.end());
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_a));
        active.push_back(std::move(merged));
    }

    // Number clusters by their first member in row order.
    ClusterModel model;
    model.algorithm = Algorithm::Hierarchical;
    model.labels.assign(static_cast<std::size_t>(n), 0);
    std::vector<int> first_member;
    first_member.reserve(active.size());
    for (const auto& cluster : active) {
        int first = cluster.members.front();
        for (int m : cluster.members) first = std::min(first, m);
        first_member.push_back(first);
    }
    std::vector<std::size_t> order(active.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return first_member[a] < first_member[b];
    });

    model.centroids.resize(static_cast<Eigen::Index>(active.size()), features.n_cols());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const ActiveCluster& cluster = active[order[rank]];
        model.centroids.row(static_cast<Eigen::Index>(rank)) = cluster.centroid;
        for (int m : cluster.members) {
            model.labels[static_cast<std::size_t>(m)] = static_cast<int>(rank);
        }
    }
    model.params["k"] = k;
    return model;
}

}  // namespace gridshed::cluster
