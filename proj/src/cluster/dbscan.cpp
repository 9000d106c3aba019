#include <algorithm>
#include <cmath>
#include <deque>

#include "gridshed/cluster/algorithms.hpp"
#include "gridshed/core/errors.hpp"

namespace gridshed::cluster {

double dbscan_default_eps(const FeatureMatrix& features, int min_pts) {
    features.validate();
    const Eigen::Index n = features.n_rows();
    if (min_pts < 1) throw ArgumentError("dbscan_default_eps: min_pts must be >= 1");
    if (n < 2) throw ArgumentError("dbscan_default_eps: need at least 2 points");

    std::vector<double> kdist(static_cast<std::size_t>(n));
    std::vector<double> dists;
    for (Eigen::Index i = 0; i < n; ++i) {
        dists.clear();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            dists.push_back((features.values.row(i) - features.values.row(j)).norm());
        }
        std::sort(dists.begin(), dists.end());
        const std::size_t rank = std::min<std::size_t>(static_cast<std::size_t>(min_pts), dists.size());
        kdist[static_cast<std::size_t>(i)] = dists[rank - 1];
    }
    std::sort(kdist.begin(), kdist.end());
    // Nearest-rank 90th percentile of the k-distance curve.
    const std::size_t rank =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.9 * double(n)))) - 1;
    return kdist[std::min(rank, kdist.size() - 1)];
}

ClusterModel fit_dbscan(const FeatureMatrix& features, double eps, int min_pts) {
    features.validate();
    if (!(eps > 0.0)) throw ArgumentError("fit_dbscan: eps must be > 0");
    if (min_pts < 1) throw ArgumentError("fit_dbscan: min_pts must be >= 1");

    const Eigen::Index n = features.n_rows();
    const double eps2 = eps * eps;

    auto neighbors = [&](Eigen::Index i, std::vector<Eigen::Index>& out) {
        out.clear();
        for (Eigen::Index j = 0; j < n; ++j) {
            if ((features.values.row(i) - features.values.row(j)).squaredNorm() <= eps2) {
                out.push_back(j);  // includes i itself
            }
        }
    };

    constexpr int kUnvisited = -2;
    ClusterModel model;
    model.algorithm = Algorithm::Dbscan;
    model.labels.assign(static_cast<std::size_t>(n), kUnvisited);

    std::vector<Eigen::Index> seed_neighbors, expansion;
    int next_cluster = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (model.labels[static_cast<std::size_t>(i)] != kUnvisited) continue;
        neighbors(i, seed_neighbors);
        if (seed_neighbors.size() < static_cast<std::size_t>(min_pts)) {
            model.labels[static_cast<std::size_t>(i)] = -1;  // noise (may become border later)
            continue;
        }
        const int cluster = next_cluster++;
        model.labels[static_cast<std::size_t>(i)] = cluster;
        std::deque<Eigen::Index> queue(seed_neighbors.begin(), seed_neighbors.end());
        while (!queue.empty()) {
            const Eigen::Index j = queue.front();
            queue.pop_front();
            int& label = model.labels[static_cast<std::size_t>(j)];
            if (label == -1) label = cluster;  // border point claimed by first cluster
            if (label != kUnvisited) continue;
            label = cluster;
            neighbors(j, expansion);
            if (expansion.size() >= static_cast<std::size_t>(min_pts)) {
                queue.insert(queue.end(), expansion.begin(), expansion.end());
            }
        }
    }

    model.params["eps"] = eps;
    model.params["min_pts"] = min_pts;
    model.params["clusters_found"] = next_cluster;
    return model;
}

}  // namespace gridshed::cluster
