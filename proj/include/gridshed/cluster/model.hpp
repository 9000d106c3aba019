#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace gridshed::cluster {

enum class Algorithm { KMeans, MiniBatch, Hierarchical, Dbscan, Gmm, Spectral };

const char* algorithm_name(Algorithm algorithm);

/// Parses "kmeans", "minibatch", "hierarchical", "dbscan", "gmm", "spectral".
/// Throws ArgumentError on anything else.
Algorithm parse_algorithm(const std::string& name);

/// Result of one clustering fit.
struct ClusterModel {
    Algorithm algorithm = Algorithm::KMeans;
    std::vector<int> labels;      // -1 marks noise (DBSCAN only)
    Eigen::MatrixXd centroids;    // k x d where the algorithm has centroids
    Eigen::MatrixXd memberships;  // n x k row-stochastic (GMM only)
    std::map<std::string, double> params;
    std::uint64_t seed = 0;

    /// Number of distinct non-noise labels.
    int n_clusters() const;
    bool has_noise() const;
};

}  // namespace gridshed::cluster
