#pragma once

#include <cstdint>

#include "gridshed/cluster/model.hpp"
#include "gridshed/reduce/features.hpp"

namespace gridshed::cluster {

using reduce::FeatureMatrix;

/// Lloyd iterations from k-means++ starts, best of `restarts` by within-
/// cluster sum of squares. Iterates until the largest centroid movement
/// drops below 1e-6 or 300 iterations. Nearest-centroid ties break toward
/// the lowest cluster index. Deterministic for a seed.
ClusterModel fit_kmeans(const FeatureMatrix& features, int k, std::uint64_t seed,
                        int restarts = 10);

/// Mini-batch k-means: k-means++ start, then per-centroid 1/count learning-
/// rate updates over shuffled mini-batches for a fixed number of epochs.
ClusterModel fit_minibatch_kmeans(const FeatureMatrix& features, int k, int batch_size,
                                  std::uint64_t seed, int epochs = 100);

/// One agglomerative merge step (Ward criterion).
struct WardMerge {
    int left = 0;        // merged cluster ids (creation order; leaves are 0..n-1)
    int right = 0;
    double cost = 0.0;   // Ward variance increase of the merge
};

/// Full Ward merge sequence, mostly exposed for inspection/testing.
std::vector<WardMerge> ward_linkage(const Eigen::MatrixXd& points);

/// Agglomerative (Ward) clustering cut at k clusters. Deterministic: cost
/// ties merge the earliest-created pair first; output labels are numbered by
/// first member in row order.
ClusterModel fit_hierarchical(const FeatureMatrix& features, int k);

/// Density-based clustering. Neighborhoods are closed Euclidean balls and
/// include the point itself; noise points get label -1. Cluster ids follow
/// first-core-point-visited order (row order), making the labeling
/// deterministic.
ClusterModel fit_dbscan(const FeatureMatrix& features, double eps, int min_pts);

/// Default eps heuristic: the 90th percentile (nearest rank) of the
/// min_pts-nearest-neighbor distances.
double dbscan_default_eps(const FeatureMatrix& features, int min_pts);

/// Gaussian mixture by EM with full covariances (diagonal ridge 1e-6),
/// initialized from a k-means fit. Stops when the log-likelihood improves by
/// less than 1e-8 or after 500 iterations. Labels are argmax memberships.
/// Pass `log_likelihood_trace` to capture the per-iteration log-likelihood.
ClusterModel fit_gmm(const FeatureMatrix& features, int k, std::uint64_t seed,
                     std::vector<double>* log_likelihood_trace = nullptr);

/// Spectral clustering: RBF affinity with bandwidth = median pairwise
/// distance, symmetric normalized Laplacian, k smallest eigenvectors
/// (row-normalized) clustered by fit_kmeans. Throws ValidationError when all
/// points coincide (zero bandwidth).
ClusterModel fit_spectral(const FeatureMatrix& features, int k, std::uint64_t seed);

/// Spectral clustering from a precomputed symmetric affinity matrix
/// (diagonal ignored). This is the core of fit_spectral; exposed so exact
/// graph structures can be clustered directly.
ClusterModel fit_spectral_affinity(const Eigen::MatrixXd& affinity, int k,
                                   std::uint64_t seed);

/// I - D^(-1/2) W D^(-1/2) with zero-degree rows left as identity rows.
Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& affinity);

}  // namespace gridshed::cluster
