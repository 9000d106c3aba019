#include <algorithm>
#include <cmath>
#include <vector>

#include "gridshed/cluster/algorithms.hpp"
#include "gridshed/core/errors.hpp"
#include "gridshed/core/rng.hpp"
#include "gridshed/numeric/symeig.hpp"

namespace gridshed::cluster {

Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& affinity) {
    const Eigen::Index n = affinity.rows();
    if (n == 0 || affinity.cols() != n) {
        throw ArgumentError("normalized_laplacian: affinity must be square");
    }
    Eigen::VectorXd degree = affinity.rowwise().sum();
    Eigen::VectorXd inv_sqrt(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        inv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;
    }
    Eigen::MatrixXd lap = -(inv_sqrt.asDiagonal() * affinity * inv_sqrt.asDiagonal());
    lap.diagonal().array() += 1.0;
    return lap;
}

ClusterModel fit_spectral_affinity(const Eigen::MatrixXd& affinity, int k,
                                   std::uint64_t seed) {
    const Eigen::Index n = affinity.rows();
    if (k < 1 || k > n) throw ArgumentError("fit_spectral_affinity: k must be in [1, n]");

    Eigen::MatrixXd w = 0.5 * (affinity + affinity.transpose());
    w.diagonal().setZero();

    const Eigen::MatrixXd lap = normalized_laplacian(w);
    numeric::SymmetricEigen eig = numeric::symmetric_eigen(lap);

    // Eigenvalues are sorted descending; the embedding uses the k smallest,
    // ordered from smallest up.
    Eigen::MatrixXd embedding(n, k);
    for (int c = 0; c < k; ++c) {
        embedding.col(c) = eig.vectors.col(n - 1 - c);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0) embedding.row(i) /= norm;
    }

    FeatureMatrix spectral_features;
    spectral_features.values = std::move(embedding);
    spectral_features.building_ids.assign(static_cast<std::size_t>(n), "");
    for (int c = 0; c < k; ++c) spectral_features.feature_names.push_back("ev" + std::to_string(c));

    ClusterModel inner = fit_kmeans(spectral_features, k, derive_seed(seed, "spectral-embedding"));
    ClusterModel model;
    model.algorithm = Algorithm::Spectral;
    model.labels = std::move(inner.labels);
    model.seed = seed;
    model.params["k"] = k;
    return model;
}

ClusterModel fit_spectral(const FeatureMatrix& features, int k, std::uint64_t seed) {
    features.validate();
    const Eigen::Index n = features.n_rows();
    if (n < 2) throw ArgumentError("fit_spectral: need at least 2 points");
    if (k < 1 || k > n) throw ArgumentError("fit_spectral: k must be in [1, n]");

    // Bandwidth: median pairwise distance.
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            dists.push_back((features.values.row(i) - features.values.row(j)).norm());
        }
    }
    std::sort(dists.begin(), dists.end());
    const std::size_t m = dists.size();
    const double bandwidth =
        m % 2 == 1 ? dists[m / 2] : 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
    if (!(bandwidth > 0.0)) {
        throw ValidationError("fit_spectral: zero bandwidth (all points identical)");
    }

    Eigen::MatrixXd affinity(n, n);
    const double denom = 2.0 * bandwidth * bandwidth;
    for (Eigen::Index i = 0; i < n; ++i) {
        affinity(i, i) = 0.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double d2 = (features.values.row(i) - features.values.row(j)).squaredNorm();
            affinity(i, j) = affinity(j, i) = std::exp(-d2 / denom);
        }
    }

    ClusterModel model = fit_spectral_affinity(affinity, k, seed);
    model.params["bandwidth"] = bandwidth;
    return model;
}

}  // namespace gridshed::cluster
