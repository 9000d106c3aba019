#include <cmath>
#include <limits>
#include <numeric>

#include "gridshed/cluster/algorithms.hpp"
#include "gridshed/core/errors.hpp"
#include "gridshed/core/rng.hpp"

namespace gridshed::cluster {

namespace {

/// Nearest centroid, ties toward the lowest cluster index.
int nearest_centroid(const Eigen::MatrixXd& centroids, const Eigen::RowVectorXd& point) {
    int best = 0;
    double best_dist = (centroids.row(0) - point).squaredNorm();
    for (Eigen::Index c = 1; c < centroids.rows(); ++c) {
        const double dist = (centroids.row(c) - point).squaredNorm();
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<int>(c);
        }
    }
    return best;
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int k, Rng& rng) {
    const Eigen::Index n = points.rows();
    Eigen::MatrixXd centroids(k, points.cols());
    centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.uniform_index(n)));

    Eigen::VectorXd dist2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        dist2(i) = (points.row(i) - centroids.row(0)).squaredNorm();
    }
    for (int c = 1; c < k; ++c) {
        const double total = dist2.sum();
        Eigen::Index chosen = 0;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double cumulative = 0.0;
            chosen = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                cumulative += dist2(i);
                if (cumulative >= target) {
                    chosen = i;
                    break;
                }
            }
        } else {
            chosen = static_cast<Eigen::Index>(rng.uniform_index(n));
        }
        centroids.row(c) = points.row(chosen);
        for (Eigen::Index i = 0; i < n; ++i) {
            dist2(i) = std::min(dist2(i), (points.row(i) - centroids.row(c)).squaredNorm());
        }
    }
    return centroids;
}

struct LloydResult {
    Eigen::MatrixXd centroids;
    std::vector<int> labels;
    double wcss = 0.0;
    int iterations = 0;
};

LloydResult lloyd(const Eigen::MatrixXd& points, Eigen::MatrixXd centroids,
                  int max_iter, double tol) {
    const Eigen::Index n = points.rows();
    const int k = static_cast<int>(centroids.rows());
    LloydResult result;
    result.labels.assign(static_cast<std::size_t>(n), 0);

    for (int iter = 0; iter < max_iter; ++iter) {
        result.iterations = iter + 1;
        for (Eigen::Index i = 0; i < n; ++i) {
            result.labels[static_cast<std::size_t>(i)] = nearest_centroid(centroids, points.row(i));
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(result.labels[static_cast<std::size_t>(i)]) += points.row(i);
            counts(result.labels[static_cast<std::size_t>(i)]) += 1.0;
        }

        // Relocate empty centroids to the point farthest from its own
        // centroid (lowest index on ties) so k clusters survive.
        for (int c = 0; c < k; ++c) {
            if (counts(c) > 0.0) continue;
            Eigen::Index farthest = 0;
            double far_dist = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double dist =
                    (points.row(i) - centroids.row(result.labels[static_cast<std::size_t>(i)]))
                        .squaredNorm();
                if (dist > far_dist) {
                    far_dist = dist;
                    farthest = i;
                }
            }
            sums.row(c) = points.row(farthest);
            counts(c) = 1.0;
        }

        double movement = 0.0;
        for (int c = 0; c < k; ++c) {
            const Eigen::RowVectorXd updated = sums.row(c) / counts(c);
            movement = std::max(movement, (updated - centroids.row(c)).norm());
            centroids.row(c) = updated;
        }
        if (movement < tol) break;
    }

    // Final assignment against the converged centroids.
    result.wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        result.labels[static_cast<std::size_t>(i)] = nearest_centroid(centroids, points.row(i));
        result.wcss +=
            (points.row(i) - centroids.row(result.labels[static_cast<std::size_t>(i)])).squaredNorm();
    }
    result.centroids = std::move(centroids);
    return result;
}

}  // namespace

ClusterModel fit_kmeans(const FeatureMatrix& features, int k, std::uint64_t seed,
                        int restarts) {
    features.validate();
    const Eigen::Index n = features.n_rows();
    if (k < 1 || k > n) {
        throw ArgumentError("fit_kmeans: k must be in [1, n]");
    }
    if (restarts < 1) restarts = 1;

    LloydResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, "kmeans-restart-" + std::to_string(r)));
        LloydResult run =
            lloyd(features.values, kmeanspp_init(features.values, k, rng), 300, 1e-6);
        if (run.wcss < best.wcss) best = std::move(run);
    }

    ClusterModel model;
    model.algorithm = Algorithm::KMeans;
    model.labels = std::move(best.labels);
    model.centroids = std::move(best.centroids);
    model.seed = seed;
    model.params["k"] = k;
    model.params["restarts"] = restarts;
    model.params["wcss"] = best.wcss;
    return model;
}

ClusterModel fit_minibatch_kmeans(const FeatureMatrix& features, int k, int batch_size,
                                  std::uint64_t seed, int epochs) {
    features.validate();
    const Eigen::Index n = features.n_rows();
    if (k < 1 || k > n) {
        throw ArgumentError("fit_minibatch_kmeans: k must be in [1, n]");
    }
    if (batch_size < 1) {
        throw ArgumentError("fit_minibatch_kmeans: batch_size must be >= 1");
    }

    Rng rng(derive_seed(seed, "minibatch-init"));
    Eigen::MatrixXd centroids = kmeanspp_init(features.values, k, rng);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> batch_labels;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (Eigen::Index begin = 0; begin < n; begin += batch_size) {
            const Eigen::Index end = std::min<Eigen::Index>(begin + batch_size, n);
            batch_labels.resize(static_cast<std::size_t>(end - begin));
            // Assign the whole batch against frozen centroids, then apply
            // the per-centroid 1/count updates in batch order.
            for (Eigen::Index i = begin; i < end; ++i) {
                batch_labels[static_cast<std::size_t>(i - begin)] =
                    nearest_centroid(centroids, features.values.row(order[static_cast<std::size_t>(i)]));
            }
            for (Eigen::Index i = begin; i < end; ++i) {
                const int c = batch_labels[static_cast<std::size_t>(i - begin)];
                counts(c) += 1.0;
                const double eta = 1.0 / counts(c);
                centroids.row(c) +=
                    eta * (features.values.row(order[static_cast<std::size_t>(i)]) - centroids.row(c));
            }
        }
    }

    ClusterModel model;
    model.algorithm = Algorithm::MiniBatch;
    model.labels.resize(static_cast<std::size_t>(n));
    double wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int c = nearest_centroid(centroids, features.values.row(i));
        model.labels[static_cast<std::size_t>(i)] = c;
        wcss += (features.values.row(i) - centroids.row(c)).squaredNorm();
    }
    model.centroids = std::move(centroids);
    model.seed = seed;
    model.params["k"] = k;
    model.params["batch_size"] = batch_size;
    model.params["epochs"] = epochs;
    model.params["wcss"] = wcss;
    return model;
}

}  // namespace gridshed::cluster
