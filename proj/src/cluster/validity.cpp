#include "gridshed/cluster/validity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "gridshed/cluster/algorithms.hpp"
#include "gridshed/core/errors.hpp"

namespace gridshed::cluster {

ValidityScores compute_validity(const FeatureMatrix& features,
                                const std::vector<int>& labels) {
    features.validate();
    if (labels.size() != static_cast<std::size_t>(features.n_rows())) {
        throw ArgumentError("compute_validity: label count does not match rows");
    }

    // Keep non-noise points; map their labels to dense 0..k-1 (ascending).
    std::vector<Eigen::Index> points;
    std::map<int, int> dense;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) continue;
        points.push_back(static_cast<Eigen::Index>(i));
        dense.emplace(labels[i], 0);
    }
    int next = 0;
    for (auto& [label, id] : dense) id = next++;
    const int k = next;
    const Eigen::Index n = static_cast<Eigen::Index>(points.size());
    if (k < 2) {
        throw ValidationError("validity indices are undefined for fewer than 2 clusters");
    }

    std::vector<int> owner(static_cast<std::size_t>(n));
    std::vector<double> csize(static_cast<std::size_t>(k), 0.0);
    for (Eigen::Index a = 0; a < n; ++a) {
        owner[static_cast<std::size_t>(a)] = dense.at(labels[static_cast<std::size_t>(points[a])]);
        csize[static_cast<std::size_t>(owner[a])] += 1.0;
    }

    const Eigen::Index d = features.n_cols();
    Eigen::MatrixXd centroid = Eigen::MatrixXd::Zero(k, d);
    for (Eigen::Index a = 0; a < n; ++a) {
        centroid.row(owner[a]) += features.values.row(points[a]);
    }
    for (int c = 0; c < k; ++c) centroid.row(c) /= csize[static_cast<std::size_t>(c)];

    // Pairwise distances once; all indices below reuse them.
    Eigen::MatrixXd dist(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        dist(a, a) = 0.0;
        for (Eigen::Index b = a + 1; b < n; ++b) {
            dist(a, b) = dist(b, a) =
                (features.values.row(points[a]) - features.values.row(points[b])).norm();
        }
    }

    ValidityScores out;

    // Silhouette
    double silhouette_sum = 0.0;
    std::vector<double> mean_to_cluster(static_cast<std::size_t>(k));
    for (Eigen::Index a = 0; a < n; ++a) {
        std::fill(mean_to_cluster.begin(), mean_to_cluster.end(), 0.0);
        for (Eigen::Index b = 0; b < n; ++b) {
            mean_to_cluster[static_cast<std::size_t>(owner[b])] += dist(a, b);
        }
        const int own = owner[a];
        double s = 0.0;
        if (csize[static_cast<std::size_t>(own)] > 1.0) {
            const double cohesion =
                mean_to_cluster[static_cast<std::size_t>(own)] / (csize[static_cast<std::size_t>(own)] - 1.0);
            double separation = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                if (c == own) continue;
                separation =
                    std::min(separation, mean_to_cluster[static_cast<std::size_t>(c)] /
                                             csize[static_cast<std::size_t>(c)]);
            }
            const double denom = std::max(cohesion, separation);
            s = denom > 0.0 ? (separation - cohesion) / denom : 0.0;
        }
        // Singleton clusters contribute 0 by convention.
        silhouette_sum += s;
    }
    out.silhouette = silhouette_sum / static_cast<double>(n);

    // Within-cluster sum of squares (the k-means objective) and scatter.
    out.wcss = 0.0;
    std::vector<double> spread(static_cast<std::size_t>(k), 0.0);  // mean dist to centroid
    for (Eigen::Index a = 0; a < n; ++a) {
        const double to_centroid =
            (features.values.row(points[a]) - centroid.row(owner[a])).norm();
        out.wcss += to_centroid * to_centroid;
        spread[static_cast<std::size_t>(owner[a])] += to_centroid;
    }
    for (int c = 0; c < k; ++c) spread[static_cast<std::size_t>(c)] /= csize[static_cast<std::size_t>(c)];

    // Davies-Bouldin. Per-cluster worst ratios are sorted before summing so
    // the result is bit-identical under label permutations.
    std::vector<double> worst(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < k; ++i) {
        double w = 0.0;
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            const double centroid_dist = (centroid.row(i) - centroid.row(j)).norm();
            const double sum_spread = spread[static_cast<std::size_t>(i)] + spread[static_cast<std::size_t>(j)];
            double ratio;
            if (centroid_dist > 0.0) {
                ratio = sum_spread / centroid_dist;
            } else {
                ratio = sum_spread > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
            }
            w = std::max(w, ratio);
        }
        worst[static_cast<std::size_t>(i)] = w;
    }
    std::sort(worst.begin(), worst.end());
    out.davies_bouldin = std::accumulate(worst.begin(), worst.end(), 0.0) / static_cast<double>(k);

    // Calinski-Harabasz, with sorted between-group terms for the same reason.
    Eigen::RowVectorXd global = Eigen::RowVectorXd::Zero(d);
    for (Eigen::Index a = 0; a < n; ++a) global += features.values.row(points[a]);
    global /= static_cast<double>(n);
    std::vector<double> between_terms(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        between_terms[static_cast<std::size_t>(c)] =
            csize[static_cast<std::size_t>(c)] * (centroid.row(c) - global).squaredNorm();
    }
    std::sort(between_terms.begin(), between_terms.end());
    const double between = std::accumulate(between_terms.begin(), between_terms.end(), 0.0);
    const double df_between = static_cast<double>(k - 1);
    const double df_within = static_cast<double>(n - k);
    if (df_within > 0.0 && out.wcss > 0.0) {
        out.calinski_harabasz = (between / df_between) / (out.wcss / df_within);
    } else {
        out.calinski_harabasz = 0.0;  // degenerate partition, documented convention
    }
    return out;
}

ValidityReport select_k(const FeatureMatrix& features, Algorithm algorithm,
                        const std::vector<int>& k_range, std::uint64_t seed) {
    features.validate();
    if (algorithm == Algorithm::Dbscan) {
        throw ArgumentError("select_k: dbscan does not take a cluster count");
    }
    if (k_range.empty()) throw ArgumentError("select_k: empty k range");
    const Eigen::Index n = features.n_rows();
    for (int k : k_range) {
        if (k < 2 || k > n - 1) {
            throw ArgumentError("select_k: k=" + std::to_string(k) + " outside [2, n-1]");
        }
    }

    ValidityReport report;
    for (int k : k_range) {
        ClusterModel model;
        switch (algorithm) {
            case Algorithm::KMeans: model = fit_kmeans(features, k, seed); break;
            case Algorithm::MiniBatch:
                model = fit_minibatch_kmeans(features, k,
                                             static_cast<int>(std::min<Eigen::Index>(32, n)), seed);
                break;
            case Algorithm::Hierarchical: model = fit_hierarchical(features, k); break;
            case Algorithm::Gmm: model = fit_gmm(features, k, seed); break;
            case Algorithm::Spectral: model = fit_spectral(features, k, seed); break;
            case Algorithm::Dbscan: break;  // unreachable
        }
        report.rows.push_back({algorithm, k, compute_validity(features, model.labels)});
    }

    const ValidityRow* best_sil = &report.rows.front();
    const ValidityRow* best_dbi = &report.rows.front();
    const ValidityRow* best_ch = &report.rows.front();
    for (const auto& row : report.rows) {
        if (row.scores.silhouette > best_sil->scores.silhouette) best_sil = &row;
        if (row.scores.davies_bouldin < best_dbi->scores.davies_bouldin) best_dbi = &row;
        if (row.scores.calinski_harabasz > best_ch->scores.calinski_harabasz) best_ch = &row;
    }
    report.silhouette_best_k = best_sil->k;
    report.davies_bouldin_best_k = best_dbi->k;
    report.calinski_harabasz_best_k = best_ch->k;
    return report;
}

}  // namespace gridshed::cluster
