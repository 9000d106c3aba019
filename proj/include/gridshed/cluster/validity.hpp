#pragma once

#include <cstdint>
#include <vector>

#include "gridshed/cluster/model.hpp"
#include "gridshed/reduce/features.hpp"

namespace gridshed::cluster {

using reduce::FeatureMatrix;

struct ValidityScores {
    double silhouette = 0.0;         // in [-1, 1]
    double davies_bouldin = 0.0;     // >= 0, lower is better
    double calinski_harabasz = 0.0;  // >= 0, higher is better
    double wcss = 0.0;               // within-cluster sum of squares
};

/// The four validity indices for a labeling. Noise points (-1) are excluded
/// from every index. Degenerate conventions: a singleton cluster contributes
/// silhouette 0; a zero denominator in Calinski-Harabasz yields 0.
/// Throws ValidationError when fewer than 2 non-noise clusters remain
/// (the indices are undefined there).
ValidityScores compute_validity(const FeatureMatrix& features,
                                const std::vector<int>& labels);

struct ValidityRow {
    Algorithm algorithm;
    int k = 0;                 // requested k (clusters found, for DBSCAN rows)
    ValidityScores scores;
};

struct ValidityReport {
    std::vector<ValidityRow> rows;
    int silhouette_best_k = 0;         // argmax silhouette (smallest k on ties)
    int davies_bouldin_best_k = 0;     // argmin DBI
    int calinski_harabasz_best_k = 0;  // argmax CH
};

/// Fit `algorithm` for every k in k_range and tabulate the four indices.
/// k_range entries must lie in [2, n-1]. DBSCAN takes no k and is rejected
/// with ArgumentError. Mini-batch runs use batch size min(32, n).
ValidityReport select_k(const FeatureMatrix& features, Algorithm algorithm,
                        const std::vector<int>& k_range, std::uint64_t seed);

}  // namespace gridshed::cluster
