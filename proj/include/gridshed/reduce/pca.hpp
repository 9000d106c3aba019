#pragma once

#include <Eigen/Core>

#include "gridshed/reduce/features.hpp"

namespace gridshed::reduce {

/// Fitted principal-component model.
struct PcaModel {
    Eigen::VectorXd mean;              // d
    Eigen::MatrixXd components;        // k x d, orthonormal rows
    Eigen::VectorXd explained_variance;  // k, non-increasing
    double total_variance = 0.0;       // sum of all d eigenvalues

    Eigen::Index n_components() const { return components.rows(); }
    double explained_fraction() const {
        return total_variance > 0.0 ? explained_variance.sum() / total_variance : 1.0;
    }
};

/// Fit PCA on (typically normalized) features. Keeps the smallest number of
/// leading eigenvectors of the sample covariance (population normalization)
/// whose cumulative explained-variance fraction reaches variance_target.
/// Sign convention: the largest-magnitude entry of each component is
/// positive. Throws ArgumentError for fewer than 2 rows or a target outside
/// (0, 1]; ValidationError for non-finite input.
PcaModel pca_fit(const FeatureMatrix& features, double variance_target = 0.95);

/// Center rows by the model mean and project onto the components. Column
/// names become pc1..pck. Throws ArgumentError on dimension mismatch.
FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& features);

}  // namespace gridshed::reduce
